// Exercises libeoagent through its C interface only.

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <thread>

#include "doctest.h"
#include "eoagent/eoagent.h"
#include "httplib.h"
#include "json.hpp"

using nlohmann::json;

namespace {

// Takes ownership of a library string.
std::string take(char* s) {
  std::string out = s ? s : "";
  eoa_string_free(s);
  return out;
}

struct Tmp {
  std::filesystem::path path;
  Tmp() {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() / ("eoagent-capi-" + std::to_string(rd()));
    std::filesystem::create_directories(path);
  }
  ~Tmp() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

const char* kFireSpec =
    R"({"scene_id":"c","width":96,"height":96,"pixel_size_m":20,"seed":3,
        "regions":[{"kind":"fire","x":10,"y":10,"width":12,"height":12}]})";

}  // namespace

TEST_SUITE("c_api") {
  TEST_CASE("version and status names") {
    CHECK(std::strlen(eoa_version()) > 0);
    CHECK(std::string(eoa_status_name(EOA_OK)) == "ok");
    CHECK(std::string(eoa_status_name(EOA_ERR_MISSING_BAND)) == "missing-band");
    CHECK(std::string(eoa_status_name(EOA_ERR_INTERNAL)) == "internal");
    CHECK(std::string(eoa_status_name(static_cast<eoa_status>(999))) == "unknown");
  }

  TEST_CASE("null arguments are rejected") {
    CHECK(eoa_scene_load(nullptr, nullptr) == EOA_ERR_INVALID_ARGUMENT);
    CHECK(std::strlen(eoa_last_error()) > 0);
    eoa_scene* scene = nullptr;
    CHECK(eoa_scene_synthesize("{not json", &scene) == EOA_ERR_INVALID_CONFIG);
    CHECK(scene == nullptr);
  }

  TEST_CASE("scene lifecycle and tools") {
    Tmp tmp;
    eoa_scene* scene = nullptr;
    REQUIRE(eoa_scene_synthesize(kFireSpec, &scene) == EOA_OK);
    const auto dir = (tmp.path / "scene").string();
    REQUIRE(eoa_scene_save(scene, dir.c_str()) == EOA_OK);
    eoa_scene* loaded = nullptr;
    REQUIRE(eoa_scene_load(dir.c_str(), &loaded) == EOA_OK);

    char* info = nullptr;
    REQUIRE(eoa_scene_info(loaded, &info) == EOA_OK);
    const auto meta = json::parse(take(info));
    CHECK(meta["width"] == 96);
    CHECK(meta["scene_id"] == "c");

    char* out = nullptr;
    REQUIRE(eoa_run_tool(loaded, "index_fire", nullptr, &out) == EOA_OK);
    const auto result = json::parse(take(out));
    CHECK(result["detected"] == true);
    CHECK(result["metrics"]["active_fire_area_km2"].get<double>() == doctest::Approx(144 * 0.0004));
    CHECK(eoa_run_tool(loaded, "crystal_ball", nullptr, &out) == EOA_ERR_INVALID_ARGUMENT);

    REQUIRE(eoa_agent_analyze(loaded, "wildfire_specialist", nullptr, &out) == EOA_OK);
    CHECK(json::parse(take(out))["classification"] == "event_confirmed");
    CHECK(eoa_agent_analyze(loaded, "decision", nullptr, &out) == EOA_ERR_INVALID_ARGUMENT);

    eoa_scene_free(scene);
    eoa_scene_free(loaded);
    eoa_scene_free(nullptr);
  }

  TEST_CASE("load errors carry their code") {
    Tmp tmp;
    eoa_scene* scene = nullptr;
    CHECK(eoa_scene_load((tmp.path / "nothing").string().c_str(), &scene) == EOA_ERR_MISSING_METADATA);
    CHECK(std::string(eoa_last_error()).find("meta.json") != std::string::npos);
  }

  TEST_CASE("decision fuse") {
    const json request{{"hypothesis", nullptr}, {"hypothesis_absent", true}, {"specialist_reports", json::array()}};
    char* out = nullptr;
    REQUIRE(eoa_decision_fuse(request.dump().c_str(), nullptr, &out) == EOA_OK);
    CHECK(json::parse(take(out))["decision"] == "no_alert");
    CHECK(eoa_decision_fuse("{}", nullptr, &out) == EOA_ERR_SCHEMA_VIOLATION);
  }

  TEST_CASE("synthesize, run and report") {
    Tmp tmp;
    const auto data = (tmp.path / "data").string();
    char* manifest = nullptr;
    REQUIRE(eoa_synth_dataset("mixed", 6, 5, data.c_str(), &manifest) == EOA_OK);
    CHECK(json::parse(take(manifest))["entries"].size() == 6);
    CHECK(eoa_synth_dataset("weird", 6, 5, data.c_str(), &manifest) == EOA_ERR_INVALID_ARGUMENT);

    eoa_workflow* wf = nullptr;
    REQUIRE(eoa_workflow_create(nullptr, (tmp.path / "data" / "manifest.json").string().c_str(), nullptr, &wf) ==
            EOA_OK);
    const auto runs = (tmp.path / "runs.jsonl").string();
    int records = 0, failures = -1;
    REQUIRE(eoa_workflow_run_dataset(wf, "baseline,routed", runs.c_str(), &records, &failures) == EOA_OK);
    CHECK(records == 12);
    CHECK(failures == 0);
    CHECK(eoa_workflow_run_dataset(wf, "sideways", runs.c_str(), &records, &failures) == EOA_ERR_INVALID_ARGUMENT);
    eoa_workflow_free(wf);

    char* report = nullptr;
    char* text = nullptr;
    const auto out_dir = (tmp.path / "report").string();
    REQUIRE(eoa_bench_report(runs.c_str(), "spearman", out_dir.c_str(), &report, &text) == EOA_OK);
    CHECK(json::parse(take(report))["correlation"]["method"] == "spearman");
    CHECK(take(text).find("No event") != std::string::npos);
    CHECK(std::filesystem::exists(tmp.path / "report" / "plot_data.csv"));
  }

  TEST_CASE("workflow creation errors") {
    Tmp tmp;
    eoa_workflow* wf = nullptr;
    CHECK(eoa_workflow_create(nullptr, (tmp.path / "missing.json").string().c_str(), nullptr, &wf) != EOA_OK);
    CHECK(wf == nullptr);
  }

  TEST_CASE("node server over HTTP") {
    Tmp tmp;
    const auto data = (tmp.path / "data").string();
    char* manifest = nullptr;
    REQUIRE(eoa_synth_dataset("exemplars", 0, 1, data.c_str(), &manifest) == EOA_OK);
    const auto entries = json::parse(take(manifest))["entries"];
    REQUIRE(entries.size() == 3);

    eoa_node_server* server = nullptr;
    REQUIRE(eoa_node_server_start(R"({"node_id":"ff","role":"flood_specialist"})", "127.0.0.1", 0, nullptr,
                                  data.c_str(), (tmp.path / "data" / "manifest.json").string().c_str(),
                                  &server) == EOA_OK);
    const int port = eoa_node_server_port(server);
    CHECK(port > 0);
    std::thread waiter([server] { eoa_node_server_wait(server); });

    httplib::Client client("127.0.0.1", port);
    auto health = client.Get("/health");
    REQUIRE(health);
    CHECK(json::parse(health->body)["node_id"] == "ff");
    std::string flood_id;
    for (const auto& e : entries)
      if (e["label"] == "flood") flood_id = e["scene_id"];
    auto res = client.Post("/analyze", json{{"scene_ref", flood_id}}.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(json::parse(res->body)["classification"] == "event_confirmed");

    CHECK(eoa_node_server_stop(server) == EOA_OK);
    waiter.join();
    eoa_node_server_free(server);
  }
}
