#include <chrono>
#include <thread>

#include "doctest.h"
#include "eoagent/agents.hpp"
#include "helpers.hpp"
#include "mock_server.hpp"

using namespace eoa;
using nlohmann::json;

TEST_SUITE("remote_backends") {
  TEST_CASE("remote reasoner returns validated labels") {
    json seen;
    testing::MockServer server([&](const json& req) {
      seen = req;
      return std::pair{200, json{{"labels", {{"predicted_event", "flood"}}}, {"reasoning", "wet"}}.dump()};
    });
    RemoteReasoner r(server.url(), 2000);
    const auto out = r.reason(AgentRole::early_warning, json{{"fire_fraction", 0.0}});
    CHECK(out.labels["predicted_event"] == "flood");
    CHECK(out.reasoning == "wet");
    CHECK(seen["role"] == "early_warning");
    CHECK(seen["schema_version"] == kMessageSchemaVersion);
    CHECK(seen["evidence"]["fire_fraction"] == 0.0);
  }

  TEST_CASE("out-of-enum label is a backend failure") {
    testing::MockServer server(
        [](const json&) { return std::pair{200, json{{"labels", {{"predicted_event", "meteor"}}}}.dump()}; });
    auto backend = std::make_shared<RemoteReasoner>(server.url(), 2000);
    CHECK_ERROR_CODE(call_reasoner(backend, AgentRole::early_warning, json::object()), ErrorCode::backend_failure);
    CHECK_ERROR_CODE(backend->reason(AgentRole::early_warning, json::object()), ErrorCode::schema_violation);
  }

  TEST_CASE("server errors and non-JSON bodies") {
    testing::MockServer failing([](const json&) { return std::pair{500, std::string("boom")}; });
    CHECK_ERROR_CODE(RemoteReasoner(failing.url(), 2000).reason(AgentRole::decision, json::object()),
                     ErrorCode::remote_error);
    testing::MockServer garbage([](const json&) { return std::pair{200, std::string("<html>")}; });
    CHECK_ERROR_CODE(RemoteReasoner(garbage.url(), 2000).reason(AgentRole::decision, json::object()),
                     ErrorCode::schema_violation);
  }

  TEST_CASE("unreachable endpoint") {
    RemoteReasoner r("http://127.0.0.1:1", 500);
    CHECK_ERROR_CODE(r.reason(AgentRole::decision, json::object()), ErrorCode::connection_failure);
  }

  TEST_CASE("slow endpoint times out") {
    testing::MockServer slow([](const json&) {
      std::this_thread::sleep_for(std::chrono::milliseconds(400));
      return std::pair{200, json{{"labels", {{"decision", "alert"}}}}.dump()};
    });
    RemoteReasoner r(slow.url(), 100);
    CHECK_ERROR_CODE(r.reason(AgentRole::decision, json::object()), ErrorCode::timeout);
  }

  TEST_CASE("malformed endpoints are config errors") {
    CHECK_ERROR_CODE(RemoteReasoner("ftp://x", 10), ErrorCode::invalid_config);
    CHECK_ERROR_CODE(RemoteReasoner("http://host:abc", 10), ErrorCode::invalid_config);
    CHECK_ERROR_CODE(RemoteSegmenter("nonsense", 10), ErrorCode::invalid_config);
  }

  TEST_CASE("remote segmenter drives the ML fire tool") {
    testing::MockServer server([](const json& req) {
      const int n = req["window"]["width"].get<int>() * req["window"]["height"].get<int>();
      CHECK(req["features"].contains("B12"));
      return std::pair{200, json{{"labels", std::vector<int>(static_cast<std::size_t>(n), 1)}}.dump()};
    });
    RemoteSegmenter seg(server.url(), 2000);
    SyntheticSpec spec;
    spec.width = 40;
    spec.height = 30;
    const auto out = tool_ml_fire(make_synthetic_scene(spec), seg, ThresholdConfig{});
    CHECK(out.result.detected);
    CHECK(out.result.mask_pixels == 1200u);
  }

  TEST_CASE("segmenter label count mismatch fails the tool") {
    testing::MockServer server([](const json&) { return std::pair{200, json{{"labels", {1, 0}}}.dump()}; });
    RemoteSegmenter seg(server.url(), 2000);
    SyntheticSpec spec;
    spec.width = 16;
    spec.height = 16;
    CHECK_ERROR_CODE(tool_ml_fire(make_synthetic_scene(spec), seg, ThresholdConfig{}), ErrorCode::backend_failure);
  }

  TEST_CASE("settings select the remote backend") {
    AgentSettings s;
    s.reasoner.kind = "remote";
    s.reasoner.endpoint = "http://127.0.0.1:9";
    const auto kit = make_toolkit(s);
    CHECK(kit.reasoner->backend_id() == "remote:http://127.0.0.1:9");
    json j = s;
    j["reasoner"]["kind"] = "oracle";
    CHECK_ERROR_CODE(j.get<AgentSettings>(), ErrorCode::invalid_config);
  }
}
