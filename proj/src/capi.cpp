#include "eoagent/eoagent.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include "eoagent/bench.hpp"
#include "eoagent/datasets.hpp"
#include "eoagent/error.hpp"
#include "eoagent/orchestrator.hpp"
#include "eoagent/transport.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

struct eoa_scene {
  std::shared_ptr<const eoa::SceneBundle> bundle;
};

struct eoa_workflow {
  std::unique_ptr<eoa::Deployment> deployment;
  std::vector<eoa::SceneJob> jobs;
};

struct eoa_node_server {
  std::unique_ptr<eoa::HttpNodeServer> server;
};

static_assert(EOA_ERR_INTERNAL == static_cast<int>(eoa::ErrorCode::internal) + 1,
              "eoa_status must mirror ErrorCode");

namespace {

thread_local std::string last_error;

eoa_status fail(eoa_status status, const std::string& message) {
  last_error = message;
  return status;
}

eoa_status status_of(eoa::ErrorCode code) { return static_cast<eoa_status>(static_cast<int>(code) + 1); }

// Runs fn, translating exceptions into a status and the thread's last error.
template <typename Fn>
eoa_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return EOA_OK;
  } catch (const eoa::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const json::exception& e) {
    return fail(EOA_ERR_SCHEMA_VIOLATION, e.what());
  } catch (const std::bad_alloc&) {
    return fail(EOA_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(EOA_ERR_INTERNAL, e.what());
  }
}

void require(const void* p, const char* what) {
  if (!p) throw eoa::Error(eoa::ErrorCode::invalid_argument, std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void put(char** out, const std::string& s) {
  if (out) *out = dup_string(s);
}

json parse_json(const char* text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw eoa::Error(eoa::ErrorCode::invalid_config, std::string(what) + ": " + e.what());
  }
}

eoa::AgentSettings settings_from(const char* settings_json) {
  if (!settings_json) return {};
  return parse_json(settings_json, "settings").get<eoa::AgentSettings>();
}

std::optional<eoa::DatasetManifest> manifest_from(const char* path) {
  if (!path) return std::nullopt;
  return eoa::load_manifest(path);
}

}  // namespace

extern "C" {

const char* eoa_version(void) { return "1.0.0"; }

const char* eoa_status_name(eoa_status status) {
  if (status == EOA_OK) return "ok";
  if (status < EOA_OK || status > EOA_ERR_INTERNAL) return "unknown";
  // to_string returns views of string literals, so data() is NUL-terminated.
  return eoa::to_string(static_cast<eoa::ErrorCode>(static_cast<int>(status) - 1)).data();
}

const char* eoa_last_error(void) { return last_error.c_str(); }

void eoa_string_free(char* s) { std::free(s); }

eoa_status eoa_scene_load(const char* dir, eoa_scene** out) {
  return guarded([&] {
    require(dir, "dir");
    require(out, "out");
    auto scene = std::make_unique<eoa_scene>();
    scene->bundle = std::make_shared<const eoa::SceneBundle>(eoa::load_scene(dir));
    *out = scene.release();
  });
}

eoa_status eoa_scene_synthesize(const char* spec_json, eoa_scene** out) {
  return guarded([&] {
    require(spec_json, "spec_json");
    require(out, "out");
    const auto spec = parse_json(spec_json, "synthetic spec").get<eoa::SyntheticSpec>();
    auto scene = std::make_unique<eoa_scene>();
    scene->bundle = std::make_shared<const eoa::SceneBundle>(eoa::make_synthetic_scene(spec));
    *out = scene.release();
  });
}

eoa_status eoa_scene_save(const eoa_scene* scene, const char* dir) {
  return guarded([&] {
    require(scene, "scene");
    require(dir, "dir");
    eoa::save_scene(*scene->bundle, dir);
  });
}

eoa_status eoa_scene_info(const eoa_scene* scene, char** out_json) {
  return guarded([&] {
    require(scene, "scene");
    require(out_json, "out_json");
    const auto& b = *scene->bundle;
    json bands = json::array();
    for (const auto& [id, raster] : b.bands) bands.push_back(std::string(eoa::band_name(id)));
    const json info{{"scene_id", b.scene_id},
                    {"width", b.width},
                    {"height", b.height},
                    {"pixel_size_m", b.pixel_size_m},
                    {"area_km2", eoa::scene_area_km2(b)},
                    {"label", b.label ? json(std::string(eoa::to_string(*b.label))) : json(nullptr)},
                    {"bands", bands}};
    put(out_json, info.dump());
  });
}

void eoa_scene_free(eoa_scene* scene) { delete scene; }

eoa_status eoa_run_tool(const eoa_scene* scene, const char* tool, const char* settings_json, char** out_json) {
  return guarded([&] {
    require(scene, "scene");
    require(tool, "tool");
    require(out_json, "out_json");
    const auto name = eoa::parse_tool_name(tool);
    if (!name) throw eoa::Error(eoa::ErrorCode::invalid_argument, std::string("unknown tool '") + tool + "'");
    const auto kit = eoa::make_toolkit(settings_from(settings_json));
    const auto& cfg = kit.settings.thresholds;
    const auto& s = *scene->bundle;
    eoa::ToolOutput output;
    switch (*name) {
      case eoa::ToolName::ml_fire: output = eoa::tool_ml_fire(s, *kit.fire_segmenter, cfg); break;
      case eoa::ToolName::index_fire: output = eoa::tool_index_fire(s, cfg); break;
      case eoa::ToolName::burned_area: output = eoa::tool_burned_area(s, cfg); break;
      case eoa::ToolName::ml_flood: output = eoa::tool_ml_flood(s, *kit.flood_segmenter, cfg); break;
    }
    put(out_json, json(output.result).dump());
  });
}

eoa_status eoa_agent_analyze(const eoa_scene* scene, const char* role, const char* settings_json, char** out_json) {
  return guarded([&] {
    require(scene, "scene");
    require(role, "role");
    require(out_json, "out_json");
    const auto r = eoa::parse_agent_role(role);
    if (!r || *r == eoa::AgentRole::decision) {
      throw eoa::Error(eoa::ErrorCode::invalid_argument, std::string("role '") + role + "' does not analyze scenes");
    }
    const auto kit = eoa::make_toolkit(settings_from(settings_json));
    const auto& s = *scene->bundle;
    json report;
    switch (*r) {
      case eoa::AgentRole::early_warning: report = eoa::early_warning_assess(s, kit); break;
      case eoa::AgentRole::wildfire_specialist: report = eoa::wildfire_specialist_analyze(s, kit); break;
      case eoa::AgentRole::flood_specialist: report = eoa::flood_specialist_analyze(s, kit); break;
      case eoa::AgentRole::decision: break;
    }
    put(out_json, report.dump());
  });
}

eoa_status eoa_decision_fuse(const char* request_json, const char* settings_json, char** out_json) {
  return guarded([&] {
    require(request_json, "request_json");
    require(out_json, "out_json");
    const auto kit = eoa::make_toolkit(settings_from(settings_json));
    eoa::AgentNode node(eoa::NodeDescriptor{"capi-decision", eoa::AgentRole::decision, "inproc://capi-decision", {}},
                        kit, nullptr);
    const auto response = node.handle(eoa::NodeRequest{"POST", "/decide", parse_json(request_json, "request")});
    if (response.status != 200) {
      const auto code = response.body.value("code", std::string("schema-violation"));
      throw eoa::Error(code == "schema-violation" ? eoa::ErrorCode::schema_violation : eoa::ErrorCode::internal,
                       response.body.value("message", response.body.dump()));
    }
    put(out_json, response.body.dump());
  });
}

eoa_status eoa_workflow_create(const char* config_json, const char* manifest_path, const char* dataset_root,
                               eoa_workflow** out) {
  return guarded([&] {
    require(manifest_path, "manifest_path");
    require(out, "out");
    eoa::WorkflowConfig cfg;
    cfg.nodes = eoa::default_nodes();
    if (config_json) cfg = parse_json(config_json, "workflow config").get<eoa::WorkflowConfig>();
    auto manifest = eoa::load_manifest(manifest_path);
    fs::path root = dataset_root ? fs::path(dataset_root)
                                 : (!cfg.dataset_root.empty() ? fs::path(cfg.dataset_root) : manifest.base_dir);
    if (root.empty()) root = ".";
    auto workflow = std::make_unique<eoa_workflow>();
    workflow->jobs = eoa::jobs_from_manifest(manifest);
    auto scenes = std::make_shared<eoa::SceneResolver>(root, std::move(manifest));
    workflow->deployment = std::make_unique<eoa::Deployment>(eoa::make_deployment(cfg, scenes));
    *out = workflow.release();
  });
}

eoa_status eoa_workflow_run_dataset(eoa_workflow* workflow, const char* modes, const char* jsonl_path,
                                    int* out_records, int* out_failures) {
  return guarded([&] {
    require(workflow, "workflow");
    require(jsonl_path, "jsonl_path");
    std::vector<eoa::WorkflowMode> selected = workflow->deployment->config.modes;
    if (modes) {
      selected.clear();
      std::stringstream ss(modes);
      std::string item;
      while (std::getline(ss, item, ',')) {
        const auto m = eoa::parse_workflow_mode(item);
        if (!m) throw eoa::Error(eoa::ErrorCode::invalid_argument, "unknown mode '" + item + "'");
        selected.push_back(*m);
      }
      if (selected.empty()) throw eoa::Error(eoa::ErrorCode::invalid_argument, "no modes selected");
    }
    const fs::path path(jsonl_path);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream jsonl(path, std::ios::binary | std::ios::trunc);
    if (!jsonl) throw eoa::Error(eoa::ErrorCode::io_failure, "cannot open " + path.string());
    const auto records = workflow->deployment->orchestrator().run_dataset(workflow->jobs, selected, &jsonl);
    int failures = 0;
    for (const auto& r : records) failures += r.ok ? 0 : 1;
    if (out_records) *out_records = static_cast<int>(records.size());
    if (out_failures) *out_failures = failures;
  });
}

void eoa_workflow_free(eoa_workflow* workflow) { delete workflow; }

eoa_status eoa_node_server_start(const char* node_json, const char* host, int port, const char* settings_json,
                                 const char* dataset_root, const char* manifest_path, eoa_node_server** out) {
  return guarded([&] {
    require(node_json, "node_json");
    require(out, "out");
    json node = parse_json(node_json, "node descriptor");
    if (!node.contains("endpoint")) node["endpoint"] = "http://" + std::string(host ? host : "127.0.0.1");
    const auto descriptor = node.get<eoa::NodeDescriptor>();
    auto manifest = manifest_from(manifest_path);
    fs::path root = dataset_root ? fs::path(dataset_root) : (manifest ? manifest->base_dir : fs::path("."));
    auto scenes = std::make_shared<eoa::SceneResolver>(root, std::move(manifest));
    auto agent = std::make_shared<const eoa::AgentNode>(descriptor, eoa::make_toolkit(settings_from(settings_json)),
                                                        scenes);
    auto server = std::make_unique<eoa_node_server>();
    server->server = std::make_unique<eoa::HttpNodeServer>(agent, host ? host : "127.0.0.1", port);
    *out = server.release();
  });
}

int eoa_node_server_port(const eoa_node_server* server) { return server ? server->server->port() : -1; }

eoa_status eoa_node_server_wait(eoa_node_server* server) {
  return guarded([&] {
    require(server, "server");
    server->server->wait();
  });
}

eoa_status eoa_node_server_stop(eoa_node_server* server) {
  return guarded([&] {
    require(server, "server");
    server->server->stop();
  });
}

void eoa_node_server_free(eoa_node_server* server) { delete server; }

eoa_status eoa_bench_report(const char* records_path, const char* method, const char* out_dir, char** out_json,
                            char** out_text) {
  return guarded([&] {
    require(records_path, "records_path");
    auto m = eoa::CorrelationMethod::pearson;
    if (method) {
      const auto parsed = eoa::parse_correlation_method(method);
      if (!parsed) throw eoa::Error(eoa::ErrorCode::invalid_argument, std::string("unknown method '") + method + "'");
      m = *parsed;
    }
    const auto report = eoa::build_report(eoa::read_jsonl(records_path), m);
    if (out_dir) eoa::emit_report(report, out_dir);
    put(out_json, json(report).dump());
    put(out_text, eoa::format_table(report));
  });
}

eoa_status eoa_synth_dataset(const char* preset, int count, unsigned long long seed, const char* out_dir,
                             char** out_json) {
  return guarded([&] {
    require(preset, "preset");
    require(out_dir, "out_dir");
    if (count < 0) throw eoa::Error(eoa::ErrorCode::invalid_argument, "count must be >= 0");
    const std::string p(preset);
    std::vector<eoa::SyntheticSpec> specs;
    if (p == "mixed") {
      specs = eoa::mixed_dataset_specs(static_cast<std::size_t>(count), seed);
    } else if (p == "two-regime") {
      const auto n = static_cast<std::size_t>(count);
      specs = eoa::two_regime_dataset_specs(n / 2, n - n / 2, seed);
    } else if (p == "exemplars") {
      specs = {eoa::active_wildfire_exemplar(seed + 1), eoa::flood_exemplar(seed + 2),
               eoa::past_burn_exemplar(seed + 3)};
    } else {
      throw eoa::Error(eoa::ErrorCode::invalid_argument, "unknown preset '" + p + "'");
    }
    const auto manifest = eoa::write_synthetic_dataset(specs, out_dir);
    json entries = json::array();
    for (const auto& e : manifest.entries) {
      entries.push_back({{"scene_id", e.scene_id},
                         {"path", e.path},
                         {"label", e.label ? json(std::string(eoa::to_string(*e.label))) : json(nullptr)}});
    }
    put(out_json, json{{"version", manifest.version}, {"entries", entries}}.dump());
  });
}

}  // extern "C"
