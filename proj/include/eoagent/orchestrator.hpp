#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "eoagent/agents.hpp"
#include "eoagent/transport.hpp"
#include "json.hpp"

namespace eoa {

enum class WorkflowMode : std::uint8_t { baseline, routed };

std::string_view to_string(WorkflowMode mode) noexcept;
std::optional<WorkflowMode> parse_workflow_mode(std::string_view text) noexcept;

struct WorkflowConfig {
  std::vector<WorkflowMode> modes{WorkflowMode::baseline, WorkflowMode::routed};
  std::map<AgentRole, NodeDescriptor> nodes;  // all four roles
  int stage_timeout_ms = 60000;
  bool parallel_specialists = false;
  SimNetConfig simnet;
  AgentSettings agents;
  std::string dataset_root;  // empty: directory of the manifest

  // Throws Error{invalid_config}.
  void validate() const;
};

// Four in-process nodes named after their roles ("inproc://early_warning", ...).
std::map<AgentRole, NodeDescriptor> default_nodes();

void to_json(nlohmann::json& j, const WorkflowConfig& c);
void from_json(const nlohmann::json& j, WorkflowConfig& c);
WorkflowConfig load_workflow_config(const std::filesystem::path& path);

struct SceneJob {
  std::string scene_ref;
  std::string scene_id;
  std::optional<EventType> label;
  double area_km2 = 0.0;
};

// One job per manifest entry, in manifest order. Areas come from each scene's
// meta.json; an unreadable meta leaves the area at 0 and the run reports it.
std::vector<SceneJob> jobs_from_manifest(const DatasetManifest& manifest);

struct StageTimings {
  std::optional<double> early_warning_ms;
  std::optional<double> wildfire_ms;
  std::optional<double> flood_ms;
  std::optional<double> decision_ms;
  double total_ms = 0.0;
};

struct RunRecord {
  std::string scene_id;
  WorkflowMode mode = WorkflowMode::routed;
  std::optional<EventType> label;
  double scene_area_km2 = 0.0;
  StageTimings timings;
  std::vector<Specialist> specialists_invoked;
  std::optional<HypothesisReport> hypothesis;
  std::optional<FinalAlert> final;
  bool ok = true;
  std::string failed_stage;   // "early_warning" | "wildfire_specialist" | ... when !ok
  std::string error_code;     // kebab-case ErrorCode
  std::string error_message;
};

void to_json(nlohmann::json& j, const RunRecord& r);
void from_json(const nlohmann::json& j, RunRecord& r);

// Record JSON with every timing field removed ("timings" and any nested
// "elapsed_ms"), for comparing runs.
nlohmann::json canonical_json(const nlohmann::json& record);

void write_jsonl(std::ostream& out, const RunRecord& record);
std::vector<RunRecord> read_jsonl(const std::filesystem::path& path);

// Executes workflows against nodes reachable through a transport. Stage
// failures never throw; they are recorded in the RunRecord.
class Orchestrator {
 public:
  Orchestrator(WorkflowConfig config, std::shared_ptr<Transport> transport);

  RunRecord run_baseline(const SceneJob& job) const;
  RunRecord run_routed(const SceneJob& job) const;
  RunRecord run(const SceneJob& job, WorkflowMode mode) const;

  // Scene-major order: every mode of scene i before scene i+1. Each record is
  // appended to `jsonl` as soon as it completes.
  std::vector<RunRecord> run_dataset(const std::vector<SceneJob>& jobs, const std::vector<WorkflowMode>& modes,
                                     std::ostream* jsonl = nullptr) const;

  const WorkflowConfig& config() const noexcept { return config_; }

 private:
  WorkflowConfig config_;
  std::shared_ptr<Transport> transport_;
};

// Nodes, network and transport for a config. Roles whose endpoint is
// inproc:// get an AgentNode attached to a SimNetwork; http:// endpoints are
// expected to be served elsewhere. With serve_http, every node is instead
// started as a local HTTP server on an ephemeral port and `config.nodes`
// points at those servers.
struct Deployment {
  WorkflowConfig config;
  std::shared_ptr<SceneResolver> scenes;
  std::shared_ptr<SimNetwork> network;
  std::shared_ptr<Transport> transport;
  std::vector<std::shared_ptr<const AgentNode>> nodes;
  std::vector<std::unique_ptr<HttpNodeServer>> servers;

  Orchestrator orchestrator() const { return Orchestrator(config, transport); }
};

Deployment make_deployment(const WorkflowConfig& config, std::shared_ptr<SceneResolver> scenes,
                           bool serve_http = false);

}  // namespace eoa
