#include "eoagent/orchestrator.hpp"

#include <chrono>
#include <fstream>
#include <future>
#include <ostream>
#include <set>

#include "eoagent/error.hpp"

using nlohmann::json;

namespace eoa {

std::string_view to_string(WorkflowMode mode) noexcept {
  return mode == WorkflowMode::baseline ? "baseline" : "routed";
}

std::optional<WorkflowMode> parse_workflow_mode(std::string_view text) noexcept {
  if (text == "baseline") return WorkflowMode::baseline;
  if (text == "routed") return WorkflowMode::routed;
  return std::nullopt;
}

namespace {

constexpr AgentRole kRoles[] = {AgentRole::early_warning, AgentRole::wildfire_specialist,
                                AgentRole::flood_specialist, AgentRole::decision};

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

json optional_ms(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_ms(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}

}  // namespace

std::map<AgentRole, NodeDescriptor> default_nodes() {
  std::map<AgentRole, NodeDescriptor> nodes;
  for (AgentRole role : kRoles) {
    const std::string name(to_string(role));
    nodes[role] = NodeDescriptor{name, role, "inproc://" + name, default_capabilities(role)};
  }
  return nodes;
}

void WorkflowConfig::validate() const {
  if (modes.empty()) throw Error(ErrorCode::invalid_config, "at least one workflow mode is required");
  std::set<std::string> ids;
  for (AgentRole role : kRoles) {
    auto it = nodes.find(role);
    if (it == nodes.end()) {
      throw Error(ErrorCode::invalid_config, "no node configured for role " + std::string(to_string(role)));
    }
    if (it->second.role != role) {
      throw Error(ErrorCode::invalid_config, "node " + it->second.node_id + " is registered under the wrong role");
    }
    if (!ids.insert(it->second.node_id).second) {
      throw Error(ErrorCode::invalid_config, "duplicate node_id " + it->second.node_id);
    }
  }
  if (stage_timeout_ms <= 0) throw Error(ErrorCode::invalid_config, "stage_timeout_ms must be > 0");
  simnet.validate();
  agents.thresholds.validate();
}

void to_json(json& j, const WorkflowConfig& c) {
  json modes = json::array();
  for (auto m : c.modes) modes.push_back(std::string(to_string(m)));
  json nodes = json::array();
  for (const auto& [role, node] : c.nodes) nodes.push_back(node);
  j = json{{"modes", modes},
           {"nodes", nodes},
           {"stage_timeout_ms", c.stage_timeout_ms},
           {"parallel_specialists", c.parallel_specialists},
           {"simnet", c.simnet},
           {"agents", c.agents},
           {"dataset_root", c.dataset_root}};
}

void from_json(const json& j, WorkflowConfig& c) {
  if (!j.is_object()) throw Error(ErrorCode::invalid_config, "workflow config must be a JSON object");
  WorkflowConfig out;
  out.nodes = default_nodes();
  try {
    if (j.contains("modes")) {
      out.modes.clear();
      for (const auto& m : j["modes"]) {
        auto mode = parse_workflow_mode(m.get<std::string>());
        if (!mode) throw Error(ErrorCode::invalid_config, "unknown workflow mode " + m.dump());
        out.modes.push_back(*mode);
      }
    }
    if (j.contains("nodes")) {
      for (const auto& n : j["nodes"]) {
        auto node = n.get<NodeDescriptor>();
        out.nodes[node.role] = node;
      }
    }
    out.stage_timeout_ms = j.value("stage_timeout_ms", out.stage_timeout_ms);
    out.parallel_specialists = j.value("parallel_specialists", out.parallel_specialists);
    if (j.contains("simnet")) out.simnet = j["simnet"].get<SimNetConfig>();
    if (j.contains("agents")) out.agents = j["agents"].get<AgentSettings>();
    out.dataset_root = j.value("dataset_root", std::string{});
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_config, std::string("workflow config: ") + e.what());
  }
  out.validate();
  c = std::move(out);
}

WorkflowConfig load_workflow_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_failure, "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_config, path.string() + ": " + e.what());
  }
  return j.get<WorkflowConfig>();
}

std::vector<SceneJob> jobs_from_manifest(const DatasetManifest& manifest) {
  std::vector<SceneJob> jobs;
  jobs.reserve(manifest.entries.size());
  for (const auto& entry : manifest.entries) {
    SceneJob job{entry.scene_id, entry.scene_id, entry.label, 0.0};
    try {
      job.area_km2 = scene_area_km2(read_scene_meta(manifest.resolve(entry)));
    } catch (const Error&) {
    }
    jobs.push_back(std::move(job));
  }
  return jobs;
}

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

void to_json(json& j, const RunRecord& r) {
  json invoked = json::array();
  for (auto s : r.specialists_invoked) invoked.push_back(std::string(to_string(s)));
  j = json{{"scene_id", r.scene_id},
           {"mode", std::string(to_string(r.mode))},
           {"label", r.label ? json(std::string(to_string(*r.label))) : json(nullptr)},
           {"scene_area_km2", r.scene_area_km2},
           {"timings",
            {{"early_warning_ms", optional_ms(r.timings.early_warning_ms)},
             {"wildfire_ms", optional_ms(r.timings.wildfire_ms)},
             {"flood_ms", optional_ms(r.timings.flood_ms)},
             {"decision_ms", optional_ms(r.timings.decision_ms)},
             {"total_ms", r.timings.total_ms}}},
           {"specialists_invoked", invoked},
           {"hypothesis", r.hypothesis ? json(*r.hypothesis) : json(nullptr)},
           {"final", r.final ? json(*r.final) : json(nullptr)},
           {"ok", r.ok},
           {"failed_stage", r.ok ? json(nullptr) : json(r.failed_stage)},
           {"error", r.ok ? json(nullptr) : json{{"code", r.error_code}, {"message", r.error_message}}}};
}

void from_json(const json& j, RunRecord& r) {
  try {
    RunRecord out;
    out.scene_id = j.at("scene_id").get<std::string>();
    auto mode = parse_workflow_mode(j.at("mode").get<std::string>());
    if (!mode) throw Error(ErrorCode::schema_violation, "unknown mode " + j.at("mode").dump());
    out.mode = *mode;
    if (j.contains("label") && !j["label"].is_null()) {
      out.label = parse_event_type(j["label"].get<std::string>());
      if (!out.label) throw Error(ErrorCode::schema_violation, "unknown label " + j["label"].dump());
    }
    out.scene_area_km2 = j.value("scene_area_km2", 0.0);
    const json& t = j.at("timings");
    out.timings.early_warning_ms = read_ms(t, "early_warning_ms");
    out.timings.wildfire_ms = read_ms(t, "wildfire_ms");
    out.timings.flood_ms = read_ms(t, "flood_ms");
    out.timings.decision_ms = read_ms(t, "decision_ms");
    out.timings.total_ms = t.at("total_ms").get<double>();
    for (const auto& s : j.at("specialists_invoked")) {
      auto sp = parse_specialist(s.get<std::string>());
      if (!sp) throw Error(ErrorCode::schema_violation, "unknown specialist " + s.dump());
      out.specialists_invoked.push_back(*sp);
    }
    if (j.contains("hypothesis") && !j["hypothesis"].is_null()) out.hypothesis = j["hypothesis"].get<HypothesisReport>();
    if (j.contains("final") && !j["final"].is_null()) out.final = j["final"].get<FinalAlert>();
    out.ok = j.at("ok").get<bool>();
    if (!out.ok) {
      out.failed_stage = j.at("failed_stage").get<std::string>();
      out.error_code = j.at("error").at("code").get<std::string>();
      out.error_message = j.at("error").at("message").get<std::string>();
    }
    r = std::move(out);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::schema_violation, std::string("run record: ") + e.what());
  }
}

json canonical_json(const json& record) {
  if (record.is_object()) {
    json out = json::object();
    for (auto it = record.begin(); it != record.end(); ++it) {
      if (it.key() == "timings" || it.key() == "elapsed_ms") continue;
      out[it.key()] = canonical_json(it.value());
    }
    return out;
  }
  if (record.is_array()) {
    json out = json::array();
    for (const auto& v : record) out.push_back(canonical_json(v));
    return out;
  }
  return record;
}

void write_jsonl(std::ostream& out, const RunRecord& record) {
  out << json(record).dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::io_failure, "failed to append run record");
}

std::vector<RunRecord> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_failure, "cannot open " + path.string());
  std::vector<RunRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(json::parse(line).get<RunRecord>());
    } catch (const json::exception& e) {
      throw Error(ErrorCode::schema_violation, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return records;
}

// ---------------------------------------------------------------------------
// Orchestrator
// ---------------------------------------------------------------------------

Orchestrator::Orchestrator(WorkflowConfig config, std::shared_ptr<Transport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
  config_.validate();
  if (!transport_) throw Error(ErrorCode::invalid_config, "orchestrator needs a transport");
}

namespace {

struct StageFailure {
  std::string stage;
  ErrorCode code;
  std::string message;
};

// Calls a node and times the exchange; failures become StageFailure.
template <typename Report>
Report timed_call(Transport& transport, const NodeDescriptor& node, const NodeRequest& request, int timeout_ms,
                  std::optional<double>& elapsed) {
  const auto start = std::chrono::steady_clock::now();
  try {
    json body = call_node(transport, node, request, timeout_ms);
    Report report = body.get<Report>();
    elapsed = ms_since(start);
    return report;
  } catch (const Error& e) {
    elapsed = ms_since(start);
    throw StageFailure{std::string(to_string(node.role)), e.code(), e.what()};
  } catch (const std::exception& e) {
    elapsed = ms_since(start);
    throw StageFailure{std::string(to_string(node.role)), ErrorCode::internal, e.what()};
  }
}

}  // namespace

RunRecord Orchestrator::run(const SceneJob& job, WorkflowMode mode) const {
  RunRecord record;
  record.scene_id = job.scene_id.empty() ? job.scene_ref : job.scene_id;
  record.mode = mode;
  record.label = job.label;
  record.scene_area_km2 = job.area_km2;

  const json analyze_body{{"scene_ref", job.scene_ref}};
  const int timeout = config_.stage_timeout_ms;
  const auto start = std::chrono::steady_clock::now();
  try {
    std::vector<Specialist> specialists{Specialist::wildfire, Specialist::flood};
    if (mode == WorkflowMode::routed) {
      record.hypothesis = timed_call<HypothesisReport>(*transport_, config_.nodes.at(AgentRole::early_warning),
                                                       NodeRequest{"POST", "/analyze", analyze_body}, timeout,
                                                       record.timings.early_warning_ms);
      specialists = route(*record.hypothesis);
    }
    record.specialists_invoked = specialists;

    auto run_specialist = [&](Specialist s) {
      auto& slot = s == Specialist::wildfire ? record.timings.wildfire_ms : record.timings.flood_ms;
      return timed_call<SpecialistReport>(*transport_, config_.nodes.at(role_of(s)),
                                          NodeRequest{"POST", "/analyze", analyze_body}, timeout, slot);
    };

    std::vector<SpecialistReport> reports;
    if (config_.parallel_specialists && specialists.size() > 1) {
      std::vector<std::future<SpecialistReport>> pending;
      for (auto s : specialists) pending.push_back(std::async(std::launch::async, run_specialist, s));
      // Collect every result before reporting the first failure in stage order.
      std::optional<StageFailure> failure;
      for (auto& f : pending) {
        try {
          reports.push_back(f.get());
        } catch (const StageFailure& e) {
          if (!failure) failure = e;
        }
      }
      if (failure) throw *failure;
    } else {
      for (auto s : specialists) reports.push_back(run_specialist(s));
    }

    json decide_body{{"hypothesis", record.hypothesis ? json(*record.hypothesis) : json(nullptr)},
                     {"hypothesis_absent", !record.hypothesis.has_value()},
                     {"specialist_reports", reports}};
    record.final = timed_call<FinalAlert>(*transport_, config_.nodes.at(AgentRole::decision),
                                          NodeRequest{"POST", "/decide", std::move(decide_body)}, timeout,
                                          record.timings.decision_ms);
  } catch (const StageFailure& f) {
    record.ok = false;
    record.failed_stage = f.stage;
    record.error_code = std::string(to_string(f.code));
    record.error_message = f.message;
    record.final.reset();
  }
  record.timings.total_ms = ms_since(start);
  return record;
}

RunRecord Orchestrator::run_baseline(const SceneJob& job) const { return run(job, WorkflowMode::baseline); }

RunRecord Orchestrator::run_routed(const SceneJob& job) const { return run(job, WorkflowMode::routed); }

std::vector<RunRecord> Orchestrator::run_dataset(const std::vector<SceneJob>& jobs,
                                                 const std::vector<WorkflowMode>& modes, std::ostream* jsonl) const {
  std::vector<RunRecord> records;
  records.reserve(jobs.size() * modes.size());
  for (const auto& job : jobs) {
    for (auto mode : modes) {
      records.push_back(run(job, mode));
      if (jsonl) write_jsonl(*jsonl, records.back());
    }
  }
  return records;
}

// ---------------------------------------------------------------------------
// Deployment
// ---------------------------------------------------------------------------

Deployment make_deployment(const WorkflowConfig& config, std::shared_ptr<SceneResolver> scenes, bool serve_http) {
  config.validate();
  if (!scenes) throw Error(ErrorCode::invalid_config, "deployment needs a scene resolver");
  Deployment d;
  d.config = config;
  d.scenes = std::move(scenes);
  d.network = std::make_shared<SimNetwork>(config.simnet);
  const AgentToolkit toolkit = make_toolkit(config.agents);

  for (auto& [role, descriptor] : d.config.nodes) {
    const bool local = descriptor.endpoint.rfind("inproc://", 0) == 0;
    if (!local && !serve_http) continue;
    auto node = std::make_shared<const AgentNode>(descriptor, toolkit, d.scenes);
    d.nodes.push_back(node);
    if (serve_http) {
      d.servers.push_back(std::make_unique<HttpNodeServer>(node, "127.0.0.1", 0));
      descriptor.endpoint = d.servers.back()->url();
    } else {
      d.network->attach(node);
    }
  }
  d.transport = std::make_shared<RoutingTransport>(d.network, std::make_shared<HttpTransport>());
  return d;
}

}  // namespace eoa
