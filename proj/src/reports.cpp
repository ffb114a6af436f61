#include <cmath>
#include <cstdio>

#include "eoagent/agents.hpp"
#include "eoagent/error.hpp"

using nlohmann::json;

namespace eoa {

std::string_view to_string(AgentRole role) noexcept {
  switch (role) {
    case AgentRole::early_warning: return "early_warning";
    case AgentRole::wildfire_specialist: return "wildfire_specialist";
    case AgentRole::flood_specialist: return "flood_specialist";
    case AgentRole::decision: return "decision";
  }
  return "?";
}

std::string_view to_string(Specialist specialist) noexcept {
  return specialist == Specialist::wildfire ? "wildfire" : "flood";
}

std::string_view to_string(Classification c) noexcept {
  switch (c) {
    case Classification::event_confirmed: return "event_confirmed";
    case Classification::past_event: return "past_event";
    case Classification::no_event: return "no_event";
  }
  return "?";
}

std::string_view to_string(Decision d) noexcept { return d == Decision::alert ? "alert" : "no_alert"; }

std::optional<AgentRole> parse_agent_role(std::string_view text) noexcept {
  for (auto r : {AgentRole::early_warning, AgentRole::wildfire_specialist, AgentRole::flood_specialist,
                 AgentRole::decision}) {
    if (to_string(r) == text) return r;
  }
  return std::nullopt;
}

std::optional<Specialist> parse_specialist(std::string_view text) noexcept {
  if (text == "wildfire") return Specialist::wildfire;
  if (text == "flood") return Specialist::flood;
  return std::nullopt;
}

std::optional<Classification> parse_classification(std::string_view text) noexcept {
  for (auto c : {Classification::event_confirmed, Classification::past_event, Classification::no_event}) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

std::optional<Decision> parse_decision(std::string_view text) noexcept {
  if (text == "alert") return Decision::alert;
  if (text == "no_alert") return Decision::no_alert;
  return std::nullopt;
}

std::string format_km2(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  while (s.size() > 1 && s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
  return s;
}

namespace {

[[noreturn]] void schema_error(const std::string& what) {
  throw Error(ErrorCode::schema_violation, what);
}

template <typename Fn>
auto guarded(const char* what, Fn fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    schema_error(std::string(what) + ": " + e.what());
  }
}

void check_version(const json& j, const char* what) {
  if (!j.is_object()) schema_error(std::string(what) + " must be a JSON object");
  if (!j.contains("schema_version") || !j["schema_version"].is_string()) {
    schema_error(std::string(what) + " lacks schema_version");
  }
  const auto v = j["schema_version"].get<std::string>();
  if (v.empty() || v.substr(0, v.find('.')) != "1") {
    schema_error(std::string(what) + " has unsupported schema_version " + v);
  }
}

EventType event_field(const json& j, const char* key) {
  auto e = parse_event_type(j.at(key).get<std::string>());
  if (!e) schema_error(std::string(key) + " out of enum: " + j.at(key).dump());
  return *e;
}

const std::vector<ToolName>& expected_tools(Specialist s) {
  static const std::vector<ToolName> wildfire = {ToolName::ml_fire, ToolName::index_fire,
                                                 ToolName::burned_area};
  static const std::vector<ToolName> flood = {ToolName::ml_flood};
  return s == Specialist::wildfire ? wildfire : flood;
}

}  // namespace

void to_json(json& j, const HypothesisReport& r) {
  j = json{{"schema_version", kMessageSchemaVersion},
           {"type", "hypothesis"},
           {"scene_id", r.scene_id},
           {"predicted_event", std::string(to_string(r.predicted_event))},
           {"reasoning", r.reasoning},
           {"elapsed_ms", r.elapsed_ms},
           {"degraded", r.degraded}};
}

void from_json(const json& j, HypothesisReport& r) {
  check_version(j, "hypothesis report");
  r = guarded("hypothesis report", [&] {
    HypothesisReport out;
    out.scene_id = j.at("scene_id").get<std::string>();
    out.predicted_event = event_field(j, "predicted_event");
    out.reasoning = j.at("reasoning").get<std::string>();
    out.elapsed_ms = j.value("elapsed_ms", 0.0);
    out.degraded = j.value("degraded", false);
    return out;
  });
  if (r.reasoning.size() > kMaxHypothesisReasoning) schema_error("hypothesis reasoning exceeds 500 chars");
  if (r.predicted_event != EventType::none && r.reasoning.empty()) {
    schema_error("hypothesis reasoning must be non-empty for a predicted event");
  }
}

void to_json(json& j, const SpecialistReport& r) {
  j = json{{"schema_version", kMessageSchemaVersion},
           {"type", "specialist_report"},
           {"scene_id", r.scene_id},
           {"specialist", std::string(to_string(r.specialist))},
           {"tool_results", r.tool_results},
           {"classification", std::string(to_string(r.classification))},
           {"reasoning", r.reasoning},
           {"elapsed_ms", r.elapsed_ms}};
}

void from_json(const json& j, SpecialistReport& r) {
  check_version(j, "specialist report");
  r = guarded("specialist report", [&] {
    SpecialistReport out;
    out.scene_id = j.at("scene_id").get<std::string>();
    auto s = parse_specialist(j.at("specialist").get<std::string>());
    if (!s) schema_error("specialist out of enum: " + j.at("specialist").dump());
    out.specialist = *s;
    out.tool_results = j.at("tool_results").get<std::vector<ToolResult>>();
    auto c = parse_classification(j.at("classification").get<std::string>());
    if (!c) schema_error("classification out of enum: " + j.at("classification").dump());
    out.classification = *c;
    out.reasoning = j.at("reasoning").get<std::string>();
    out.elapsed_ms = j.value("elapsed_ms", 0.0);
    return out;
  });
  const auto& expected = expected_tools(r.specialist);
  if (r.tool_results.size() != expected.size()) schema_error("specialist report has the wrong tool count");
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (r.tool_results[i].tool != expected[i]) schema_error("specialist report tools out of order");
  }
}

void to_json(json& j, const FinalAlert& a) {
  j = json{{"schema_version", kMessageSchemaVersion},
           {"type", "final_alert"},
           {"scene_id", a.scene_id},
           {"decision", std::string(to_string(a.decision))},
           {"event_type", std::string(to_string(a.event_type))},
           {"confidence", a.confidence},
           {"reasoning", a.reasoning},
           {"informational", a.informational},
           {"rules", a.rules}};
  json provenance;
  provenance["hypothesis"] = a.hypothesis ? json(*a.hypothesis) : json(nullptr);
  provenance["hypothesis_absent"] = !a.hypothesis.has_value();
  provenance["specialist_reports"] = a.specialist_reports;
  j["provenance"] = std::move(provenance);
}

void from_json(const json& j, FinalAlert& a) {
  check_version(j, "final alert");
  a = guarded("final alert", [&] {
    FinalAlert out;
    out.scene_id = j.at("scene_id").get<std::string>();
    auto d = parse_decision(j.at("decision").get<std::string>());
    if (!d) schema_error("decision out of enum: " + j.at("decision").dump());
    out.decision = *d;
    out.event_type = event_field(j, "event_type");
    out.confidence = j.at("confidence").get<double>();
    out.reasoning = j.at("reasoning").get<std::string>();
    out.informational = j.value("informational", false);
    out.rules = j.value("rules", std::vector<std::string>{});
    const auto& p = j.at("provenance");
    if (!p.at("hypothesis").is_null()) out.hypothesis = p.at("hypothesis").get<HypothesisReport>();
    out.specialist_reports = p.at("specialist_reports").get<std::vector<SpecialistReport>>();
    return out;
  });
  if (a.decision == Decision::alert && a.event_type == EventType::none) {
    schema_error("an alert must name an event type");
  }
  if (!(a.confidence >= 0.0 && a.confidence <= 1.0)) schema_error("confidence outside [0, 1]");
}

}  // namespace eoa
