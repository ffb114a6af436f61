#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <thread>

#include "eoagent/agents.hpp"
#include "eoagent/error.hpp"

using nlohmann::json;

namespace eoa {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void inject_delay(double ms) {
  if (ms > 0.0) std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(ms));
}

// Cuts at a UTF-8 character boundary so the result still serializes.
std::string truncate_utf8(std::string text, std::size_t max_bytes) {
  if (text.size() <= max_bytes) return text;
  std::size_t cut = max_bytes;
  while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) --cut;
  text.resize(cut);
  return text;
}

std::string percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * fraction);
  return buf;
}

std::string label_key(AgentRole role) {
  switch (role) {
    case AgentRole::early_warning: return "predicted_event";
    case AgentRole::wildfire_specialist:
    case AgentRole::flood_specialist: return "classification";
    case AgentRole::decision: return "decision";
  }
  return "";
}

}  // namespace

// ---------------------------------------------------------------------------
// Reasoner plumbing
// ---------------------------------------------------------------------------

void validate_reasoner_output(AgentRole role, const ReasonerOutput& out) {
  const std::string key = label_key(role);
  if (!out.labels.is_object() || !out.labels.contains(key) || !out.labels[key].is_string()) {
    throw Error(ErrorCode::schema_violation, "reasoner output lacks label '" + key + "'");
  }
  const auto value = out.labels[key].get<std::string>();
  bool ok = false;
  switch (role) {
    case AgentRole::early_warning: ok = parse_event_type(value).has_value(); break;
    case AgentRole::wildfire_specialist:
    case AgentRole::flood_specialist: ok = parse_classification(value).has_value(); break;
    case AgentRole::decision: ok = parse_decision(value).has_value(); break;
  }
  if (!ok) {
    throw Error(ErrorCode::schema_violation,
                "label " + key + "='" + value + "' is not valid for role " + std::string(to_string(role)));
  }
}

ReasonerOutput call_reasoner(const std::shared_ptr<const ReasonerBackend>& backend, AgentRole role,
                             const json& evidence) {
  if (!backend) throw Error(ErrorCode::backend_failure, "no reasoner backend configured");
  try {
    ReasonerOutput out;
    const int deadline = backend->timeout_ms();
    if (deadline <= 0) {
      out = backend->reason(role, evidence);
    } else {
      // The worker owns copies of everything it touches, so an abandoned call
      // can finish in the background without dangling references.
      auto task = std::make_shared<std::packaged_task<ReasonerOutput()>>(
          [backend, role, evidence] { return backend->reason(role, evidence); });
      auto result = task->get_future();
      std::thread([task] { (*task)(); }).detach();
      if (result.wait_for(std::chrono::milliseconds(deadline)) != std::future_status::ready) {
        throw Error(ErrorCode::timeout, "no answer within " + std::to_string(deadline) + " ms");
      }
      out = result.get();
    }
    validate_reasoner_output(role, out);
    return out;
  } catch (const Error& e) {
    throw Error(ErrorCode::backend_failure, backend->backend_id() + ": " +
                                                std::string(to_string(e.code())) + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::backend_failure, backend->backend_id() + ": " + e.what());
  }
}

namespace {

std::string tool_line(const ToolResult& r) {
  std::string name;
  switch (r.tool) {
    case ToolName::ml_fire: name = "ML fire detector"; break;
    case ToolName::index_fire: name = "SWIR index-based active fire"; break;
    case ToolName::burned_area: name = "Burned area estimate"; break;
    case ToolName::ml_flood: name = "Flood segmentation"; break;
  }
  if (r.error) return name + ": unavailable (" + *r.error + ")";
  switch (r.tool) {
    case ToolName::ml_fire:
    case ToolName::index_fire:
      return name + ": " + format_km2(r.metric("active_fire_area_km2")) + " km²";
    case ToolName::burned_area: {
      const auto hotspots = static_cast<long long>(std::llround(r.metric("hotspot_count")));
      return name + ": " + std::to_string(hotspots) + (hotspots == 1 ? " hotspot, " : " hotspots, ") +
             format_km2(r.metric("burned_area_km2")) + " km²";
    }
    case ToolName::ml_flood:
      return name + ": " + format_km2(r.metric("flood_area_km2")) + " km² (" +
             percent(r.metric("flood_fraction")) + " of the scene)";
  }
  return name;
}

std::string specialist_prose(Specialist specialist, Classification c, const std::vector<ToolResult>& tools) {
  std::string header;
  if (specialist == Specialist::wildfire) {
    switch (c) {
      case Classification::event_confirmed: header = "Tools confirm an active fire:"; break;
      case Classification::past_event:
        header = "No active fire detected; the burned area points to a past event:";
        break;
      case Classification::no_event: header = "All tools report no fire:"; break;
    }
  } else {
    header = c == Classification::event_confirmed ? "The flood tool confirms a flood:"
                                                  : "The flood tool reports no flooding:";
  }
  std::string text = header;
  for (const auto& r : tools) text += "\n- " + tool_line(r);
  return text;
}

// Largest area quoted by a report for its own event.
std::string area_phrase(const SpecialistReport& r) {
  if (r.specialist == Specialist::flood) {
    double flood = 0.0;
    for (const auto& t : r.tool_results) flood = std::max(flood, t.metric("flood_area_km2"));
    return "a flood with an area of " + format_km2(flood) + " km²";
  }
  double active = 0.0;
  double burned = 0.0;
  for (const auto& t : r.tool_results) {
    active = std::max(active, t.metric("active_fire_area_km2"));
    burned = std::max(burned, t.metric("burned_area_km2"));
  }
  return "a wildfire with active fire area of " + format_km2(active) +
         " km², and an estimated burned area of " + format_km2(burned) + " km²";
}

double burned_area_of(const SpecialistReport& r) {
  double burned = 0.0;
  for (const auto& t : r.tool_results) burned = std::max(burned, t.metric("burned_area_km2"));
  return burned;
}

std::string decision_prose(const json& evidence) {
  const auto decision = parse_decision(evidence.at("decision").get<std::string>()).value();
  const auto event = parse_event_type(evidence.at("event_type").get<std::string>()).value();
  const auto rules = evidence.at("rules").get<std::vector<std::string>>();
  const auto reports = evidence.at("specialist_reports").get<std::vector<SpecialistReport>>();
  std::optional<HypothesisReport> hypothesis;
  if (!evidence.at("hypothesis").is_null()) hypothesis = evidence.at("hypothesis").get<HypothesisReport>();
  auto has_rule = [&](std::string_view r) { return std::find(rules.begin(), rules.end(), r) != rules.end(); };

  if (decision == Decision::alert) {
    if (has_rule("past_event_promoted")) {
      for (const auto& r : reports) {
        if (r.classification == Classification::past_event) {
          return "Informational: specialist reports an estimated burned area of " +
                 format_km2(burned_area_of(r)) + " km² from a past wildfire; no new active fires were identified.";
        }
      }
    }
    std::string text;
    for (const auto& r : reports) {
      if (r.classification == Classification::event_confirmed && event_of(r.specialist) == event) {
        text = "Specialist reports confirm the detection of " + area_phrase(r) + ".";
        break;
      }
    }
    if (has_rule("multi_event_tiebreak")) {
      text += " Both specialists confirmed an event; the larger affected area decides the alert type.";
    }
    if (hypothesis) {
      if (hypothesis->predicted_event == event) {
        text += " The reports align with the early-warning hypothesis.";
      } else {
        text += " The early-warning hypothesis (" + std::string(to_string(hypothesis->predicted_event)) +
                ") did not anticipate this event.";
      }
    }
    return text;
  }

  if (has_rule("past_event")) {
    for (const auto& r : reports) {
      if (r.classification == Classification::past_event) {
        return "Specialist reports an estimated burned area of " + format_km2(burned_area_of(r)) +
               " km², suggesting past wildfires, but no new active fires were identified.";
      }
    }
  }
  if (has_rule("refutation") && hypothesis) {
    return "Specialist reports found no evidence of a " +
           std::string(to_string(hypothesis->predicted_event)) +
           ", with all tools indicating 0.0 km² of affected area. The Early Warning prediction did not "
           "align with the tool outputs and the alert is rejected.";
  }
  if (has_rule("no_evidence") && hypothesis) {
    return "The early-warning stage suspected a " + std::string(to_string(hypothesis->predicted_event)) +
           " but no specialist evidence was available; no alert is issued.";
  }
  if (reports.empty()) {
    return "The early-warning stage found no hazard indicators; no specialist analysis was required.";
  }
  return "No specialist reported a hazard in this scene.";
}

}  // namespace

ReasonerOutput RuleReasoner::reason(AgentRole role, const json& evidence) const {
  ReasonerOutput out;
  switch (role) {
    case AgentRole::early_warning: {
      const double fire = evidence.at("fire_fraction").get<double>();
      const double water = evidence.at("water_fraction").get<double>();
      if (fire > rule_.fire_fraction_min) {
        out.labels["predicted_event"] = "wildfire";
        out.reasoning = "Hot SWIR signature over " + percent(fire) +
                        " of the scene suggests an active wildfire.";
      } else if (water > rule_.water_fraction_clim) {
        out.labels["predicted_event"] = "flood";
        out.reasoning = "Open water covers " + percent(water) + " of the scene, above the usual " +
                        percent(rule_.water_fraction_clim) + ", suggesting flooding.";
      } else {
        out.labels["predicted_event"] = "none";
        out.reasoning = "No hot SWIR or anomalous water signature; the scene appears nominal.";
      }
      return out;
    }
    case AgentRole::wildfire_specialist:
    case AgentRole::flood_specialist: {
      const auto specialist = parse_specialist(evidence.at("specialist").get<std::string>()).value();
      const auto c = parse_classification(evidence.at("classification").get<std::string>()).value();
      const auto tools = evidence.at("tool_results").get<std::vector<ToolResult>>();
      out.labels["classification"] = std::string(to_string(c));
      out.reasoning = specialist_prose(specialist, c, tools);
      return out;
    }
    case AgentRole::decision:
      out.labels["decision"] = evidence.at("decision");
      out.reasoning = decision_prose(evidence);
      return out;
  }
  throw Error(ErrorCode::internal, "unhandled role");
}

// ---------------------------------------------------------------------------
// Settings
// ---------------------------------------------------------------------------

bool CostModel::empty() const {
  auto zero = [](const StageCost& c) { return c.fixed_ms == 0.0 && c.per_tile_ms == 0.0; };
  return zero(early_warning) && zero(decision) &&
         std::all_of(tools.begin(), tools.end(), [&](const auto& kv) { return zero(kv.second); });
}

double CostModel::delay_ms(const StageCost& cost, const SceneBundle* scene, const ThresholdConfig& cfg) const {
  double ms = cost.fixed_ms;
  if (scene && cost.per_tile_ms > 0.0) {
    ms += cost.per_tile_ms *
          static_cast<double>(tile_segment(scene->width, scene->height, cfg.tile_size, cfg.tile_stride).size());
  }
  return ms;
}

namespace {

json stage_cost_json(const StageCost& c) { return json{{"fixed_ms", c.fixed_ms}, {"per_tile_ms", c.per_tile_ms}}; }

StageCost stage_cost_from(const json& j) {
  StageCost c;
  c.fixed_ms = j.value("fixed_ms", 0.0);
  c.per_tile_ms = j.value("per_tile_ms", 0.0);
  if (c.fixed_ms < 0.0 || c.per_tile_ms < 0.0) throw Error(ErrorCode::invalid_config, "costs must be >= 0");
  return c;
}

json backend_spec_json(const BackendSpec& b) {
  return json{{"kind", b.kind}, {"endpoint", b.endpoint}, {"timeout_ms", b.timeout_ms}};
}

BackendSpec backend_spec_from(const json& j, const std::string& default_kind) {
  BackendSpec b;
  b.kind = j.value("kind", default_kind);
  b.endpoint = j.value("endpoint", std::string{});
  b.timeout_ms = j.value("timeout_ms", b.timeout_ms);
  if (b.kind == "remote" && b.endpoint.empty()) {
    throw Error(ErrorCode::invalid_config, "remote backend needs an endpoint");
  }
  if (b.kind != "remote" && b.kind != default_kind) {
    throw Error(ErrorCode::invalid_config, "unknown backend kind '" + b.kind + "'");
  }
  if (b.timeout_ms < 0) throw Error(ErrorCode::invalid_config, "timeout_ms must be >= 0");
  return b;
}

}  // namespace

void to_json(json& j, const AgentSettings& s) {
  j = json::object();
  j["thresholds"] = s.thresholds;
  j["early_warning"] = {{"fire_fraction_min", s.early_warning_rule.fire_fraction_min},
                        {"water_fraction_clim", s.early_warning_rule.water_fraction_clim},
                        {"downsample", s.early_warning_downsample}};
  j["flood_backend"] = {{"vv_water_max", s.vv_water_max}};
  j["reasoner"] = backend_spec_json(s.reasoner);
  j["fire_segmenter"] = backend_spec_json(s.fire_segmenter);
  j["flood_segmenter"] = backend_spec_json(s.flood_segmenter);
  j["fusion"] = {{"promote_past_event", s.fusion.promote_past_event}};
  json tools = json::object();
  for (const auto& [tool, cost] : s.costs.tools) tools[std::string(to_string(tool))] = stage_cost_json(cost);
  j["costs"] = {{"early_warning", stage_cost_json(s.costs.early_warning)},
                {"decision", stage_cost_json(s.costs.decision)},
                {"tools", tools}};
}

void from_json(const json& j, AgentSettings& s) {
  if (!j.is_object()) throw Error(ErrorCode::invalid_config, "agent settings must be a JSON object");
  AgentSettings out;
  try {
    if (j.contains("thresholds")) out.thresholds = j["thresholds"].get<ThresholdConfig>();
    if (j.contains("early_warning")) {
      const auto& ew = j["early_warning"];
      out.early_warning_rule.fire_fraction_min = ew.value("fire_fraction_min", out.early_warning_rule.fire_fraction_min);
      out.early_warning_rule.water_fraction_clim =
          ew.value("water_fraction_clim", out.early_warning_rule.water_fraction_clim);
      out.early_warning_downsample = ew.value("downsample", out.early_warning_downsample);
    }
    if (j.contains("flood_backend")) out.vv_water_max = j["flood_backend"].value("vv_water_max", out.vv_water_max);
    out.reasoner = backend_spec_from(j.value("reasoner", json::object()), "rule");
    out.fire_segmenter = backend_spec_from(j.value("fire_segmenter", json::object()), "threshold");
    out.flood_segmenter = backend_spec_from(j.value("flood_segmenter", json::object()), "threshold");
    if (j.contains("fusion")) out.fusion.promote_past_event = j["fusion"].value("promote_past_event", false);
    if (j.contains("costs")) {
      const auto& c = j["costs"];
      if (c.contains("early_warning")) out.costs.early_warning = stage_cost_from(c["early_warning"]);
      if (c.contains("decision")) out.costs.decision = stage_cost_from(c["decision"]);
      for (const auto& [name, cost] : c.value("tools", json::object()).items()) {
        auto tool = parse_tool_name(name);
        if (!tool) throw Error(ErrorCode::invalid_config, "unknown tool '" + name + "' in costs");
        out.costs.tools[*tool] = stage_cost_from(cost);
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_config, std::string("agent settings: ") + e.what());
  }
  if (out.early_warning_downsample < 1) throw Error(ErrorCode::invalid_config, "downsample must be >= 1");
  s = std::move(out);
}

AgentToolkit make_toolkit(const AgentSettings& settings) {
  settings.thresholds.validate();
  AgentToolkit kit;
  kit.settings = settings;
  if (settings.reasoner.kind == "remote") {
    kit.reasoner = std::make_shared<RemoteReasoner>(settings.reasoner.endpoint, settings.reasoner.timeout_ms);
  } else {
    kit.reasoner = std::make_shared<RuleReasoner>(settings.early_warning_rule);
  }
  if (settings.fire_segmenter.kind == "remote") {
    kit.fire_segmenter =
        std::make_shared<RemoteSegmenter>(settings.fire_segmenter.endpoint, settings.fire_segmenter.timeout_ms);
  } else {
    kit.fire_segmenter = std::make_shared<NhiFireSegmenter>(settings.thresholds.nhi_swir_hot,
                                                            settings.thresholds.eps_denominator);
  }
  if (settings.flood_segmenter.kind == "remote") {
    kit.flood_segmenter = std::make_shared<RemoteSegmenter>(settings.flood_segmenter.endpoint,
                                                            settings.flood_segmenter.timeout_ms);
  } else {
    kit.flood_segmenter = std::make_shared<BackscatterFloodSegmenter>(settings.vv_water_max);
  }
  return kit;
}

// ---------------------------------------------------------------------------
// Early warning
// ---------------------------------------------------------------------------

EarlyWarningEvidence early_warning_evidence(const SceneBundle& scene, int downsample, double eps) {
  if (downsample < 1) throw Error(ErrorCode::invalid_argument, "downsample must be >= 1");
  const BandRaster& red = scene.band(BandId::B4);
  const BandRaster& green = scene.band(BandId::B3);
  const BandRaster& blue = scene.band(BandId::B2);
  const BandRaster* swir1 = scene.has_band(BandId::B11) ? &scene.band(BandId::B11) : nullptr;
  const BandRaster* swir2 = scene.has_band(BandId::B12) ? &scene.band(BandId::B12) : nullptr;

  EarlyWarningEvidence ev;
  ev.grid_width = (scene.width + downsample - 1) / downsample;
  ev.grid_height = (scene.height + downsample - 1) / downsample;

  std::size_t cells = 0;
  std::size_t fire = 0;
  std::size_t water = 0;
  double sum_r = 0.0, sum_g = 0.0, sum_b = 0.0;
  std::size_t rgb_n = 0;

  auto block_mean = [&](const BandRaster& band, int x0, int y0) {
    double sum = 0.0;
    int n = 0;
    for (int y = y0; y < std::min(y0 + downsample, scene.height); ++y) {
      for (int x = x0; x < std::min(x0 + downsample, scene.width); ++x) {
        const float v = band.at(x, y);
        if (!std::isnan(v)) {
          sum += v;
          ++n;
        }
      }
    }
    return n ? sum / n : std::numeric_limits<double>::quiet_NaN();
  };

  for (int gy = 0; gy < ev.grid_height; ++gy) {
    for (int gx = 0; gx < ev.grid_width; ++gx) {
      const int x0 = gx * downsample;
      const int y0 = gy * downsample;
      const double r = block_mean(red, x0, y0);
      const double g = block_mean(green, x0, y0);
      const double b = block_mean(blue, x0, y0);
      if (std::isnan(r) || std::isnan(g) || std::isnan(b)) continue;
      ++cells;
      sum_r += r;
      sum_g += g;
      sum_b += b;
      ++rgb_n;
      if (swir1) {
        const double s1 = block_mean(*swir1, x0, y0);
        const double mndwi = normalized_difference(g, s1, eps);
        if (std::isfinite(mndwi) && mndwi > 0.0) ++water;
        if (swir2) {
          const double nhi = normalized_difference(block_mean(*swir2, x0, y0), s1, eps);
          if (std::isfinite(nhi) && nhi > 0.0) ++fire;
        }
      }
    }
  }
  if (cells) {
    ev.fire_fraction = static_cast<double>(fire) / static_cast<double>(cells);
    ev.water_fraction = static_cast<double>(water) / static_cast<double>(cells);
  }
  if (rgb_n) {
    ev.mean_red = sum_r / rgb_n;
    ev.mean_green = sum_g / rgb_n;
    ev.mean_blue = sum_b / rgb_n;
  }
  return ev;
}

json to_evidence_json(const SceneBundle& scene, const EarlyWarningEvidence& ev) {
  return json{{"scene_id", scene.scene_id},
              {"grid", {{"width", ev.grid_width}, {"height", ev.grid_height}}},
              {"fire_fraction", ev.fire_fraction},
              {"water_fraction", ev.water_fraction},
              {"mean_rgb", {ev.mean_red, ev.mean_green, ev.mean_blue}},
              {"scene_area_km2", scene_area_km2(scene)}};
}

HypothesisReport early_warning_assess(const SceneBundle& scene, const AgentToolkit& toolkit) {
  const auto start = Clock::now();
  const auto& s = toolkit.settings;
  const auto ev = early_warning_evidence(scene, s.early_warning_downsample, s.thresholds.eps_denominator);
  inject_delay(s.costs.delay_ms(s.costs.early_warning, &scene, s.thresholds));

  HypothesisReport report;
  report.scene_id = scene.scene_id;
  try {
    const auto out = call_reasoner(toolkit.reasoner, AgentRole::early_warning, to_evidence_json(scene, ev));
    report.predicted_event = parse_event_type(out.labels["predicted_event"].get<std::string>()).value();
    report.reasoning = out.reasoning;
    if (report.predicted_event != EventType::none && report.reasoning.empty()) {
      report.reasoning = "Suspected " + std::string(to_string(report.predicted_event)) + ".";
    }
  } catch (const Error& e) {
    report.predicted_event = EventType::none;
    report.degraded = true;
    report.reasoning = std::string("Degraded mode: early-warning reasoner unavailable (") + e.what() + ")";
  }
  report.reasoning = truncate_utf8(std::move(report.reasoning), kMaxHypothesisReasoning);
  report.elapsed_ms = ms_since(start);
  return report;
}

// ---------------------------------------------------------------------------
// Specialists
// ---------------------------------------------------------------------------

Classification classify_wildfire(const std::vector<ToolResult>& results) {
  bool active = false;
  bool burned = false;
  for (const auto& r : results) {
    if (r.tool == ToolName::ml_fire || r.tool == ToolName::index_fire) active = active || r.detected;
    if (r.tool == ToolName::burned_area) burned = burned || r.detected;
  }
  if (active) return Classification::event_confirmed;
  if (burned) return Classification::past_event;
  return Classification::no_event;
}

Classification classify_flood(const std::vector<ToolResult>& results) {
  for (const auto& r : results) {
    if (r.tool == ToolName::ml_flood && r.detected) return Classification::event_confirmed;
  }
  return Classification::no_event;
}

namespace {

template <typename Fn>
ToolResult run_tool(ToolName tool, const SceneBundle& scene, const AgentToolkit& kit, Fn fn) {
  const auto start = Clock::now();
  ToolResult result;
  try {
    result = fn().result;
  } catch (const Error& e) {
    result = ToolResult{};
    result.tool = tool;
    result.error = std::string(to_string(e.code())) + ": " + e.what();
  } catch (const std::exception& e) {
    result = ToolResult{};
    result.tool = tool;
    result.error = std::string("internal: ") + e.what();
  }
  const auto& costs = kit.settings.costs;
  auto it = costs.tools.find(tool);
  if (it != costs.tools.end()) inject_delay(costs.delay_ms(it->second, &scene, kit.settings.thresholds));
  result.elapsed_ms = ms_since(start);
  return result;
}

SpecialistReport finish_report(const SceneBundle& scene, Specialist specialist, std::vector<ToolResult> tools,
                               Classification c, const AgentToolkit& kit, Clock::time_point start) {
  SpecialistReport report;
  report.scene_id = scene.scene_id;
  report.specialist = specialist;
  report.classification = c;
  json evidence{{"scene_id", scene.scene_id},
                {"specialist", std::string(to_string(specialist))},
                {"classification", std::string(to_string(c))},
                {"tool_results", tools}};
  try {
    report.reasoning = call_reasoner(kit.reasoner, role_of(specialist), evidence).reasoning;
  } catch (const Error& e) {
    report.reasoning = specialist_prose(specialist, c, tools) + "\n(reasoner unavailable: " + e.what() + ")";
  }
  report.tool_results = std::move(tools);
  report.elapsed_ms = ms_since(start);
  return report;
}

}  // namespace

SpecialistReport wildfire_specialist_analyze(const SceneBundle& scene, const AgentToolkit& kit) {
  const auto start = Clock::now();
  const auto& cfg = kit.settings.thresholds;
  std::vector<ToolResult> tools;
  tools.push_back(run_tool(ToolName::ml_fire, scene, kit, [&] {
    if (!kit.fire_segmenter) throw Error(ErrorCode::backend_failure, "no fire segmenter configured");
    return tool_ml_fire(scene, *kit.fire_segmenter, cfg);
  }));
  tools.push_back(run_tool(ToolName::index_fire, scene, kit, [&] { return tool_index_fire(scene, cfg); }));
  tools.push_back(run_tool(ToolName::burned_area, scene, kit, [&] { return tool_burned_area(scene, cfg); }));
  const auto c = classify_wildfire(tools);
  return finish_report(scene, Specialist::wildfire, std::move(tools), c, kit, start);
}

SpecialistReport flood_specialist_analyze(const SceneBundle& scene, const AgentToolkit& kit) {
  const auto start = Clock::now();
  const auto& cfg = kit.settings.thresholds;
  std::vector<ToolResult> tools;
  tools.push_back(run_tool(ToolName::ml_flood, scene, kit, [&] {
    if (!kit.flood_segmenter) throw Error(ErrorCode::backend_failure, "no flood segmenter configured");
    return tool_ml_flood(scene, *kit.flood_segmenter, cfg);
  }));
  const auto c = classify_flood(tools);
  return finish_report(scene, Specialist::flood, std::move(tools), c, kit, start);
}

std::vector<Specialist> route(const HypothesisReport& hypothesis) {
  switch (hypothesis.predicted_event) {
    case EventType::wildfire: return {Specialist::wildfire};
    case EventType::flood: return {Specialist::flood};
    case EventType::none: return {};
  }
  return {};
}

// Exposed to fusion.cpp for its prose fallback.
std::string decision_template(const json& evidence) { return decision_prose(evidence); }

}  // namespace eoa
