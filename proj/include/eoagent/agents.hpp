#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "eoagent/scene_store.hpp"
#include "eoagent/spectral.hpp"
#include "json.hpp"

namespace eoa {

inline constexpr const char* kMessageSchemaVersion = "1.0";
inline constexpr std::size_t kMaxHypothesisReasoning = 500;

enum class AgentRole : std::uint8_t { early_warning, wildfire_specialist, flood_specialist, decision };
enum class Specialist : std::uint8_t { wildfire, flood };
enum class Classification : std::uint8_t { event_confirmed, past_event, no_event };
enum class Decision : std::uint8_t { alert, no_alert };

std::string_view to_string(AgentRole role) noexcept;
std::string_view to_string(Specialist specialist) noexcept;
std::string_view to_string(Classification classification) noexcept;
std::string_view to_string(Decision decision) noexcept;
std::optional<AgentRole> parse_agent_role(std::string_view text) noexcept;
std::optional<Specialist> parse_specialist(std::string_view text) noexcept;
std::optional<Classification> parse_classification(std::string_view text) noexcept;
std::optional<Decision> parse_decision(std::string_view text) noexcept;

constexpr EventType event_of(Specialist s) noexcept {
  return s == Specialist::wildfire ? EventType::wildfire : EventType::flood;
}
constexpr AgentRole role_of(Specialist s) noexcept {
  return s == Specialist::wildfire ? AgentRole::wildfire_specialist : AgentRole::flood_specialist;
}

// ---------------------------------------------------------------------------
// Messages exchanged between agent tiers. Every serialized message carries
// "schema_version"; from_json throws Error{schema_violation} on bad input.
// ---------------------------------------------------------------------------

struct HypothesisReport {
  std::string scene_id;
  EventType predicted_event = EventType::none;
  std::string reasoning;
  double elapsed_ms = 0.0;
  bool degraded = false;  // reasoner failed; predicted_event forced to none
};

struct SpecialistReport {
  std::string scene_id;
  Specialist specialist = Specialist::wildfire;
  std::vector<ToolResult> tool_results;
  Classification classification = Classification::no_event;
  std::string reasoning;
  double elapsed_ms = 0.0;
};

struct FinalAlert {
  std::string scene_id;
  Decision decision = Decision::no_alert;
  EventType event_type = EventType::none;
  double confidence = 1.0;
  std::string reasoning;
  bool informational = false;  // promoted past event, not an active hazard
  std::vector<std::string> rules;  // fusion rules that fired, e.g. "refutation"
  std::optional<HypothesisReport> hypothesis;  // absent in baseline runs
  std::vector<SpecialistReport> specialist_reports;
};

void to_json(nlohmann::json& j, const HypothesisReport& r);
void from_json(const nlohmann::json& j, HypothesisReport& r);
void to_json(nlohmann::json& j, const SpecialistReport& r);
void from_json(const nlohmann::json& j, SpecialistReport& r);
void to_json(nlohmann::json& j, const FinalAlert& a);
void from_json(const nlohmann::json& j, FinalAlert& a);

// Formats an area the way reports quote it: two decimals, trailing zeros
// trimmed, at least one decimal ("0.0", "41.1", "1.77").
std::string format_km2(double value);

// ---------------------------------------------------------------------------
// Reasoning backends
// ---------------------------------------------------------------------------

struct ReasonerOutput {
  nlohmann::json labels = nlohmann::json::object();
  std::string reasoning;
};

// Seam for the language models: turns a role's structured evidence into label
// fields plus prose. Labels must come from the role's enum:
//   early_warning        {"predicted_event": wildfire|flood|none}
//   *_specialist         {"classification": event_confirmed|past_event|no_event}
//   decision             {"decision": alert|no_alert}
class ReasonerBackend {
 public:
  virtual ~ReasonerBackend() = default;

  virtual std::string backend_id() const = 0;
  // 0 disables the deadline.
  virtual int timeout_ms() const { return 0; }
  virtual bool concurrent_calls_ok() const { return true; }
  virtual ReasonerOutput reason(AgentRole role, const nlohmann::json& evidence) const = 0;
};

// Throws Error{schema_violation} when labels are missing or out of enum.
void validate_reasoner_output(AgentRole role, const ReasonerOutput& out);

// Calls the backend under its deadline and validates the output. Any failure
// (exception, timeout, bad labels) is rethrown as Error{backend_failure}.
ReasonerOutput call_reasoner(const std::shared_ptr<const ReasonerBackend>& backend, AgentRole role,
                             const nlohmann::json& evidence);

struct EarlyWarningRule {
  double fire_fraction_min = 0.001;   // h_fire
  double water_fraction_clim = 0.02;  // climatological water fraction
};

// Deterministic default backend: threshold rules for the early-warning label
// and fixed templates for the prose of every role.
class RuleReasoner final : public ReasonerBackend {
 public:
  explicit RuleReasoner(EarlyWarningRule rule = {}) : rule_(rule) {}

  std::string backend_id() const override { return "rule-based"; }
  ReasonerOutput reason(AgentRole role, const nlohmann::json& evidence) const override;

 private:
  EarlyWarningRule rule_;
};

// Client for an external inference service. POSTs
//   {"schema_version", "role", "evidence"}
// to the endpoint URL and expects {"labels": {...}, "reasoning": "..."}.
class RemoteReasoner final : public ReasonerBackend {
 public:
  RemoteReasoner(std::string endpoint, int timeout_ms);

  std::string backend_id() const override { return "remote:" + endpoint_; }
  int timeout_ms() const override { return timeout_ms_; }
  ReasonerOutput reason(AgentRole role, const nlohmann::json& evidence) const override;

 private:
  std::string endpoint_;
  int timeout_ms_;
};

// Segmenter served by an external inference service. POSTs the window's
// feature values and expects {"labels": [...]} with one label per pixel.
class RemoteSegmenter final : public SegmenterBackend {
 public:
  RemoteSegmenter(std::string endpoint, int timeout_ms);

  std::string backend_id() const override { return "remote:" + endpoint_; }
  std::vector<std::uint8_t> segment(const SceneBundle& scene, const FeatureStack& features,
                                    const TileWindow& window) const override;

 private:
  std::string endpoint_;
  int timeout_ms_;
};

// ---------------------------------------------------------------------------
// Agent settings shared by in-process agents and node servers
// ---------------------------------------------------------------------------

// Injected processing cost, used by the benchmark to emulate model inference
// on slow hardware. Delay = fixed_ms + per_tile_ms * tile count of the scene.
struct StageCost {
  double fixed_ms = 0.0;
  double per_tile_ms = 0.0;
};

struct CostModel {
  StageCost early_warning;
  StageCost decision;
  std::map<ToolName, StageCost> tools;

  bool empty() const;
  double delay_ms(const StageCost& cost, const SceneBundle* scene, const ThresholdConfig& cfg) const;
};

struct BackendSpec {
  std::string kind = "rule";  // "rule" (reasoner) or "threshold" (segmenters), or "remote"
  std::string endpoint;
  int timeout_ms = 5000;
};

struct FusionOptions {
  bool promote_past_event = false;
};

struct AgentSettings {
  ThresholdConfig thresholds;
  EarlyWarningRule early_warning_rule;
  int early_warning_downsample = 4;
  double vv_water_max = 0.02;
  BackendSpec reasoner;
  BackendSpec fire_segmenter{"threshold", "", 5000};
  BackendSpec flood_segmenter{"threshold", "", 5000};
  FusionOptions fusion;
  CostModel costs;
};

void to_json(nlohmann::json& j, const AgentSettings& s);
void from_json(const nlohmann::json& j, AgentSettings& s);

// Backends instantiated from AgentSettings.
struct AgentToolkit {
  AgentSettings settings;
  std::shared_ptr<const ReasonerBackend> reasoner;
  std::shared_ptr<const SegmenterBackend> fire_segmenter;
  std::shared_ptr<const SegmenterBackend> flood_segmenter;
};

AgentToolkit make_toolkit(const AgentSettings& settings);

// ---------------------------------------------------------------------------
// Agents
// ---------------------------------------------------------------------------

// Cheap whole-scene statistics on a block-averaged grid.
struct EarlyWarningEvidence {
  int grid_width = 0;
  int grid_height = 0;
  double fire_fraction = 0.0;   // NHI_SWIR > 0
  double water_fraction = 0.0;  // MNDWI > 0
  double mean_red = 0.0;
  double mean_green = 0.0;
  double mean_blue = 0.0;
};

EarlyWarningEvidence early_warning_evidence(const SceneBundle& scene, int downsample = 4,
                                            double eps = kDefaultEps);
nlohmann::json to_evidence_json(const SceneBundle& scene, const EarlyWarningEvidence& ev);

HypothesisReport early_warning_assess(const SceneBundle& scene, const AgentToolkit& toolkit);

// Pure classification rules.
Classification classify_wildfire(const std::vector<ToolResult>& results);
Classification classify_flood(const std::vector<ToolResult>& results);

SpecialistReport wildfire_specialist_analyze(const SceneBundle& scene, const AgentToolkit& toolkit);
SpecialistReport flood_specialist_analyze(const SceneBundle& scene, const AgentToolkit& toolkit);

// The routing step: which specialists a hypothesis activates.
std::vector<Specialist> route(const HypothesisReport& hypothesis);

// Outcome of the deterministic fusion rules, before any prose is written.
struct FusionOutcome {
  Decision decision = Decision::no_alert;
  EventType event_type = EventType::none;
  double confidence = 1.0;
  bool informational = false;
  std::vector<std::string> rules;
  std::size_t sources = 0;
  std::size_t agreeing = 0;
};

FusionOutcome fuse_rules(const std::optional<HypothesisReport>& hypothesis,
                         const std::vector<SpecialistReport>& reports, const FusionOptions& options = {});

// Area a confirmed specialist reports for its event (active fire or flood).
double specialist_event_area(const SpecialistReport& report);

FinalAlert decision_fuse(const std::optional<HypothesisReport>& hypothesis,
                         const std::vector<SpecialistReport>& reports, const AgentToolkit& toolkit);

}  // namespace eoa
