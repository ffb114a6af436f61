#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eoagent/orchestrator.hpp"
#include "json.hpp"

namespace eoa {

enum class SpeedupGroup : std::uint8_t { no_event, event };
enum class CorrelationMethod : std::uint8_t { pearson, spearman };

std::string_view to_string(SpeedupGroup group) noexcept;
std::string_view to_string(CorrelationMethod method) noexcept;
std::optional<CorrelationMethod> parse_correlation_method(std::string_view text) noexcept;

// Unlabelled scenes count as no_event.
SpeedupGroup group_of(std::optional<EventType> label) noexcept;

struct SceneSpeedup {
  std::string scene_id;
  std::optional<EventType> label;
  double area_km2 = 0.0;
  double baseline_ms = 0.0;
  double routed_ms = 0.0;
  double speedup = 0.0;        // baseline / routed
  double reduction_pct = 0.0;  // 100 * (1 - routed / baseline)
};

// Pairs records by scene_id, in the order of `baseline`. Throws
// Error{scene_set_mismatch} when the id sets differ and Error{zero_routed_time}
// when a routed total is not positive.
std::vector<SceneSpeedup> compute_speedups(const std::vector<RunRecord>& baseline,
                                           const std::vector<RunRecord>& routed);

struct SpeedupStats {
  SpeedupGroup group = SpeedupGroup::no_event;
  std::size_t n = 0;
  double speedup_mean = 0.0;
  double speedup_std = 0.0;  // sample (n - 1) deviation, 0 when n == 1
  double reduction_mean = 0.0;
  double reduction_std = 0.0;
  bool single_sample = false;
};

struct GroupStats {
  std::vector<SpeedupStats> groups;  // no_event then event; empty groups omitted
  std::vector<std::string> notes;
};

GroupStats group_stats(const std::vector<SceneSpeedup>& samples);

double mean(std::span<const double> xs);
// Sample standard deviation; 0 for fewer than two values.
double sample_std(std::span<const double> xs);

// Both return nullopt for fewer than two pairs or zero variance.
std::optional<double> pearson(std::span<const double> xs, std::span<const double> ys);
std::optional<double> spearman(std::span<const double> xs, std::span<const double> ys);

struct CorrelationPoint {
  std::string scene_id;
  SpeedupGroup group = SpeedupGroup::no_event;
  double area_km2 = 0.0;
  double speedup = 0.0;
};

struct CorrelationReport {
  CorrelationMethod method = CorrelationMethod::pearson;
  std::optional<double> global_rho;
  std::optional<double> no_event_rho;
  std::optional<double> event_rho;
  std::vector<std::string> notes;
  std::vector<CorrelationPoint> points;
};

CorrelationReport stratified_correlation(const std::vector<SceneSpeedup>& samples,
                                         CorrelationMethod method = CorrelationMethod::pearson);

struct BenchReport {
  std::vector<SceneSpeedup> samples;
  GroupStats stats;
  CorrelationReport correlation;
  std::vector<std::string> notes;  // e.g. scenes dropped because a run failed
};

// Splits records by mode, drops scenes whose run failed in either mode, then
// computes speed-ups, group statistics and correlations.
BenchReport build_report(const std::vector<RunRecord>& records,
                         CorrelationMethod method = CorrelationMethod::pearson);

// Reference figures for the two groups, kept alongside the
// measured values for comparison.
nlohmann::json reference_targets();

void to_json(nlohmann::json& j, const SceneSpeedup& s);
void from_json(const nlohmann::json& j, SceneSpeedup& s);
void to_json(nlohmann::json& j, const SpeedupStats& s);
void from_json(const nlohmann::json& j, SpeedupStats& s);
void to_json(nlohmann::json& j, const CorrelationReport& c);
void from_json(const nlohmann::json& j, CorrelationReport& c);
void to_json(nlohmann::json& j, const BenchReport& r);
void from_json(const nlohmann::json& j, BenchReport& r);

// Human-readable table with one row per group.
std::string format_table(const BenchReport& report);

// Writes report.json, report.txt and plot_data.csv into out_dir.
// Throws Error{io_failure}.
void emit_report(const BenchReport& report, const std::filesystem::path& out_dir);

}  // namespace eoa
