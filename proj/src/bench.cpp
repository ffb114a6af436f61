#include "eoagent/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "eoagent/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace eoa {

std::string_view to_string(SpeedupGroup group) noexcept {
  return group == SpeedupGroup::no_event ? "no_event" : "event";
}

std::string_view to_string(CorrelationMethod method) noexcept {
  return method == CorrelationMethod::pearson ? "pearson" : "spearman";
}

std::optional<CorrelationMethod> parse_correlation_method(std::string_view text) noexcept {
  if (text == "pearson") return CorrelationMethod::pearson;
  if (text == "spearman") return CorrelationMethod::spearman;
  return std::nullopt;
}

SpeedupGroup group_of(std::optional<EventType> label) noexcept {
  return label && *label != EventType::none ? SpeedupGroup::event : SpeedupGroup::no_event;
}

std::vector<SceneSpeedup> compute_speedups(const std::vector<RunRecord>& baseline,
                                           const std::vector<RunRecord>& routed) {
  std::map<std::string, const RunRecord*> by_id;
  for (const auto& r : routed) {
    if (!by_id.emplace(r.scene_id, &r).second) {
      throw Error(ErrorCode::scene_set_mismatch, "scene " + r.scene_id + " appears twice in the routed records");
    }
  }
  std::set<std::string> seen;
  std::vector<SceneSpeedup> out;
  out.reserve(baseline.size());
  for (const auto& b : baseline) {
    if (!seen.insert(b.scene_id).second) {
      throw Error(ErrorCode::scene_set_mismatch, "scene " + b.scene_id + " appears twice in the baseline records");
    }
    auto it = by_id.find(b.scene_id);
    if (it == by_id.end()) {
      throw Error(ErrorCode::scene_set_mismatch, "scene " + b.scene_id + " has no routed record");
    }
    const RunRecord& r = *it->second;
    if (!(r.timings.total_ms > 0.0)) {
      throw Error(ErrorCode::zero_routed_time, "scene " + b.scene_id + " has a non-positive routed time");
    }
    SceneSpeedup s;
    s.scene_id = b.scene_id;
    s.label = b.label ? b.label : r.label;
    s.area_km2 = b.scene_area_km2;
    s.baseline_ms = b.timings.total_ms;
    s.routed_ms = r.timings.total_ms;
    s.speedup = s.baseline_ms / s.routed_ms;
    s.reduction_pct = 100.0 * (1.0 - s.routed_ms / s.baseline_ms);
    out.push_back(std::move(s));
  }
  if (out.size() != by_id.size()) {
    for (const auto& [id, record] : by_id) {
      if (!seen.count(id)) throw Error(ErrorCode::scene_set_mismatch, "scene " + id + " has no baseline record");
    }
  }
  return out;
}

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_std(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

GroupStats group_stats(const std::vector<SceneSpeedup>& samples) {
  GroupStats out;
  for (SpeedupGroup g : {SpeedupGroup::no_event, SpeedupGroup::event}) {
    std::vector<double> speedups;
    std::vector<double> reductions;
    for (const auto& s : samples) {
      if (group_of(s.label) != g) continue;
      speedups.push_back(s.speedup);
      reductions.push_back(s.reduction_pct);
    }
    if (speedups.empty()) {
      out.notes.push_back("group " + std::string(to_string(g)) + " is empty");
      continue;
    }
    SpeedupStats st;
    st.group = g;
    st.n = speedups.size();
    st.speedup_mean = mean(speedups);
    st.speedup_std = sample_std(speedups);
    st.reduction_mean = mean(reductions);
    st.reduction_std = sample_std(reductions);
    st.single_sample = st.n == 1;
    if (st.single_sample) {
      out.notes.push_back("group " + std::string(to_string(g)) + " has a single sample; std reported as 0");
    }
    out.groups.push_back(st);
  }
  return out;
}

std::optional<double> pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error(ErrorCode::invalid_argument, "correlation inputs differ in length");
  if (xs.size() < 2) return std::nullopt;
  const double mx = mean(xs);
  const double my = mean(ys);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

// Ranks starting at 1; ties share their average rank.
std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

std::optional<double> spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error(ErrorCode::invalid_argument, "correlation inputs differ in length");
  const auto rx = ranks(xs);
  const auto ry = ranks(ys);
  return pearson(rx, ry);
}

CorrelationReport stratified_correlation(const std::vector<SceneSpeedup>& samples, CorrelationMethod method) {
  CorrelationReport out;
  out.method = method;
  auto rho = [&](std::optional<SpeedupGroup> group, std::optional<double>& slot, const std::string& name) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& s : samples) {
      if (group && group_of(s.label) != *group) continue;
      xs.push_back(s.area_km2);
      ys.push_back(s.speedup);
    }
    if (xs.size() < 2) {
      out.notes.push_back(name + ": insufficient samples (" + std::to_string(xs.size()) + " < 2), rho omitted");
      return;
    }
    slot = method == CorrelationMethod::pearson ? pearson(xs, ys) : spearman(xs, ys);
    if (!slot) out.notes.push_back(name + ": zero variance in area or speed-up, rho undefined");
  };
  rho(std::nullopt, out.global_rho, "global");
  rho(SpeedupGroup::no_event, out.no_event_rho, "no_event");
  rho(SpeedupGroup::event, out.event_rho, "event");
  for (const auto& s : samples) out.points.push_back({s.scene_id, group_of(s.label), s.area_km2, s.speedup});
  return out;
}

BenchReport build_report(const std::vector<RunRecord>& records, CorrelationMethod method) {
  BenchReport report;
  std::set<std::string> failed;
  for (const auto& r : records) {
    if (!r.ok) failed.insert(r.scene_id);
  }
  for (const auto& id : failed) {
    report.notes.push_back("scene " + id + " excluded: a workflow stage failed");
  }
  std::vector<RunRecord> baseline;
  std::vector<RunRecord> routed;
  for (const auto& r : records) {
    if (failed.count(r.scene_id)) continue;
    (r.mode == WorkflowMode::baseline ? baseline : routed).push_back(r);
  }
  report.samples = compute_speedups(baseline, routed);
  report.stats = group_stats(report.samples);
  report.correlation = stratified_correlation(report.samples, method);
  return report;
}

json reference_targets() {
  return json{{"no_event", {{"speedup_mean", 4.78}, {"speedup_std", 2.54}, {"reduction_mean", 73.2},
                            {"reduction_std", 14.1}}},
              {"event", {{"speedup_mean", 1.3}, {"speedup_std", 0.45}, {"reduction_mean", 13.5},
                         {"reduction_std", 30.8}}},
              {"rho", {{"global", 0.08}, {"no_event", 0.99}, {"event", 0.92}}}};
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}

SpeedupGroup parse_group(const json& j) {
  const auto text = j.get<std::string>();
  if (text == "no_event") return SpeedupGroup::no_event;
  if (text == "event") return SpeedupGroup::event;
  throw Error(ErrorCode::schema_violation, "unknown group " + j.dump());
}

}  // namespace

void to_json(json& j, const SceneSpeedup& s) {
  j = json{{"scene_id", s.scene_id},
           {"label", s.label ? json(std::string(to_string(*s.label))) : json(nullptr)},
           {"group", std::string(to_string(group_of(s.label)))},
           {"area_km2", s.area_km2},
           {"baseline_ms", s.baseline_ms},
           {"routed_ms", s.routed_ms},
           {"speedup", s.speedup},
           {"reduction_pct", s.reduction_pct}};
}

void from_json(const json& j, SceneSpeedup& s) {
  s.scene_id = j.at("scene_id").get<std::string>();
  s.label = j.at("label").is_null() ? std::nullopt : parse_event_type(j["label"].get<std::string>());
  s.area_km2 = j.at("area_km2").get<double>();
  s.baseline_ms = j.at("baseline_ms").get<double>();
  s.routed_ms = j.at("routed_ms").get<double>();
  s.speedup = j.at("speedup").get<double>();
  s.reduction_pct = j.at("reduction_pct").get<double>();
}

void to_json(json& j, const SpeedupStats& s) {
  j = json{{"group", std::string(to_string(s.group))},
           {"n", s.n},
           {"speedup_mean", s.speedup_mean},
           {"speedup_std", s.speedup_std},
           {"reduction_mean", s.reduction_mean},
           {"reduction_std", s.reduction_std},
           {"single_sample", s.single_sample}};
}

void from_json(const json& j, SpeedupStats& s) {
  s.group = parse_group(j.at("group"));
  s.n = j.at("n").get<std::size_t>();
  s.speedup_mean = j.at("speedup_mean").get<double>();
  s.speedup_std = j.at("speedup_std").get<double>();
  s.reduction_mean = j.at("reduction_mean").get<double>();
  s.reduction_std = j.at("reduction_std").get<double>();
  s.single_sample = j.at("single_sample").get<bool>();
}

void to_json(json& j, const CorrelationReport& c) {
  json points = json::array();
  for (const auto& p : c.points) {
    points.push_back({{"scene_id", p.scene_id},
                      {"group", std::string(to_string(p.group))},
                      {"area_km2", p.area_km2},
                      {"speedup", p.speedup}});
  }
  j = json{{"method", std::string(to_string(c.method))},
           {"global_rho", optional_number(c.global_rho)},
           {"no_event_rho", optional_number(c.no_event_rho)},
           {"event_rho", optional_number(c.event_rho)},
           {"notes", c.notes},
           {"points", points}};
}

void from_json(const json& j, CorrelationReport& c) {
  auto method = parse_correlation_method(j.at("method").get<std::string>());
  if (!method) throw Error(ErrorCode::schema_violation, "unknown correlation method " + j.at("method").dump());
  c.method = *method;
  c.global_rho = read_optional(j, "global_rho");
  c.no_event_rho = read_optional(j, "no_event_rho");
  c.event_rho = read_optional(j, "event_rho");
  c.notes = j.at("notes").get<std::vector<std::string>>();
  c.points.clear();
  for (const auto& p : j.at("points")) {
    c.points.push_back({p.at("scene_id").get<std::string>(), parse_group(p.at("group")),
                        p.at("area_km2").get<double>(), p.at("speedup").get<double>()});
  }
}

void to_json(json& j, const BenchReport& r) {
  j = json{{"samples", r.samples},
           {"groups", r.stats.groups},
           {"group_notes", r.stats.notes},
           {"correlation", r.correlation},
           {"notes", r.notes},
           {"reference", reference_targets()}};
}

void from_json(const json& j, BenchReport& r) {
  try {
    r.samples = j.at("samples").get<std::vector<SceneSpeedup>>();
    r.stats.groups = j.at("groups").get<std::vector<SpeedupStats>>();
    r.stats.notes = j.at("group_notes").get<std::vector<std::string>>();
    r.correlation = j.at("correlation").get<CorrelationReport>();
    r.notes = j.at("notes").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::schema_violation, std::string("bench report: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Text and files
// ---------------------------------------------------------------------------

namespace {

std::string fmt(const char* pattern, double a, double b) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

std::string rho_text(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *v);
  return buf;
}

}  // namespace

std::string format_table(const BenchReport& report) {
  const json ref = reference_targets();
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-28s %4s  %-22s %-22s\n", "Group", "n", "Speed-up (mean +- std)",
                "Time reduction %");
  out += line;
  for (SpeedupGroup g : {SpeedupGroup::no_event, SpeedupGroup::event}) {
    const char* name = g == SpeedupGroup::no_event ? "No event" : "Event (wildfire or flood)";
    auto it = std::find_if(report.stats.groups.begin(), report.stats.groups.end(),
                           [&](const SpeedupStats& s) { return s.group == g; });
    if (it == report.stats.groups.end()) {
      std::snprintf(line, sizeof line, "%-28s %4d  %-22s %-22s\n", name, 0, "-", "-");
    } else {
      std::snprintf(line, sizeof line, "%-28s %4zu  %-22s %-22s\n", name, it->n,
                    fmt("%.2f +- %.2f", it->speedup_mean, it->speedup_std).c_str(),
                    fmt("%.1f +- %.1f", it->reduction_mean, it->reduction_std).c_str());
    }
    out += line;
  }
  out += "\nReference targets (not reproduced here)\n";
  for (const char* key : {"no_event", "event"}) {
    const json& r = ref[key];
    std::snprintf(line, sizeof line, "%-28s %4s  %-22s %-22s\n",
                  std::string(key) == "no_event" ? "No event" : "Event (wildfire or flood)", "",
                  fmt("%.2f +- %.2f", r["speedup_mean"].get<double>(), r["speedup_std"].get<double>()).c_str(),
                  fmt("%.1f +- %.1f", r["reduction_mean"].get<double>(), r["reduction_std"].get<double>()).c_str());
    out += line;
  }
  const auto& c = report.correlation;
  out += "\nCorrelation of speed-up with scene area (" + std::string(to_string(c.method)) + ")\n";
  out += "  global:   " + rho_text(c.global_rho) + "\n";
  out += "  no_event: " + rho_text(c.no_event_rho) + "\n";
  out += "  event:    " + rho_text(c.event_rho) + "\n";
  std::vector<std::string> notes = report.notes;
  notes.insert(notes.end(), report.stats.notes.begin(), report.stats.notes.end());
  notes.insert(notes.end(), c.notes.begin(), c.notes.end());
  if (!notes.empty()) {
    out += "\nNotes\n";
    for (const auto& n : notes) out += "  - " + n + "\n";
  }
  return out;
}

void emit_report(const BenchReport& report, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::io_failure, "cannot create " + out_dir.string() + ": " + ec.message());

  auto write = [&](const char* name, const std::string& content) {
    const fs::path path = out_dir / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << content;
    f.close();
    if (!f) throw Error(ErrorCode::io_failure, "cannot write " + path.string());
  };

  write("report.json", json(report).dump(2) + "\n");
  write("report.txt", format_table(report));
  std::string csv = "scene_id,area_km2,speedup,group\n";
  char row[96];
  for (const auto& p : report.correlation.points) {
    std::snprintf(row, sizeof row, ",%.17g,%.17g,", p.area_km2, p.speedup);
    csv += p.scene_id + row + std::string(to_string(p.group)) + "\n";
  }
  write("plot_data.csv", csv);
}

}  // namespace eoa
