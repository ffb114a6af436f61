#include <chrono>
#include <cmath>

#include "eoagent/error.hpp"
#include "eoagent/spectral.hpp"

using nlohmann::json;

namespace eoa {

std::string_view to_string(ToolName tool) noexcept {
  switch (tool) {
    case ToolName::ml_fire: return "ml_fire";
    case ToolName::index_fire: return "index_fire";
    case ToolName::burned_area: return "burned_area";
    case ToolName::ml_flood: return "ml_flood";
  }
  return "?";
}

std::optional<ToolName> parse_tool_name(std::string_view text) noexcept {
  for (auto t : {ToolName::ml_fire, ToolName::index_fire, ToolName::burned_area, ToolName::ml_flood}) {
    if (to_string(t) == text) return t;
  }
  return std::nullopt;
}

double ToolResult::metric(const std::string& key) const {
  auto it = metrics.find(key);
  return it == metrics.end() ? 0.0 : it->second;
}

void to_json(json& j, const ToolResult& r) {
  j = json{{"tool", std::string(to_string(r.tool))},
           {"detected", r.detected},
           {"metrics", r.metrics},
           {"mask_pixels", r.mask_pixels},
           {"elapsed_ms", r.elapsed_ms},
           {"error", r.error ? json(*r.error) : json(nullptr)}};
}

void from_json(const json& j, ToolResult& r) {
  auto tool = parse_tool_name(j.at("tool").get<std::string>());
  if (!tool) throw Error(ErrorCode::schema_violation, "unknown tool name " + j.at("tool").dump());
  ToolResult out;
  out.tool = *tool;
  out.detected = j.at("detected").get<bool>();
  out.metrics = j.at("metrics").get<std::map<std::string, double>>();
  out.mask_pixels = j.value("mask_pixels", std::size_t{0});
  out.elapsed_ms = j.value("elapsed_ms", 0.0);
  if (j.contains("error") && !j["error"].is_null()) out.error = j["error"].get<std::string>();
  r = std::move(out);
}

const std::vector<float>& FeatureStack::plane(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return planes[i];
  }
  throw Error(ErrorCode::missing_band, "feature stack has no plane " + std::string(name));
}

FeatureStack fire_features(const SceneBundle& scene) {
  FeatureStack f{scene.width, scene.height, {}, {}};
  for (BandId id : {BandId::B8, BandId::B11, BandId::B12}) {
    f.names.emplace_back(band_name(id));
    f.planes.push_back(scene.band(id).values);
  }
  return f;
}

FeatureStack flood_features(const SceneBundle& scene, double eps) {
  const auto& vv = scene.band(BandId::VV).values;
  const auto& vh = scene.band(BandId::VH).values;
  std::vector<float> ratio(vv.size());
  for (std::size_t i = 0; i < vv.size(); ++i) {
    const bool bad = std::isnan(vv[i]) || std::isnan(vh[i]) || std::abs(vh[i]) < eps;
    ratio[i] = bad ? std::numeric_limits<float>::quiet_NaN() : vv[i] / vh[i];
  }
  return FeatureStack{scene.width, scene.height, {"VV", "VH", "VV/VH"}, {vv, vh, std::move(ratio)}};
}

std::vector<std::uint8_t> NhiFireSegmenter::segment(const SceneBundle&, const FeatureStack& features,
                                                    const TileWindow& window) const {
  const auto& swir1 = features.plane("B11");
  const auto& swir2 = features.plane("B12");
  std::vector<std::uint8_t> labels(static_cast<std::size_t>(window.width) * window.height);
  for (int y = 0; y < window.height; ++y) {
    for (int x = 0; x < window.width; ++x) {
      const std::size_t src = static_cast<std::size_t>(window.y + y) * features.width + window.x + x;
      const double nhi = normalized_difference(swir2[src], swir1[src], eps_);
      labels[static_cast<std::size_t>(y) * window.width + x] =
          std::isfinite(nhi) && nhi > threshold_ ? kLabelFire : kLabelBackground;
    }
  }
  return labels;
}

std::vector<std::uint8_t> BackscatterFloodSegmenter::segment(const SceneBundle& scene,
                                                             const FeatureStack& features,
                                                             const TileWindow& window) const {
  const auto& vv = features.plane("VV");
  const BitMask* reference = scene.permanent_water ? &*scene.permanent_water : nullptr;
  std::vector<std::uint8_t> labels(static_cast<std::size_t>(window.width) * window.height);
  for (int y = 0; y < window.height; ++y) {
    for (int x = 0; x < window.width; ++x) {
      const int sx = window.x + x;
      const int sy = window.y + y;
      const float v = vv[static_cast<std::size_t>(sy) * features.width + sx];
      std::uint8_t label = kLabelBackground;
      if (std::isfinite(v) && v < vv_water_max_) {
        label = reference && reference->get(sx, sy) ? kLabelPermanentWater : kLabelFlood;
      }
      labels[static_cast<std::size_t>(y) * window.width + x] = label;
    }
  }
  return labels;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Runs the backend over every window, keeps pixels carrying `positive`, and
// ORs the tiles together.
BitMask segment_scene(const SceneBundle& scene, const SegmenterBackend& backend,
                      const FeatureStack& features, const ThresholdConfig& cfg,
                      std::uint8_t positive, std::uint8_t max_label) {
  const auto windows = tile_segment(scene.width, scene.height, cfg.tile_size, cfg.tile_stride);
  std::vector<TileMask> tiles;
  tiles.reserve(windows.size());
  for (const auto& w : windows) {
    std::vector<std::uint8_t> labels;
    try {
      labels = backend.segment(scene, features, w);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::backend_failure, backend.backend_id() + ": " + e.what());
    }
    if (labels.size() != static_cast<std::size_t>(w.width) * w.height) {
      throw Error(ErrorCode::backend_failure,
                  backend.backend_id() + ": returned " + std::to_string(labels.size()) +
                      " labels for a " + std::to_string(w.width) + "x" + std::to_string(w.height) +
                      " tile");
    }
    TileMask tile{w, BitMask(w.width, w.height)};
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] > max_label) {
        throw Error(ErrorCode::backend_failure,
                    backend.backend_id() + ": label " + std::to_string(labels[i]) + " out of range");
      }
      tile.mask.set_index(i, labels[i] == positive);
    }
    tiles.push_back(std::move(tile));
  }
  return merge_tile_masks(scene.width, scene.height, tiles);
}

ToolOutput fire_area_output(ToolName tool, BitMask mask, const SceneBundle& scene,
                            const ThresholdConfig& cfg) {
  ToolOutput out;
  out.result.tool = tool;
  const double area = mask_area_km2(mask, scene.pixel_size_m);
  out.result.metrics["active_fire_area_km2"] = area;
  out.result.detected = area >= cfg.fire_area_min_km2;
  out.result.mask_pixels = mask.count();
  out.mask = std::move(mask);
  return out;
}

}  // namespace

ToolOutput tool_index_fire(const SceneBundle& scene, const ThresholdConfig& cfg) {
  const auto start = Clock::now();
  for (BandId b : {BandId::B3, BandId::B8, BandId::B11, BandId::B12}) scene.band(b);
  auto out = fire_area_output(ToolName::index_fire, hotspot_mask(scene, cfg), scene, cfg);
  out.result.elapsed_ms = ms_since(start);
  return out;
}

ToolOutput tool_ml_fire(const SceneBundle& scene, const SegmenterBackend& backend,
                        const ThresholdConfig& cfg) {
  const auto start = Clock::now();
  const auto features = fire_features(scene);
  auto mask = segment_scene(scene, backend, features, cfg, kLabelFire, kLabelFire);
  auto out = fire_area_output(ToolName::ml_fire, std::move(mask), scene, cfg);
  out.result.elapsed_ms = ms_since(start);
  return out;
}

ToolOutput tool_burned_area(const SceneBundle& scene, const ThresholdConfig& cfg) {
  const auto start = Clock::now();
  for (BandId b : {BandId::B3, BandId::B4, BandId::B8, BandId::B11, BandId::B12}) scene.band(b);
  BitMask burned = fire_candidate_mask(scene, cfg) & bai_mask(scene, cfg);

  ToolOutput out;
  out.result.tool = ToolName::burned_area;
  const double area = mask_area_km2(burned, scene.pixel_size_m);
  out.result.metrics["burned_area_km2"] = area;
  out.result.metrics["hotspot_count"] = static_cast<double>(connected_components(burned));
  out.result.detected = area >= cfg.fire_area_min_km2;
  out.result.mask_pixels = burned.count();
  out.mask = std::move(burned);
  out.result.elapsed_ms = ms_since(start);
  return out;
}

ToolOutput tool_ml_flood(const SceneBundle& scene, const SegmenterBackend& backend,
                         const ThresholdConfig& cfg) {
  const auto start = Clock::now();
  const auto features = flood_features(scene, cfg.eps_denominator);
  // Permanent water folds into the non-flooded class.
  auto mask = segment_scene(scene, backend, features, cfg, kLabelFlood, kLabelPermanentWater);

  ToolOutput out;
  out.result.tool = ToolName::ml_flood;
  const double area = mask_area_km2(mask, scene.pixel_size_m);
  const double fraction = static_cast<double>(mask.count()) / static_cast<double>(scene.pixel_count());
  out.result.metrics["flood_area_km2"] = area;
  out.result.metrics["flood_fraction"] = fraction;
  out.result.detected = fraction >= cfg.flood_fraction_min;
  out.result.mask_pixels = mask.count();
  out.mask = std::move(mask);
  out.result.elapsed_ms = ms_since(start);
  return out;
}

}  // namespace eoa
