#include <algorithm>
#include <cmath>

#include "eoagent/error.hpp"
#include "eoagent/spectral.hpp"

using nlohmann::json;

namespace eoa {

std::string_view to_string(IndexKind kind) noexcept {
  switch (kind) {
    case IndexKind::nhi_swir: return "NHI_SWIR";
    case IndexKind::nhi_swnir: return "NHI_SWNIR";
    case IndexKind::mndwi: return "MNDWI";
    case IndexKind::bai: return "BAI";
  }
  return "?";
}

namespace {

template <typename Fn>
IndexRaster combine(IndexKind kind, const SceneBundle& scene, BandId first, BandId second, Fn fn) {
  const auto& a = scene.band(first).values;
  const auto& b = scene.band(second).values;
  IndexRaster out{kind, scene.width, scene.height, std::vector<double>(a.size())};
  std::transform(a.begin(), a.end(), b.begin(), out.values.begin(),
                 [&](float x, float y) { return fn(static_cast<double>(x), static_cast<double>(y)); });
  return out;
}

}  // namespace

IndexRaster compute_nhi_swir(const SceneBundle& scene, double eps) {
  return combine(IndexKind::nhi_swir, scene, BandId::B12, BandId::B11,
                 [eps](double swir2, double swir1) { return normalized_difference(swir2, swir1, eps); });
}

IndexRaster compute_nhi_swnir(const SceneBundle& scene, double eps) {
  return combine(IndexKind::nhi_swnir, scene, BandId::B11, BandId::B8,
                 [eps](double swir1, double nir) { return normalized_difference(swir1, nir, eps); });
}

IndexRaster compute_mndwi(const SceneBundle& scene, double eps) {
  return combine(IndexKind::mndwi, scene, BandId::B3, BandId::B11,
                 [eps](double green, double swir1) { return normalized_difference(green, swir1, eps); });
}

IndexRaster compute_bai(const SceneBundle& scene, double eps) {
  return combine(IndexKind::bai, scene, BandId::B4, BandId::B8,
                 [eps](double red, double nir) { return burned_area_index(red, nir, eps); });
}

BitMask index_above(const IndexRaster& index, double threshold) {
  BitMask mask(index.width, index.height);
  for (std::size_t i = 0; i < index.values.size(); ++i) {
    const double v = index.values[i];
    mask.set_index(i, std::isfinite(v) && v > threshold);
  }
  return mask;
}

void ThresholdConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::invalid_config, what); };
  const double all[] = {nhi_swir_hot, nhi_swnir_hot, nhi_swir_relaxed, nhi_swnir_relaxed,
                        mndwi_water,  bai_burn,      flood_fraction_min, fire_area_min_km2,
                        eps_denominator};
  for (double v : all) {
    if (!std::isfinite(v)) fail("thresholds must be finite");
  }
  if (nhi_swir_relaxed > nhi_swir_hot) fail("nhi_swir_relaxed must not exceed nhi_swir_hot");
  if (nhi_swnir_relaxed > nhi_swnir_hot) fail("nhi_swnir_relaxed must not exceed nhi_swnir_hot");
  if (flood_fraction_min < 0.0 || flood_fraction_min > 1.0) fail("flood_fraction_min must lie in [0, 1]");
  if (fire_area_min_km2 < 0.0) fail("fire_area_min_km2 must be >= 0");
  if (!(eps_denominator > 0.0)) fail("eps_denominator must be > 0");
  if (tile_size < 1) fail("tile_size must be >= 1");
  if (tile_stride < 1 || tile_stride > tile_size) fail("tile_stride must lie in [1, tile_size]");
}

void to_json(json& j, const ThresholdConfig& cfg) {
  j = json{{"nhi_swir_hot", cfg.nhi_swir_hot},
           {"nhi_swnir_hot", cfg.nhi_swnir_hot},
           {"nhi_swir_relaxed", cfg.nhi_swir_relaxed},
           {"nhi_swnir_relaxed", cfg.nhi_swnir_relaxed},
           {"mndwi_water", cfg.mndwi_water},
           {"bai_burn", cfg.bai_burn},
           {"flood_fraction_min", cfg.flood_fraction_min},
           {"fire_area_min_km2", cfg.fire_area_min_km2},
           {"eps_denominator", cfg.eps_denominator},
           {"tile_size", cfg.tile_size},
           {"tile_stride", cfg.tile_stride}};
}

void from_json(const json& j, ThresholdConfig& cfg) {
  if (!j.is_object()) throw Error(ErrorCode::invalid_config, "threshold config must be a JSON object");
  static const char* const kKnown[] = {
      "nhi_swir_hot",     "nhi_swnir_hot",     "nhi_swir_relaxed", "nhi_swnir_relaxed",
      "mndwi_water",      "bai_burn",          "flood_fraction_min", "fire_area_min_km2",
      "eps_denominator",  "tile_size",         "tile_stride"};
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(std::begin(kKnown), std::end(kKnown),
                     [&](const char* k) { return key == k; }) == std::end(kKnown)) {
      throw Error(ErrorCode::invalid_config, "unknown threshold key '" + key + "'");
    }
  }
  ThresholdConfig out;
  try {
    out.nhi_swir_hot = j.value("nhi_swir_hot", out.nhi_swir_hot);
    out.nhi_swnir_hot = j.value("nhi_swnir_hot", out.nhi_swnir_hot);
    out.nhi_swir_relaxed = j.value("nhi_swir_relaxed", out.nhi_swir_relaxed);
    out.nhi_swnir_relaxed = j.value("nhi_swnir_relaxed", out.nhi_swnir_relaxed);
    out.mndwi_water = j.value("mndwi_water", out.mndwi_water);
    out.bai_burn = j.value("bai_burn", out.bai_burn);
    out.flood_fraction_min = j.value("flood_fraction_min", out.flood_fraction_min);
    out.fire_area_min_km2 = j.value("fire_area_min_km2", out.fire_area_min_km2);
    out.eps_denominator = j.value("eps_denominator", out.eps_denominator);
    out.tile_size = j.value("tile_size", out.tile_size);
    out.tile_stride = j.value("tile_stride", out.tile_stride);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_config, std::string("threshold config: ") + e.what());
  }
  out.validate();
  cfg = out;
}

BitMask water_mask(const SceneBundle& scene, const ThresholdConfig& cfg) {
  return index_above(compute_mndwi(scene, cfg.eps_denominator), cfg.mndwi_water);
}

namespace {

BitMask nhi_mask(const SceneBundle& scene, const ThresholdConfig& cfg, double swir_t, double swnir_t) {
  const auto swir = index_above(compute_nhi_swir(scene, cfg.eps_denominator), swir_t);
  const auto swnir = index_above(compute_nhi_swnir(scene, cfg.eps_denominator), swnir_t);
  return (swir | swnir) & ~water_mask(scene, cfg);
}

}  // namespace

BitMask hotspot_mask(const SceneBundle& scene, const ThresholdConfig& cfg) {
  return nhi_mask(scene, cfg, cfg.nhi_swir_hot, cfg.nhi_swnir_hot);
}

BitMask fire_candidate_mask(const SceneBundle& scene, const ThresholdConfig& cfg) {
  return nhi_mask(scene, cfg, cfg.nhi_swir_relaxed, cfg.nhi_swnir_relaxed);
}

BitMask bai_mask(const SceneBundle& scene, const ThresholdConfig& cfg) {
  return index_above(compute_bai(scene, cfg.eps_denominator), cfg.bai_burn);
}

}  // namespace eoa
