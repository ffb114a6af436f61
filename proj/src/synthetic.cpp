#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "eoagent/error.hpp"
#include "eoagent/scene_store.hpp"

using nlohmann::json;

namespace eoa {

namespace {

// Reflectance signatures in band order B2, B3, B4, B8, B11, B12 followed by
// linear VV, VH backscatter. Values sit well clear of the default index
// thresholds so that the jitter cannot flip a pixel's class:
//   vegetation  NHI_SWIR -0.33, NHI_SWNIR -0.27, MNDWI -0.48, BAI ~12
//   fire        NHI_SWIR +0.20, NHI_SWNIR +0.43, MNDWI -0.67, BAI ~250
//   burn scar   NHI_SWIR -0.15, NHI_SWNIR -0.03, MNDWI -0.31, BAI ~625
//   water       MNDWI +0.60, both NHI < 0, VV in the dark-water regime
//   flood       MNDWI +0.50, both NHI < 0, VV in the dark-water regime
struct Signature {
  std::array<float, 6> optical;
  std::array<float, 2> sar;
};

constexpr Signature kBackground{{0.04f, 0.07f, 0.05f, 0.35f, 0.20f, 0.10f}, {0.15f, 0.03f}};
constexpr Signature kFire{{0.05f, 0.06f, 0.08f, 0.12f, 0.30f, 0.45f}, {0.15f, 0.03f}};
constexpr Signature kBurnScar{{0.05f, 0.05f, 0.10f, 0.10f, 0.095f, 0.07f}, {0.08f, 0.015f}};
constexpr Signature kWater{{0.06f, 0.08f, 0.04f, 0.03f, 0.02f, 0.01f}, {0.005f, 0.001f}};
constexpr Signature kFlood{{0.07f, 0.09f, 0.06f, 0.05f, 0.03f, 0.02f}, {0.006f, 0.0012f}};

constexpr std::array<BandId, 6> kOptical = {BandId::B2, BandId::B3, BandId::B4,
                                            BandId::B8, BandId::B11, BandId::B12};
constexpr std::array<BandId, 2> kSar = {BandId::VV, BandId::VH};

const Signature& signature_for(RegionKind kind) {
  switch (kind) {
    case RegionKind::fire: return kFire;
    case RegionKind::burn_scar: return kBurnScar;
    case RegionKind::water: return kWater;
    case RegionKind::flood: return kFlood;
    case RegionKind::nodata: break;
  }
  return kBackground;
}

std::optional<RegionKind> parse_region_kind(std::string_view text) {
  for (auto k : {RegionKind::fire, RegionKind::burn_scar, RegionKind::water, RegionKind::flood,
                 RegionKind::nodata}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(RegionKind kind) noexcept {
  switch (kind) {
    case RegionKind::fire: return "fire";
    case RegionKind::burn_scar: return "burn_scar";
    case RegionKind::water: return "water";
    case RegionKind::flood: return "flood";
    case RegionKind::nodata: return "nodata";
  }
  return "fire";
}

SceneBundle make_synthetic_scene(const SyntheticSpec& spec) {
  if (spec.width <= 0 || spec.height <= 0) {
    throw Error(ErrorCode::invalid_spec, "synthetic scene dimensions must be positive");
  }
  if (!(spec.pixel_size_m > 0.0)) {
    throw Error(ErrorCode::invalid_spec, "synthetic pixel_size_m must be positive");
  }
  if (spec.noise < 0.0 || spec.noise > 0.01) {
    throw Error(ErrorCode::invalid_spec, "synthetic noise must lie in [0, 0.01]");
  }
  if (!spec.optical && !spec.sar) {
    throw Error(ErrorCode::invalid_spec, "synthetic scene needs optical or SAR bands");
  }
  for (const auto& r : spec.regions) {
    if (r.width <= 0 || r.height <= 0 || r.x < 0 || r.y < 0 || r.x + r.width > spec.width ||
        r.y + r.height > spec.height) {
      throw Error(ErrorCode::invalid_spec,
                  "region " + std::string(to_string(r.kind)) + " at (" + std::to_string(r.x) +
                      "," + std::to_string(r.y) + ") does not fit the scene");
    }
  }

  const int w = spec.width;
  const int h = spec.height;
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);

  // Per-pixel class map: -1 background, otherwise index into spec.regions.
  std::vector<int> owner(n, -1);
  for (std::size_t i = 0; i < spec.regions.size(); ++i) {
    const auto& r = spec.regions[i];
    for (int y = r.y; y < r.y + r.height; ++y) {
      for (int x = r.x; x < r.x + r.width; ++x) {
        owner[static_cast<std::size_t>(y) * w + x] = static_cast<int>(i);
      }
    }
  }

  SceneBundle scene;
  scene.scene_id = spec.scene_id;
  scene.width = w;
  scene.height = h;
  scene.pixel_size_m = spec.pixel_size_m;
  scene.label = spec.label;
  scene.acquisition_note = spec.acquisition_note;

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> jitter(-1.0, 1.0);
  const float nan = std::numeric_limits<float>::quiet_NaN();

  auto paint = [&](BandId id, auto value_of) {
    BandRaster raster;
    raster.band = id;
    raster.width = w;
    raster.height = h;
    raster.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) raster.values[i] = value_of(i);
    scene.bands.emplace(id, std::move(raster));
  };

  if (spec.optical) {
    for (std::size_t b = 0; b < kOptical.size(); ++b) {
      paint(kOptical[b], [&](std::size_t i) -> float {
        const int o = owner[i];
        if (o >= 0 && spec.regions[o].kind == RegionKind::nodata) return nan;
        const Signature& sig = o < 0 ? kBackground : signature_for(spec.regions[o].kind);
        const double v = sig.optical[b] + spec.noise * jitter(rng);
        return static_cast<float>(std::clamp(v, 0.0, 1.0));
      });
    }
  }
  if (spec.sar) {
    const double relative = 25.0 * spec.noise;
    for (std::size_t b = 0; b < kSar.size(); ++b) {
      paint(kSar[b], [&](std::size_t i) -> float {
        const int o = owner[i];
        if (o >= 0 && spec.regions[o].kind == RegionKind::nodata) return nan;
        const Signature& sig = o < 0 ? kBackground : signature_for(spec.regions[o].kind);
        const double v = sig.sar[b] * (1.0 + relative * jitter(rng));
        return static_cast<float>(std::max(v, 0.0));
      });
    }
  }

  const bool any_water = std::any_of(spec.regions.begin(), spec.regions.end(),
                                     [](const Region& r) { return r.kind == RegionKind::water; });
  if (any_water) {
    BitMask water(w, h);
    for (std::size_t i = 0; i < n; ++i) {
      const int o = owner[i];
      water.set_index(i, o >= 0 && spec.regions[o].kind == RegionKind::water);
    }
    scene.permanent_water = std::move(water);
  }

  scene.validate();
  return scene;
}

void to_json(json& j, const SyntheticSpec& spec) {
  j = json{{"scene_id", spec.scene_id},
           {"width", spec.width},
           {"height", spec.height},
           {"pixel_size_m", spec.pixel_size_m},
           {"seed", spec.seed},
           {"noise", spec.noise},
           {"optical", spec.optical},
           {"sar", spec.sar},
           {"label", spec.label ? json(std::string(to_string(*spec.label))) : json(nullptr)},
           {"acquisition_note", spec.acquisition_note}};
  j["regions"] = json::array();
  for (const auto& r : spec.regions) {
    j["regions"].push_back({{"kind", std::string(to_string(r.kind))},
                            {"x", r.x},
                            {"y", r.y},
                            {"width", r.width},
                            {"height", r.height}});
  }
}

void from_json(const json& j, SyntheticSpec& spec) {
  try {
    SyntheticSpec out;
    out.scene_id = j.value("scene_id", out.scene_id);
    out.width = j.value("width", out.width);
    out.height = j.value("height", out.height);
    out.pixel_size_m = j.value("pixel_size_m", out.pixel_size_m);
    out.seed = j.value("seed", out.seed);
    out.noise = j.value("noise", out.noise);
    out.optical = j.value("optical", out.optical);
    out.sar = j.value("sar", out.sar);
    out.acquisition_note = j.value("acquisition_note", out.acquisition_note);
    if (j.contains("label") && !j["label"].is_null()) {
      out.label = parse_event_type(j["label"].get<std::string>());
      if (!out.label) throw Error(ErrorCode::invalid_spec, "unknown label in synthetic spec");
    }
    for (const auto& r : j.value("regions", json::array())) {
      Region region;
      auto kind = parse_region_kind(r.at("kind").get<std::string>());
      if (!kind) throw Error(ErrorCode::invalid_spec, "unknown region kind " + r.at("kind").dump());
      region.kind = *kind;
      region.x = r.at("x").get<int>();
      region.y = r.at("y").get<int>();
      region.width = r.at("width").get<int>();
      region.height = r.at("height").get<int>();
      out.regions.push_back(region);
    }
    spec = std::move(out);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_spec, std::string("malformed synthetic spec: ") + e.what());
  }
}

}  // namespace eoa
