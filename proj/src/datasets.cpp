#include "eoagent/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "eoagent/error.hpp"

namespace fs = std::filesystem;

namespace eoa {

namespace {

SyntheticSpec exemplar_base(const char* id, std::uint64_t seed, EventType label) {
  SyntheticSpec spec;
  spec.scene_id = id;
  spec.width = 512;
  spec.height = 512;
  spec.pixel_size_m = 20.0;
  spec.seed = seed;
  spec.label = label;
  return spec;
}

std::string numbered(const char* prefix, std::size_t i) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%03zu", prefix, i);
  return buf;
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

Region place(std::mt19937_64& rng, RegionKind kind, int w, int h, int scene_w, int scene_h) {
  return Region{kind, uniform_int(rng, 0, scene_w - w), uniform_int(rng, 0, scene_h - h), w, h};
}

// Active fire block with a burn scar directly below it.
void add_wildfire(std::mt19937_64& rng, SyntheticSpec& spec) {
  // Fire fronts grow with the scene so the early-warning grid still resolves them.
  const int fw = uniform_int(rng, std::max(12, spec.width / 24), std::max(24, spec.width / 12));
  const int fh = uniform_int(rng, std::max(12, spec.height / 24), std::max(24, spec.height / 12));
  const int sh = uniform_int(rng, 8, 24);
  Region fire = place(rng, RegionKind::fire, fw, fh + sh, spec.width, spec.height);
  spec.regions.push_back(Region{RegionKind::burn_scar, fire.x, fire.y + fh, fw, sh});
  fire.height = fh;
  spec.regions.push_back(fire);
}

void add_flood(std::mt19937_64& rng, SyntheticSpec& spec) {
  const int w = uniform_int(rng, spec.width / 3, spec.width * 2 / 3);
  const int h = uniform_int(rng, spec.height / 3, spec.height * 2 / 3);
  spec.regions.push_back(place(rng, RegionKind::flood, w, h, spec.width, spec.height));
}

}  // namespace

SyntheticSpec active_wildfire_exemplar(std::uint64_t seed) {
  auto spec = exemplar_base("exemplar_active_wildfire", seed, EventType::wildfire);
  // 75 x 59 = 4425 px of fire; the scar below adds 345 x 285 = 98325 px of burn.
  spec.regions.push_back(Region{RegionKind::fire, 100, 100, 75, 59});
  spec.regions.push_back(Region{RegionKind::burn_scar, 100, 159, 345, 285});
  spec.acquisition_note = "active wildfire with adjacent burn scar";
  return spec;
}

SyntheticSpec flood_exemplar(std::uint64_t seed) {
  auto spec = exemplar_base("exemplar_flood", seed, EventType::flood);
  spec.regions.push_back(Region{RegionKind::flood, 100, 150, 310, 205});  // 63550 px
  spec.acquisition_note = "riverine flood";
  return spec;
}

SyntheticSpec past_burn_exemplar(std::uint64_t seed) {
  auto spec = exemplar_base("exemplar_past_burn", seed, EventType::none);
  spec.regions.push_back(Region{RegionKind::burn_scar, 80, 80, 335, 334});  // 111890 px
  spec.regions.push_back(Region{RegionKind::burn_scar, 80, 414, 185, 1});   // +185 px
  spec.acquisition_note = "burn scar without active fire";
  return spec;
}

std::vector<SyntheticSpec> mixed_dataset_specs(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<SyntheticSpec> specs;
  specs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    SyntheticSpec spec;
    spec.scene_id = numbered("scene_", i);
    spec.width = uniform_int(rng, 8, 20) * 16;
    spec.height = uniform_int(rng, 8, 20) * 16;
    spec.seed = rng();
    switch (i % 3) {
      case 0:
        spec.label = EventType::none;
        if (uniform_int(rng, 0, 1) == 1) {
          // Permanent lake well below the climatological water fraction.
          const int side = std::max(4, static_cast<int>(std::sqrt(spec.width * spec.height * 0.01)));
          spec.regions.push_back(place(rng, RegionKind::water, side, side, spec.width, spec.height));
        }
        break;
      case 1:
        spec.label = EventType::wildfire;
        add_wildfire(rng, spec);
        break;
      default:
        spec.label = EventType::flood;
        add_flood(rng, spec);
        break;
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

std::vector<SyntheticSpec> two_regime_dataset_specs(std::size_t no_event, std::size_t event, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<SyntheticSpec> specs;
  specs.reserve(no_event + event);
  for (std::size_t i = 0; i < no_event; ++i) {
    SyntheticSpec spec;
    spec.scene_id = numbered("quiet_", i);
    spec.width = spec.height = uniform_int(rng, 12, 24) * 16;
    spec.seed = rng();
    spec.label = EventType::none;
    specs.push_back(std::move(spec));
  }
  for (std::size_t i = 0; i < event; ++i) {
    SyntheticSpec spec;
    spec.scene_id = numbered("event_", i);
    spec.width = spec.height = uniform_int(rng, 20, 40) * 16;
    spec.seed = rng();
    if (i % 2 == 0) {
      spec.label = EventType::wildfire;
      add_wildfire(rng, spec);
    } else {
      spec.label = EventType::flood;
      add_flood(rng, spec);
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

DatasetManifest write_synthetic_dataset(const std::vector<SyntheticSpec>& specs, const fs::path& dir) {
  DatasetManifest manifest;
  manifest.base_dir = dir;
  for (const auto& spec : specs) {
    save_scene(make_synthetic_scene(spec), dir / spec.scene_id);
    manifest.entries.push_back(ManifestEntry{spec.scene_id, spec.scene_id, spec.label});
  }
  manifest.validate();
  save_manifest(manifest, dir / "manifest.json");
  return manifest;
}

}  // namespace eoa
