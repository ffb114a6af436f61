#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "eoagent/scene_store.hpp"

namespace eoa {

// Reference scenes at 512x512, 20 m pixels (0.0004 km2 per pixel), shaped after
// the three reference specialist reports.
SyntheticSpec active_wildfire_exemplar(std::uint64_t seed = 1);  // 1.77 km2 active fire, 41.1 km2 burned
SyntheticSpec flood_exemplar(std::uint64_t seed = 2);            // 25.42 km2 flood
SyntheticSpec past_burn_exemplar(std::uint64_t seed = 3);        // 44.83 km2 burn scar, no active fire

// Labelled scenes cycling none, wildfire, flood, with sizes between 128 and
// 320 pixels and randomly placed regions. Some no-event scenes carry a small
// permanent lake.
std::vector<SyntheticSpec> mixed_dataset_specs(std::size_t count, std::uint64_t seed);

// Two size regimes: no-event scenes of 192..384 pixels per side and event
// scenes (alternating wildfire and flood) of 320..640 pixels per side.
std::vector<SyntheticSpec> two_regime_dataset_specs(std::size_t no_event, std::size_t event, std::uint64_t seed);

// Writes every scene to dir/<scene_id>/ and dir/manifest.json; returns the
// manifest. Throws Error{io_failure}.
DatasetManifest write_synthetic_dataset(const std::vector<SyntheticSpec>& specs, const std::filesystem::path& dir);

}  // namespace eoa
