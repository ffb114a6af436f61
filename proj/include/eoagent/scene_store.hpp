#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eoagent/raster.hpp"
#include "json.hpp"

namespace eoa {

inline constexpr int kSceneSchemaVersion = 1;
inline constexpr int kManifestVersion = 1;

// Multiband scene: the unit of work flowing through the pipeline.
// Immutable after load; share as std::shared_ptr<const SceneBundle>.
struct SceneBundle {
  std::string scene_id;
  int width = 0;
  int height = 0;
  double pixel_size_m = 0.0;
  std::optional<EventType> label;
  std::string acquisition_note;
  std::map<BandId, BandRaster> bands;
  // Optional permanent-water reference used by the flood segmenter to keep
  // lakes and rivers out of the flooded class.
  std::optional<BitMask> permanent_water;

  bool has_band(BandId band) const { return bands.count(band) != 0; }
  // Throws Error{missing_band} when absent.
  const BandRaster& band(BandId band) const;
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }

  // Checks every structural invariant; throws Error on the first violation.
  void validate() const;
};

// Bit-level comparison (NaN payloads included).
bool bitwise_equal(const SceneBundle& a, const SceneBundle& b);

// Scene geometry read from meta.json without touching band payloads.
struct SceneMeta {
  std::string scene_id;
  int width = 0;
  int height = 0;
  double pixel_size_m = 0.0;
  std::optional<EventType> label;
  std::string acquisition_note;
  std::vector<BandId> bands;
  bool permanent_water = false;
};

SceneMeta read_scene_meta(const std::filesystem::path& dir);
SceneBundle load_scene(const std::filesystem::path& dir);
void save_scene(const SceneBundle& scene, const std::filesystem::path& dir);

double scene_area_km2(const SceneBundle& scene) noexcept;
double scene_area_km2(const SceneMeta& meta) noexcept;

struct ManifestEntry {
  std::string scene_id;
  std::string path;  // relative paths resolve against the manifest directory
  std::optional<EventType> label;
};

struct DatasetManifest {
  int version = kManifestVersion;
  std::vector<ManifestEntry> entries;
  std::filesystem::path base_dir;

  const ManifestEntry* find(const std::string& scene_id) const;
  std::filesystem::path resolve(const ManifestEntry& entry) const;
  void validate() const;
};

DatasetManifest load_manifest(const std::filesystem::path& file);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& file);

// Synthetic scene generator used by tests and the benchmark harness.
enum class RegionKind : std::uint8_t { fire, burn_scar, water, flood, nodata };

std::string_view to_string(RegionKind kind) noexcept;

struct Region {
  RegionKind kind = RegionKind::fire;
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
};

struct SyntheticSpec {
  std::string scene_id = "synthetic";
  int width = 256;
  int height = 256;
  double pixel_size_m = 20.0;
  std::uint64_t seed = 0;
  // Uniform reflectance jitter amplitude; SAR gets +-25x this, relative.
  double noise = 0.002;
  bool optical = true;
  bool sar = true;
  std::vector<Region> regions;  // painted in order, later regions win
  std::optional<EventType> label;
  std::string acquisition_note = "synthetic";
};

SceneBundle make_synthetic_scene(const SyntheticSpec& spec);

void to_json(nlohmann::json& j, const SyntheticSpec& spec);
void from_json(const nlohmann::json& j, SyntheticSpec& spec);

}  // namespace eoa
