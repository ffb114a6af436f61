#include "eoagent/scene_store.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>

#include "eoagent/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace eoa {

std::string_view band_name(BandId band) noexcept {
  switch (band) {
    case BandId::B2: return "B2";
    case BandId::B3: return "B3";
    case BandId::B4: return "B4";
    case BandId::B8: return "B8";
    case BandId::B11: return "B11";
    case BandId::B12: return "B12";
    case BandId::VV: return "VV";
    case BandId::VH: return "VH";
  }
  return "?";
}

std::string_view band_description(BandId band) noexcept {
  switch (band) {
    case BandId::B2: return "Blue (490 nm)";
    case BandId::B3: return "Green (560 nm)";
    case BandId::B4: return "Red (665 nm)";
    case BandId::B8: return "NIR (842 nm)";
    case BandId::B11: return "SWIR1 (1610 nm)";
    case BandId::B12: return "SWIR2 (2190 nm)";
    case BandId::VV: return "C-band SAR, VV polarization";
    case BandId::VH: return "C-band SAR, VH polarization";
  }
  return "?";
}

std::optional<BandId> parse_band(std::string_view name) noexcept {
  for (BandId b : kAllBands) {
    if (band_name(b) == name) return b;
  }
  return std::nullopt;
}

std::string_view to_string(EventType event) noexcept {
  switch (event) {
    case EventType::wildfire: return "wildfire";
    case EventType::flood: return "flood";
    case EventType::none: return "none";
  }
  return "none";
}

std::optional<EventType> parse_event_type(std::string_view text) noexcept {
  if (text == "wildfire") return EventType::wildfire;
  if (text == "flood") return EventType::flood;
  if (text == "none") return EventType::none;
  return std::nullopt;
}

const BandRaster& SceneBundle::band(BandId id) const {
  auto it = bands.find(id);
  if (it == bands.end()) {
    throw Error(ErrorCode::missing_band, "scene '" + scene_id + "' has no band " +
                                             std::string(band_name(id)));
  }
  return it->second;
}

void SceneBundle::validate() const {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::invalid_value, "scene '" + scene_id + "' has non-positive dimensions");
  }
  if (!(pixel_size_m > 0.0) || !std::isfinite(pixel_size_m)) {
    throw Error(ErrorCode::invalid_value, "scene '" + scene_id + "' pixel_size_m must be > 0");
  }
  for (const auto& [id, raster] : bands) {
    const std::string name(band_name(id));
    if (raster.band != id) {
      throw Error(ErrorCode::invalid_value, "band entry " + name + " carries a different band id");
    }
    if (raster.width != width || raster.height != height) {
      throw Error(ErrorCode::band_size_mismatch,
                  "band " + name + " is " + std::to_string(raster.width) + "x" +
                      std::to_string(raster.height) + ", scene is " + std::to_string(width) +
                      "x" + std::to_string(height));
    }
    if (raster.values.size() != pixel_count()) {
      throw Error(ErrorCode::band_size_mismatch,
                  "band " + name + " holds " + std::to_string(raster.values.size()) +
                      " values, expected " + std::to_string(pixel_count()));
    }
    const bool optical = is_optical(id);
    for (float v : raster.values) {
      if (std::isnan(v)) continue;
      const bool ok = optical ? (v >= 0.0f && v <= 1.5f) : (v >= 0.0f && std::isfinite(v));
      if (!ok) {
        throw Error(ErrorCode::invalid_value,
                    "band " + name + " holds out-of-range value " + std::to_string(v));
      }
    }
  }
  if (permanent_water && (permanent_water->width() != width || permanent_water->height() != height)) {
    throw Error(ErrorCode::band_size_mismatch, "permanent-water mask shape differs from scene");
  }
}

bool bitwise_equal(const SceneBundle& a, const SceneBundle& b) {
  if (a.scene_id != b.scene_id || a.width != b.width || a.height != b.height ||
      a.pixel_size_m != b.pixel_size_m || a.label != b.label ||
      a.acquisition_note != b.acquisition_note || a.bands.size() != b.bands.size() ||
      a.permanent_water != b.permanent_water) {
    return false;
  }
  for (const auto& [id, ra] : a.bands) {
    auto it = b.bands.find(id);
    if (it == b.bands.end()) return false;
    const auto& rb = it->second;
    if (ra.width != rb.width || ra.height != rb.height || ra.values.size() != rb.values.size()) {
      return false;
    }
    if (std::memcmp(ra.values.data(), rb.values.data(), ra.values.size() * sizeof(float)) != 0) {
      return false;
    }
  }
  return true;
}

double scene_area_km2(const SceneBundle& scene) noexcept {
  return static_cast<double>(scene.width) * static_cast<double>(scene.height) *
         scene.pixel_size_m * scene.pixel_size_m / 1e6;
}

double scene_area_km2(const SceneMeta& meta) noexcept {
  return static_cast<double>(meta.width) * static_cast<double>(meta.height) *
         meta.pixel_size_m * meta.pixel_size_m / 1e6;
}

// ---------------------------------------------------------------------------
// On-disk format
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kMetaFile = "meta.json";
constexpr const char* kPermanentWaterFile = "permanent_water.bin";

std::uint32_t to_little(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  }
}

void write_floats(const fs::path& file, const std::vector<float>& values) {
  std::vector<std::uint32_t> words(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    words[i] = to_little(std::bit_cast<std::uint32_t>(values[i]));
  }
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_failure, "cannot open " + file.string() + " for writing");
  out.write(reinterpret_cast<const char*>(words.data()),
            static_cast<std::streamsize>(words.size() * sizeof(std::uint32_t)));
  if (!out) throw Error(ErrorCode::io_failure, "write failed: " + file.string());
}

std::vector<char> read_bytes(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_failure, "cannot open " + file.string());
  return std::vector<char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void check_payload_size(const fs::path& file, std::size_t actual, std::size_t expected) {
  if (actual < expected) {
    throw Error(ErrorCode::truncated_band_file,
                file.string() + " holds " + std::to_string(actual) + " bytes, expected " +
                    std::to_string(expected));
  }
  if (actual > expected) {
    throw Error(ErrorCode::band_size_mismatch,
                file.string() + " holds " + std::to_string(actual) + " bytes, expected " +
                    std::to_string(expected));
  }
}

std::vector<float> read_floats(const fs::path& file, std::size_t count) {
  const auto bytes = read_bytes(file);
  check_payload_size(file, bytes.size(), count * sizeof(float));
  std::vector<float> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t w;
    std::memcpy(&w, bytes.data() + i * sizeof(w), sizeof(w));
    values[i] = std::bit_cast<float>(to_little(w));
  }
  return values;
}

template <typename T>
T require_field(const json& meta, const char* key, const fs::path& file) {
  if (!meta.contains(key)) {
    throw Error(ErrorCode::missing_metadata, file.string() + ": missing field '" + key + "'");
  }
  try {
    return meta.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::missing_metadata,
                file.string() + ": field '" + key + "' has the wrong type: " + e.what());
  }
}

}  // namespace

SceneMeta read_scene_meta(const fs::path& dir) {
  const fs::path file = dir / kMetaFile;
  if (!fs::exists(file)) {
    throw Error(ErrorCode::missing_metadata, file.string() + " not found");
  }
  json meta;
  try {
    std::ifstream in(file);
    meta = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::missing_metadata, file.string() + ": " + e.what());
  }
  if (!meta.is_object()) {
    throw Error(ErrorCode::missing_metadata, file.string() + ": not a JSON object");
  }

  SceneMeta out;
  out.scene_id = require_field<std::string>(meta, "scene_id", file);
  out.width = require_field<int>(meta, "width", file);
  out.height = require_field<int>(meta, "height", file);
  out.pixel_size_m = require_field<double>(meta, "pixel_size_m", file);
  if (meta.contains("label") && !meta["label"].is_null()) {
    const auto text = require_field<std::string>(meta, "label", file);
    out.label = parse_event_type(text);
    if (!out.label) {
      throw Error(ErrorCode::missing_metadata, file.string() + ": unknown label '" + text + "'");
    }
  }
  out.acquisition_note = meta.value("acquisition_note", std::string{});
  out.permanent_water = meta.value("permanent_water_mask", false);
  for (const auto& name : require_field<std::vector<std::string>>(meta, "bands", file)) {
    auto band = parse_band(name);
    if (!band) {
      throw Error(ErrorCode::unknown_band_id, file.string() + ": unknown band id '" + name + "'");
    }
    out.bands.push_back(*band);
  }
  if (out.width <= 0 || out.height <= 0 || !(out.pixel_size_m > 0.0)) {
    throw Error(ErrorCode::invalid_value,
                file.string() + ": width, height and pixel_size_m must be positive");
  }
  return out;
}

SceneBundle load_scene(const fs::path& dir) {
  const SceneMeta meta = read_scene_meta(dir);

  SceneBundle scene;
  scene.scene_id = meta.scene_id;
  scene.width = meta.width;
  scene.height = meta.height;
  scene.pixel_size_m = meta.pixel_size_m;
  scene.label = meta.label;
  scene.acquisition_note = meta.acquisition_note;

  const std::size_t n = scene.pixel_count();
  for (BandId id : meta.bands) {
    const fs::path file = dir / (std::string(band_name(id)) + ".bin");
    BandRaster raster;
    raster.band = id;
    raster.width = meta.width;
    raster.height = meta.height;
    raster.values = read_floats(file, n);
    scene.bands.emplace(id, std::move(raster));
  }
  if (meta.permanent_water) {
    const fs::path file = dir / kPermanentWaterFile;
    const auto bytes = read_bytes(file);
    check_payload_size(file, bytes.size(), n);
    BitMask mask(meta.width, meta.height);
    for (std::size_t i = 0; i < n; ++i) mask.set_index(i, bytes[i] != 0);
    scene.permanent_water = std::move(mask);
  }
  scene.validate();
  return scene;
}

void save_scene(const SceneBundle& scene, const fs::path& dir) {
  scene.validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io_failure, "cannot create " + dir.string() + ": " + ec.message());

  json meta;
  meta["schema_version"] = kSceneSchemaVersion;
  meta["scene_id"] = scene.scene_id;
  meta["width"] = scene.width;
  meta["height"] = scene.height;
  meta["pixel_size_m"] = scene.pixel_size_m;
  meta["label"] = scene.label ? json(std::string(to_string(*scene.label))) : json(nullptr);
  meta["acquisition_note"] = scene.acquisition_note;
  meta["permanent_water_mask"] = scene.permanent_water.has_value();
  json band_list = json::array();
  for (const auto& [id, raster] : scene.bands) band_list.push_back(std::string(band_name(id)));
  meta["bands"] = band_list;

  {
    const fs::path file = dir / kMetaFile;
    std::ofstream out(file, std::ios::trunc);
    if (!out) throw Error(ErrorCode::io_failure, "cannot open " + file.string() + " for writing");
    out << meta.dump(2) << '\n';
    if (!out) throw Error(ErrorCode::io_failure, "write failed: " + file.string());
  }
  for (const auto& [id, raster] : scene.bands) {
    write_floats(dir / (std::string(band_name(id)) + ".bin"), raster.values);
  }
  if (scene.permanent_water) {
    const fs::path file = dir / kPermanentWaterFile;
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io_failure, "cannot open " + file.string() + " for writing");
    const auto& bytes = scene.permanent_water->bytes();
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::io_failure, "write failed: " + file.string());
  }
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

const ManifestEntry* DatasetManifest::find(const std::string& scene_id) const {
  auto it = std::find_if(entries.begin(), entries.end(),
                         [&](const ManifestEntry& e) { return e.scene_id == scene_id; });
  return it == entries.end() ? nullptr : &*it;
}

fs::path DatasetManifest::resolve(const ManifestEntry& entry) const {
  fs::path p(entry.path);
  return p.is_absolute() ? p : base_dir / p;
}

void DatasetManifest::validate() const {
  std::set<std::string> seen;
  for (const auto& e : entries) {
    if (e.scene_id.empty()) throw Error(ErrorCode::invalid_value, "manifest entry with empty scene_id");
    if (!seen.insert(e.scene_id).second) {
      throw Error(ErrorCode::invalid_value, "duplicate scene_id in manifest: " + e.scene_id);
    }
  }
}

DatasetManifest load_manifest(const fs::path& file) {
  json doc;
  {
    std::ifstream in(file);
    if (!in) throw Error(ErrorCode::io_failure, "cannot open manifest " + file.string());
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::missing_metadata, file.string() + ": " + e.what());
    }
  }
  DatasetManifest manifest;
  manifest.base_dir = file.parent_path();
  manifest.version = require_field<int>(doc, "version", file);
  for (const auto& item : require_field<json>(doc, "entries", file)) {
    ManifestEntry entry;
    entry.scene_id = require_field<std::string>(item, "scene_id", file);
    entry.path = require_field<std::string>(item, "path", file);
    if (item.contains("label") && !item["label"].is_null()) {
      const auto text = item["label"].get<std::string>();
      entry.label = parse_event_type(text);
      if (!entry.label) {
        throw Error(ErrorCode::missing_metadata, file.string() + ": unknown label '" + text + "'");
      }
    }
    manifest.entries.push_back(std::move(entry));
  }
  manifest.validate();
  return manifest;
}

void save_manifest(const DatasetManifest& manifest, const fs::path& file) {
  manifest.validate();
  json doc;
  doc["version"] = manifest.version;
  doc["entries"] = json::array();
  for (const auto& e : manifest.entries) {
    doc["entries"].push_back({{"scene_id", e.scene_id},
                              {"path", e.path},
                              {"label", e.label ? json(std::string(to_string(*e.label))) : json(nullptr)}});
  }
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_failure, "cannot open " + file.string() + " for writing");
  out << doc.dump(2) << '\n';
}

}  // namespace eoa
