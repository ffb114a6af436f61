#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eoagent/raster.hpp"
#include "eoagent/scene_store.hpp"
#include "json.hpp"

namespace eoa {

// ---------------------------------------------------------------------------
// Spectral indices
// ---------------------------------------------------------------------------

enum class IndexKind : std::uint8_t { nhi_swir, nhi_swnir, mndwi, bai };

std::string_view to_string(IndexKind kind) noexcept;

struct IndexRaster {
  IndexKind kind = IndexKind::nhi_swir;
  int width = 0;
  int height = 0;
  std::vector<double> values;  // NaN where undefined
};

inline constexpr double kDefaultEps = 1e-6;

// (a - b) / (a + b); NaN when an input is NaN or |a + b| < eps.
inline double normalized_difference(double a, double b, double eps) noexcept {
  const double den = a + b;
  if (std::isnan(a) || std::isnan(b) || std::abs(den) < eps) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return (a - b) / den;
}

// Burned Area Index, 1 / ((0.1 - red)^2 + (0.06 - nir)^2).
inline double burned_area_index(double red, double nir, double eps) noexcept {
  if (std::isnan(red) || std::isnan(nir)) return std::numeric_limits<double>::quiet_NaN();
  const double dr = 0.1 - red;
  const double dn = 0.06 - nir;
  const double den = dr * dr + dn * dn;
  if (den < eps) return std::numeric_limits<double>::quiet_NaN();
  return 1.0 / den;
}

IndexRaster compute_nhi_swir(const SceneBundle& scene, double eps = kDefaultEps);
IndexRaster compute_nhi_swnir(const SceneBundle& scene, double eps = kDefaultEps);
IndexRaster compute_mndwi(const SceneBundle& scene, double eps = kDefaultEps);
IndexRaster compute_bai(const SceneBundle& scene, double eps = kDefaultEps);

// Pixels whose index is finite and strictly above threshold.
BitMask index_above(const IndexRaster& index, double threshold);

// ---------------------------------------------------------------------------
// Thresholds
// ---------------------------------------------------------------------------

struct ThresholdConfig {
  double nhi_swir_hot = 0.0;
  double nhi_swnir_hot = 0.0;
  double nhi_swir_relaxed = -0.05;
  double nhi_swnir_relaxed = -0.05;
  double mndwi_water = 0.0;
  double bai_burn = 100.0;
  double flood_fraction_min = 0.005;
  double fire_area_min_km2 = 0.01;
  double eps_denominator = kDefaultEps;
  int tile_size = 256;
  int tile_stride = 128;

  // Throws Error{invalid_config}; relaxed thresholds must not exceed strict ones.
  void validate() const;
};

void to_json(nlohmann::json& j, const ThresholdConfig& cfg);
// Missing keys keep their defaults; the result is validated.
void from_json(const nlohmann::json& j, ThresholdConfig& cfg);

// ---------------------------------------------------------------------------
// Masks and metrics
// ---------------------------------------------------------------------------

BitMask water_mask(const SceneBundle& scene, const ThresholdConfig& cfg);
// Strict NHI hotspots with water removed (active-fire index tool mask).
BitMask hotspot_mask(const SceneBundle& scene, const ThresholdConfig& cfg);
// Relaxed NHI candidates with water removed.
BitMask fire_candidate_mask(const SceneBundle& scene, const ThresholdConfig& cfg);
BitMask bai_mask(const SceneBundle& scene, const ThresholdConfig& cfg);

double mask_area_km2(const BitMask& mask, double pixel_size_m);
// 8-connected components of set pixels.
std::size_t connected_components(const BitMask& mask);

// ---------------------------------------------------------------------------
// Tiling
// ---------------------------------------------------------------------------

struct TileWindow {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  auto operator<=>(const TileWindow&) const = default;
};

// Sliding windows of side `tile` (clamped to the scene when smaller) stepping by
// `stride`; the last window per axis is shifted back to end on the scene edge.
// Row-major by origin. Throws Error{invalid_stride} unless 1 <= stride <= tile.
std::vector<TileWindow> tile_segment(int width, int height, int tile, int stride);

struct TileMask {
  TileWindow window;
  BitMask mask;
};

// Logical OR of overlapping tile predictions.
BitMask merge_tile_masks(int width, int height, std::span<const TileMask> tiles);

// ---------------------------------------------------------------------------
// Segmentation backends
// ---------------------------------------------------------------------------

// Full-scene feature planes handed to a segmenter, e.g. {B8, B11, B12}.
struct FeatureStack {
  int width = 0;
  int height = 0;
  std::vector<std::string> names;
  std::vector<std::vector<float>> planes;

  const std::vector<float>& plane(std::string_view name) const;
};

inline constexpr std::uint8_t kLabelBackground = 0;
inline constexpr std::uint8_t kLabelFire = 1;
inline constexpr std::uint8_t kLabelFlood = 1;
inline constexpr std::uint8_t kLabelPermanentWater = 2;

class SegmenterBackend {
 public:
  virtual ~SegmenterBackend() = default;

  virtual std::string backend_id() const = 0;
  // Whether segment() may be called from several threads at once.
  virtual bool concurrent_calls_ok() const { return true; }
  // Returns one class label per window pixel, row-major in window coordinates.
  virtual std::vector<std::uint8_t> segment(const SceneBundle& scene, const FeatureStack& features,
                                            const TileWindow& window) const = 0;
};

// Stand-in for the active-fire segmentation network: labels a pixel as fire
// when NHI_SWIR computed from the B12/B11 features exceeds the threshold.
class NhiFireSegmenter final : public SegmenterBackend {
 public:
  explicit NhiFireSegmenter(double threshold = 0.0, double eps = kDefaultEps)
      : threshold_(threshold), eps_(eps) {}

  std::string backend_id() const override { return "threshold-stand-in/nhi-swir"; }
  std::vector<std::uint8_t> segment(const SceneBundle& scene, const FeatureStack& features,
                                    const TileWindow& window) const override;

 private:
  double threshold_;
  double eps_;
};

// Stand-in for the three-class SAR flood network: dark VV backscatter is
// water; water inside the scene's permanent-water reference is labelled
// permanent water, everything else flood.
class BackscatterFloodSegmenter final : public SegmenterBackend {
 public:
  explicit BackscatterFloodSegmenter(double vv_water_max = 0.02) : vv_water_max_(vv_water_max) {}

  std::string backend_id() const override { return "threshold-stand-in/vv-backscatter"; }
  std::vector<std::uint8_t> segment(const SceneBundle& scene, const FeatureStack& features,
                                    const TileWindow& window) const override;

 private:
  double vv_water_max_;
};

FeatureStack fire_features(const SceneBundle& scene);
// VV, VH and VV/VH (NaN where VH is below eps or an input is NaN).
FeatureStack flood_features(const SceneBundle& scene, double eps = kDefaultEps);

// ---------------------------------------------------------------------------
// Detection tools
// ---------------------------------------------------------------------------

enum class ToolName : std::uint8_t { ml_fire, index_fire, burned_area, ml_flood };

std::string_view to_string(ToolName tool) noexcept;
std::optional<ToolName> parse_tool_name(std::string_view text) noexcept;

struct ToolResult {
  ToolName tool = ToolName::index_fire;
  bool detected = false;
  std::map<std::string, double> metrics;
  std::size_t mask_pixels = 0;
  double elapsed_ms = 0.0;
  std::optional<std::string> error;  // set when the tool could not run

  double metric(const std::string& key) const;
};

void to_json(nlohmann::json& j, const ToolResult& r);
void from_json(const nlohmann::json& j, ToolResult& r);

struct ToolOutput {
  ToolResult result;
  BitMask mask;
};

ToolOutput tool_index_fire(const SceneBundle& scene, const ThresholdConfig& cfg);
ToolOutput tool_ml_fire(const SceneBundle& scene, const SegmenterBackend& backend,
                        const ThresholdConfig& cfg);
ToolOutput tool_burned_area(const SceneBundle& scene, const ThresholdConfig& cfg);
ToolOutput tool_ml_flood(const SceneBundle& scene, const SegmenterBackend& backend,
                         const ThresholdConfig& cfg);

}  // namespace eoa
