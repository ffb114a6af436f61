#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace eoa {

// Sentinel-2 MSI optical bands and Sentinel-1 SAR polarizations.
enum class BandId : std::uint8_t { B2, B3, B4, B8, B11, B12, VV, VH };

inline constexpr std::array<BandId, 8> kAllBands = {
    BandId::B2, BandId::B3, BandId::B4, BandId::B8,
    BandId::B11, BandId::B12, BandId::VV, BandId::VH};

std::string_view band_name(BandId band) noexcept;
// Physical meaning, e.g. "SWIR1 (1610 nm)".
std::string_view band_description(BandId band) noexcept;
std::optional<BandId> parse_band(std::string_view name) noexcept;
constexpr bool is_optical(BandId band) noexcept {
  return band != BandId::VV && band != BandId::VH;
}

enum class EventType : std::uint8_t { wildfire, flood, none };

std::string_view to_string(EventType event) noexcept;
std::optional<EventType> parse_event_type(std::string_view text) noexcept;

// Row-major float grid for one band. Optical values are surface reflectance,
// SAR values linear backscatter. NaN marks nodata.
struct BandRaster {
  BandId band = BandId::B2;
  int width = 0;
  int height = 0;
  std::vector<float> values;

  std::size_t size() const noexcept { return values.size(); }
  float at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

// Boolean raster. Stored one byte per pixel so it can be handed out as a span.
class BitMask {
 public:
  BitMask() = default;
  BitMask(int width, int height, bool fill = false);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return bits_.size(); }

  bool get(int x, int y) const { return bits_[index(x, y)] != 0; }
  void set(int x, int y, bool value = true) { bits_[index(x, y)] = value ? 1 : 0; }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set_index(std::size_t i, bool value) { bits_[i] = value ? 1 : 0; }

  const std::vector<std::uint8_t>& bytes() const noexcept { return bits_; }

  std::size_t count() const noexcept;
  bool empty_mask() const noexcept { return count() == 0; }
  bool same_shape(const BitMask& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }
  // True when every set pixel of *this is also set in other.
  bool subset_of(const BitMask& other) const;

  BitMask operator&(const BitMask& other) const;
  BitMask operator|(const BitMask& other) const;
  BitMask operator~() const;

  bool operator==(const BitMask& other) const = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

}  // namespace eoa
