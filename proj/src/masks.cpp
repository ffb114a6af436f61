#include <algorithm>
#include <numeric>
#include <vector>

#include "eoagent/error.hpp"
#include "eoagent/raster.hpp"
#include "eoagent/spectral.hpp"

namespace eoa {

namespace {

void require_same_shape(const BitMask& a, const BitMask& b) {
  if (!a.same_shape(b)) {
    throw Error(ErrorCode::dimension_mismatch,
                "mask shapes differ: " + std::to_string(a.width()) + "x" +
                    std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                    "x" + std::to_string(b.height()));
  }
}

}  // namespace

BitMask::BitMask(int width, int height, bool fill)
    : width_(width), height_(height) {
  if (width < 0 || height < 0) {
    throw Error(ErrorCode::invalid_argument, "negative mask dimensions");
  }
  bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
               fill ? 1 : 0);
}

std::size_t BitMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

bool BitMask::subset_of(const BitMask& other) const {
  require_same_shape(*this, other);
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i] && !other.bits_[i]) return false;
  }
  return true;
}

BitMask BitMask::operator&(const BitMask& other) const {
  require_same_shape(*this, other);
  BitMask out(width_, height_);
  std::transform(bits_.begin(), bits_.end(), other.bits_.begin(), out.bits_.begin(),
                 [](std::uint8_t a, std::uint8_t b) -> std::uint8_t { return a & b; });
  return out;
}

BitMask BitMask::operator|(const BitMask& other) const {
  require_same_shape(*this, other);
  BitMask out(width_, height_);
  std::transform(bits_.begin(), bits_.end(), other.bits_.begin(), out.bits_.begin(),
                 [](std::uint8_t a, std::uint8_t b) -> std::uint8_t { return a | b; });
  return out;
}

BitMask BitMask::operator~() const {
  BitMask out(width_, height_);
  std::transform(bits_.begin(), bits_.end(), out.bits_.begin(),
                 [](std::uint8_t a) -> std::uint8_t { return a ^ 1u; });
  return out;
}

double mask_area_km2(const BitMask& mask, double pixel_size_m) {
  return static_cast<double>(mask.count()) * pixel_size_m * pixel_size_m / 1e6;
}

// Union-find over set pixels with 8-neighbour links.
std::size_t connected_components(const BitMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  const std::size_t n = mask.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});

  auto find = [&](std::size_t i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };
  auto unite = [&](std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.get(x, y)) continue;
      const std::size_t here = static_cast<std::size_t>(y) * w + x;
      // Previously visited neighbours: W, NW, N, NE.
      if (x > 0 && mask.get(x - 1, y)) unite(here, here - 1);
      if (y > 0) {
        const std::size_t up = here - static_cast<std::size_t>(w);
        if (x > 0 && mask.get(x - 1, y - 1)) unite(here, up - 1);
        if (mask.get(x, y - 1)) unite(here, up);
        if (x + 1 < w && mask.get(x + 1, y - 1)) unite(here, up + 1);
      }
    }
  }

  std::size_t roots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask[i] && find(i) == i) ++roots;
  }
  return roots;
}

}  // namespace eoa
