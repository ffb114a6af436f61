#include <algorithm>

#include "eoagent/error.hpp"
#include "eoagent/spectral.hpp"

namespace eoa {

namespace {

std::vector<int> axis_origins(int extent, int tile, int stride) {
  if (extent <= tile) return {0};
  std::vector<int> origins;
  for (int o = 0; o + tile < extent; o += stride) origins.push_back(o);
  origins.push_back(extent - tile);
  std::sort(origins.begin(), origins.end());
  origins.erase(std::unique(origins.begin(), origins.end()), origins.end());
  return origins;
}

}  // namespace

std::vector<TileWindow> tile_segment(int width, int height, int tile, int stride) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::invalid_argument, "tile_segment needs positive scene dimensions");
  }
  if (tile < 1 || stride < 1 || stride > tile) {
    throw Error(ErrorCode::invalid_stride, "stride " + std::to_string(stride) +
                                               " outside [1, " + std::to_string(tile) + "]");
  }
  const auto xs = axis_origins(width, tile, stride);
  const auto ys = axis_origins(height, tile, stride);
  const int tw = std::min(tile, width);
  const int th = std::min(tile, height);

  std::vector<TileWindow> windows;
  windows.reserve(xs.size() * ys.size());
  for (int y : ys) {
    for (int x : xs) windows.push_back({x, y, tw, th});
  }
  return windows;
}

BitMask merge_tile_masks(int width, int height, std::span<const TileMask> tiles) {
  BitMask merged(width, height);
  for (const auto& t : tiles) {
    const auto& w = t.window;
    if (w.x < 0 || w.y < 0 || w.width < 1 || w.height < 1 || w.x + w.width > width ||
        w.y + w.height > height) {
      throw Error(ErrorCode::dimension_mismatch, "tile window falls outside the scene");
    }
    if (t.mask.width() != w.width || t.mask.height() != w.height) {
      throw Error(ErrorCode::dimension_mismatch, "tile mask does not match its window");
    }
    for (int y = 0; y < w.height; ++y) {
      for (int x = 0; x < w.width; ++x) {
        if (t.mask.get(x, y)) merged.set(w.x + x, w.y + y);
      }
    }
  }
  return merged;
}

}  // namespace eoa
