#pragma once

#include <filesystem>
#include <map>
#include <random>
#include <string>

#include "eoagent/error.hpp"
#include "eoagent/scene_store.hpp"

namespace testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("eoagent-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Scene whose bands are constant over the whole grid.
inline eoa::SceneBundle uniform_scene(int w, int h, const std::map<eoa::BandId, float>& values,
                                      double pixel_size_m = 20.0, const std::string& id = "uniform") {
  eoa::SceneBundle s;
  s.scene_id = id;
  s.width = w;
  s.height = h;
  s.pixel_size_m = pixel_size_m;
  for (const auto& [band, v] : values) {
    s.bands[band] = eoa::BandRaster{band, w, h, std::vector<float>(static_cast<std::size_t>(w) * h, v)};
  }
  return s;
}

inline void set_pixel(eoa::SceneBundle& s, eoa::BandId band, int x, int y, float v) {
  s.bands.at(band).values[static_cast<std::size_t>(y) * s.width + x] = v;
}

template <typename Fn>
eoa::ErrorCode error_code_of(Fn&& fn) {
  try {
    fn();
  } catch (const eoa::Error& e) {
    return e.code();
  }
  throw std::runtime_error("expected an eoa::Error");
}

}  // namespace testing

#define CHECK_ERROR_CODE(expr, expected) CHECK(::testing::error_code_of([&] { (void)(expr); }) == (expected))
