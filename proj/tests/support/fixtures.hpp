#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "owl3d/geom.hpp"
#include "owl3d/rng.hpp"
#include "owl3d/sceneio.hpp"

namespace owl3d::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    const auto base = std::filesystem::temp_directory_path();
    CounterRng rng(static_cast<std::uint64_t>(reinterpret_cast<std::uintptr_t>(this)) ^ ++counter, tag);
    path_ = base / ("owl3d-" + tag + "-" + std::to_string(rng.next_u64() % 1000000000ULL));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

inline geom::Box3D random_box(CounterRng& rng, double spread = 3.0) {
  geom::Box3D b;
  b.cx = rng.uniform(-spread, spread);
  b.cy = rng.uniform(-spread, spread);
  b.cz = rng.uniform(-0.5, 0.5);
  b.l = rng.uniform(0.5, 4.0);
  b.w = rng.uniform(0.5, 2.5);
  b.h = rng.uniform(0.5, 2.0);
  b.yaw = geom::normalize_yaw(rng.uniform(-geom::kPi, geom::kPi));
  return b;
}

// Uniform points strictly inside the box.
inline geom::PointCloud points_inside(const geom::Box3D& b, std::size_t n, CounterRng& rng) {
  geom::PointCloud pc;
  for (std::size_t i = 0; i < n; ++i) {
    const geom::Vec3 local{rng.uniform(-0.45, 0.45) * b.l, rng.uniform(-0.45, 0.45) * b.w,
                           rng.uniform(-0.45, 0.45) * b.h};
    const auto w = geom::from_box_frame(b, local);
    pc.points.push_back({w.x, w.y, w.z, rng.uniform()});
  }
  return pc;
}

// Ground plane at z = -1.8 sampled on a jittered grid, kept well below any
// object box that rests on or above z = -1.7.
inline geom::PointCloud ground_points(CounterRng& rng, double extent, double step) {
  geom::PointCloud pc;
  for (double x = -extent; x <= extent; x += step)
    for (double y = -extent; y <= extent; y += step)
      pc.points.push_back({x + rng.uniform(-0.1, 0.1), y + rng.uniform(-0.1, 0.1), -1.8, rng.uniform()});
  return pc;
}

inline void append(geom::PointCloud& dst, const geom::PointCloud& src) {
  dst.points.insert(dst.points.end(), src.points.begin(), src.points.end());
}

// Car-sized box resting on the ground (bottom at z = -1.6).
inline geom::Box3D car_box(double x, double y, double yaw) {
  return {x, y, -1.6 + 0.75, 3.9, 1.6, 1.5, geom::normalize_yaw(yaw)};
}

// Relative path -> file bytes for every regular file under root.
inline std::map<std::string, std::string> snapshot_tree(const std::filesystem::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    files[std::filesystem::relative(e.path(), root).generic_string()] = buf.str();
  }
  return files;
}

}  // namespace owl3d::testing
