#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "owl3d/geom.hpp"
#include "owl3d/sceneio.hpp"

namespace owl3d::augment {

inline constexpr std::size_t kDefaultMinPoints = 5;
inline constexpr std::size_t kDefaultSampleNumber = 20;

// One extracted object. `points` are in the box frame: the box centered at the
// origin with yaw 0 contains all of them.
struct BankEntry {
  std::string class_label;
  geom::Box3D box;  // box as found in the source scene
  geom::PointCloud points;
  std::string source_scene;
  std::size_t num_points = 0;
  bool resized = false;

  geom::Box3D local_box() const;
  // Places the object with its box centered at `center` and rotated to `yaw`.
  geom::TransformedObject materialize(const geom::Vec3& center, double yaw) const;

  friend bool operator==(const BankEntry&, const BankEntry&) = default;
};

struct ObjectBank {
  std::vector<BankEntry> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }

  friend bool operator==(const ObjectBank&, const ObjectBank&) = default;
};

struct SizePool {
  std::vector<geom::Dims> dims;
};

struct Placement {
  geom::Vec3 center;
  double yaw = 0.0;

  friend bool operator==(const Placement&, const Placement&) = default;
};

struct LocationPool {
  std::vector<Placement> placements;
};

ObjectBank build_bank(const std::vector<sceneio::SceneRecord>& scenes,
                      const std::set<std::string>& classes,
                      std::size_t min_points = kDefaultMinPoints);

// Averages 8-bit RGB into a [0, 1] intensity. Throws std::invalid_argument on
// channels outside [0, 255].
double rgb_to_intensity(int r, int g, int b);

// Reads whitespace-separated "x y z r g b" rows (colored indoor scans) into a
// cloud with averaged intensity.
geom::PointCloud cloud_from_xyzrgb(std::string_view text);

SizePool size_pool_from_scenes(const std::vector<sceneio::SceneRecord>& scenes,
                               const std::set<std::string>& classes);
LocationPool location_pool_from_scenes(const std::vector<sceneio::SceneRecord>& scenes,
                                       const std::set<std::string>& classes);

// Even indices are kept, odd indices are resized to a pool size drawn with the
// seeded generator. Throws std::invalid_argument on an empty pool.
ObjectBank multi_size_mix(const ObjectBank& bank, const SizePool& pool, std::uint64_t seed);

struct PasteResult {
  sceneio::SceneRecord scene;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  // Indices into the output scene's annotations of the objects added here.
  std::vector<std::size_t> pasted_annotations;
  std::vector<std::size_t> pasted_bank_entries;
};

// Copy-pastes up to `sample_number` bank objects into the scene. Each drawn
// entry takes one unused placement; a candidate whose BEV footprint overlaps
// any annotated or previously pasted box is dropped.
PasteResult paste_samples(const sceneio::SceneRecord& scene, const ObjectBank& bank,
                          const std::string& class_label, std::size_t sample_number,
                          const LocationPool& locations, std::uint64_t seed,
                          std::string_view stream_tag = "paste");

// ---- persistence: <dir>/index.json + <dir>/points/<i>.bin ---------------

void save_bank(const std::filesystem::path& dir, const ObjectBank& bank);
ObjectBank load_bank(const std::filesystem::path& dir);
// Fingerprint of the persisted representation (index + blobs).
std::uint64_t bank_fingerprint(const ObjectBank& bank);

}  // namespace owl3d::augment
