#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "owl3d/bank_augment.hpp"
#include "owl3d/sceneio.hpp"

namespace owl3d::bench {

inline constexpr std::size_t kDefaultSamplesPerScene = 1;
inline constexpr double kDefaultRangeLo = 0.0;
inline constexpr double kDefaultRangeHi = 50.0;

// Ids of scenes holding at least one `target_class` object whose center lies
// within [lo, hi] meters of the sensor origin.
std::vector<std::string> select_scenes(const std::vector<sceneio::SceneRecord>& scenes,
                                       const std::string& target_class, double lo, double hi);

struct SyntheticScene {
  sceneio::SceneRecord record;
  std::size_t removed_objects = 0;
  std::size_t removed_points = 0;
  std::size_t accepted = 0;
  std::vector<std::size_t> bank_entries;
  // Set when no object could be inserted.
  bool excluded = false;
};

// Strips every annotated object (and the points inside it) and pastes
// `samples_per_scene` bank objects labelled `unseen_label`. Placements come
// from the scene's own removed boxes first, then from `donor_locations`.
SyntheticScene build_synthetic_scene(const sceneio::SceneRecord& scene,
                                     const augment::ObjectBank& bank,
                                     std::size_t samples_per_scene,
                                     const augment::LocationPool& donor_locations,
                                     std::uint64_t seed, const std::string& unseen_label);

struct SynthParams {
  std::string name = "synthetic-ood";
  std::uint64_t seed = 0;
  std::size_t samples_per_scene = kDefaultSamplesPerScene;
  double range_lo = kDefaultRangeLo;
  double range_hi = kDefaultRangeHi;
  std::string unseen_label = "Unseen";
  std::set<std::string> donor_classes = {"Car", "Pedestrian", "Cyclist"};
};

struct InsertedObject {
  sceneio::GtObject object;
  std::size_t bank_entry = 0;
};

struct ManifestScene {
  std::string scene_id;
  std::vector<InsertedObject> inserted;
};

struct ExcludedScene {
  std::string scene_id;
  std::string reason;
};

struct BenchmarkManifest {
  SynthParams params;
  std::string bank_fingerprint;   // 16 hex digits
  std::string input_fingerprint;  // 16 hex digits over the input scenes
  std::vector<ManifestScene> scenes;
  std::vector<ExcludedScene> excluded;

  std::vector<std::string> scene_ids() const;
};

std::string encode_manifest(const BenchmarkManifest& manifest);
BenchmarkManifest decode_manifest(std::string_view json_text);
BenchmarkManifest read_manifest(const std::filesystem::path& path);

std::string fingerprint_hex(std::uint64_t h);
std::uint64_t scenes_fingerprint(const std::vector<sceneio::SceneRecord>& scenes);

// Generates every scene, keeps those with an inserted object inside the
// configured range, and writes manifest.json, clouds/<id>.bin and
// annotations/<id>.json under out_dir. Output bytes depend only on
// (scenes, bank, params), never on `threads`.
BenchmarkManifest freeze_benchmark(const std::vector<sceneio::SceneRecord>& scenes,
                                   const augment::ObjectBank& bank, const SynthParams& params,
                                   const std::filesystem::path& out_dir, std::size_t threads = 1);

// Re-runs generation from a stored manifest. Throws owl3d::Error when the bank
// or input scenes do not match the fingerprints recorded in it.
BenchmarkManifest regenerate_benchmark(const std::filesystem::path& manifest_path,
                                       const std::vector<sceneio::SceneRecord>& scenes,
                                       const augment::ObjectBank& bank,
                                       const std::filesystem::path& out_dir,
                                       std::size_t threads = 1);

}  // namespace owl3d::bench
