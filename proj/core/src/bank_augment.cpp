#include "owl3d/bank_augment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "owl3d/error.hpp"
#include "owl3d/rng.hpp"

namespace owl3d::augment {

namespace fs = std::filesystem;
using nlohmann::json;

geom::Box3D BankEntry::local_box() const {
  geom::Box3D b = box;
  b.cx = b.cy = b.cz = 0.0;
  b.yaw = 0.0;
  return b;
}

geom::TransformedObject BankEntry::materialize(const geom::Vec3& center, double yaw) const {
  return geom::transform_object(points, local_box(), center, yaw);
}

namespace {

// Pins box-frame coordinates onto the box; only moves points that sit within
// the boundary tolerance (or float rounding) of a face.
void clamp_to_extent(geom::PointCloud& local, const geom::Dims& d) {
  for (geom::Point& p : local.points) {
    p.x = std::clamp(p.x, -0.5 * d.l, 0.5 * d.l);
    p.y = std::clamp(p.y, -0.5 * d.w, 0.5 * d.w);
    p.z = std::clamp(p.z, -0.5 * d.h, 0.5 * d.h);
  }
}

}  // namespace

ObjectBank build_bank(const std::vector<sceneio::SceneRecord>& scenes,
                      const std::set<std::string>& classes, std::size_t min_points) {
  ObjectBank bank;
  for (const sceneio::SceneRecord& scene : scenes) {
    for (const sceneio::GtObject& obj : scene.annotations) {
      if (!classes.contains(obj.class_label)) continue;
      const auto idx = geom::points_in_box(scene.cloud, obj.box);
      if (idx.size() < min_points) continue;
      BankEntry e;
      e.class_label = obj.class_label;
      e.box = obj.box;
      e.source_scene = scene.scene_id;
      e.num_points = idx.size();
      e.points.points.reserve(idx.size());
      for (std::size_t i : idx) {
        const geom::Point& p = scene.cloud.points[i];
        const geom::Vec3 q = geom::to_box_frame(obj.box, {p.x, p.y, p.z});
        e.points.points.push_back({q.x, q.y, q.z, p.intensity});
      }
      clamp_to_extent(e.points, e.box.dims());
      bank.entries.push_back(std::move(e));
    }
  }
  return bank;
}

double rgb_to_intensity(int r, int g, int b) {
  for (int c : {r, g, b}) {
    if (c < 0 || c > 255) {
      throw std::invalid_argument("RGB channel out of [0, 255]: " + std::to_string(c));
    }
  }
  return (static_cast<double>(r + g + b) / 3.0) / 255.0;
}

geom::PointCloud cloud_from_xyzrgb(std::string_view text) {
  geom::PointCloud cloud;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    double x, y, z;
    double r, g, b;
    if (!(row >> x >> y >> z >> r >> g >> b)) {
      throw FormatError("xyzrgb line " + std::to_string(line_no) + ": expected 6 numbers");
    }
    if (r != std::floor(r) || g != std::floor(g) || b != std::floor(b)) {
      throw FormatError("xyzrgb line " + std::to_string(line_no) + ": RGB must be integers");
    }
    try {
      cloud.points.push_back({x, y, z,
                              rgb_to_intensity(static_cast<int>(r), static_cast<int>(g),
                                               static_cast<int>(b))});
    } catch (const std::invalid_argument& e) {
      throw FormatError("xyzrgb line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cloud;
}

SizePool size_pool_from_scenes(const std::vector<sceneio::SceneRecord>& scenes,
                               const std::set<std::string>& classes) {
  SizePool pool;
  for (const auto& scene : scenes)
    for (const auto& obj : scene.annotations)
      if (classes.contains(obj.class_label)) pool.dims.push_back(obj.box.dims());
  return pool;
}

LocationPool location_pool_from_scenes(const std::vector<sceneio::SceneRecord>& scenes,
                                       const std::set<std::string>& classes) {
  LocationPool pool;
  for (const auto& scene : scenes)
    for (const auto& obj : scene.annotations)
      if (classes.contains(obj.class_label)) {
        pool.placements.push_back({obj.box.center(), obj.box.yaw});
      }
  return pool;
}

ObjectBank multi_size_mix(const ObjectBank& bank, const SizePool& pool, std::uint64_t seed) {
  if (pool.dims.empty()) throw std::invalid_argument("multi_size_mix: empty size pool");
  for (const geom::Dims& d : pool.dims) {
    if (!(d.l > 0.0 && d.w > 0.0 && d.h > 0.0)) {
      throw std::invalid_argument("multi_size_mix: size pool has a non-positive dimension");
    }
  }
  CounterRng rng(seed, "multi_size_mix");
  ObjectBank out;
  out.entries.reserve(bank.entries.size());
  for (std::size_t i = 0; i < bank.entries.size(); ++i) {
    BankEntry e = bank.entries[i];
    if (i % 2 == 0) {
      e.resized = false;
    } else {
      const geom::Dims target = pool.dims[rng.index(pool.dims.size())];
      auto resized = geom::resize_object(e.points, e.local_box(), target);
      e.points = std::move(resized.cloud);
      clamp_to_extent(e.points, target);
      e.box.l = target.l;
      e.box.w = target.w;
      e.box.h = target.h;
      e.resized = true;
    }
    out.entries.push_back(std::move(e));
  }
  return out;
}

PasteResult paste_samples(const sceneio::SceneRecord& scene, const ObjectBank& bank,
                          const std::string& class_label, std::size_t sample_number,
                          const LocationPool& locations, std::uint64_t seed,
                          std::string_view stream_tag) {
  PasteResult result;
  result.scene = scene;
  CounterRng rng(seed, std::string(stream_tag) + ":" + scene.scene_id);

  // Partial Fisher-Yates: first n slots become a uniform draw without replacement.
  const std::size_t n = std::min(sample_number, bank.entries.size());
  std::vector<std::size_t> order(bank.entries.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < n; ++i) {
    std::swap(order[i], order[i + rng.index(order.size() - i)]);
  }

  std::vector<std::size_t> free_slots(locations.placements.size());
  std::iota(free_slots.begin(), free_slots.end(), std::size_t{0});
  std::size_t used = 0;

  for (std::size_t c = 0; c < n; ++c) {
    if (used == free_slots.size()) break;
    std::swap(free_slots[used], free_slots[used + rng.index(free_slots.size() - used)]);
    const Placement& pl = locations.placements[free_slots[used++]];
    const BankEntry& entry = bank.entries[order[c]];
    auto candidate = entry.materialize(pl.center, pl.yaw);

    const bool collides = std::any_of(
        result.scene.annotations.begin(), result.scene.annotations.end(),
        [&](const sceneio::GtObject& o) { return geom::bev_iou(o.box, candidate.box) > 0.0; });
    if (collides) {
      ++result.rejected;
      continue;
    }
    result.scene.cloud.points.insert(result.scene.cloud.points.end(),
                                     candidate.cloud.points.begin(),
                                     candidate.cloud.points.end());
    result.pasted_annotations.push_back(result.scene.annotations.size());
    result.pasted_bank_entries.push_back(order[c]);
    result.scene.annotations.push_back({class_label, candidate.box, entry.points.size()});
    ++result.accepted;
  }
  return result;
}

// ---- persistence --------------------------------------------------------

namespace {

std::string blob_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu.bin", i);
  return buf;
}

std::string encode_index(const ObjectBank& bank) {
  json entries = json::array();
  for (std::size_t i = 0; i < bank.entries.size(); ++i) {
    const BankEntry& e = bank.entries[i];
    entries.push_back(json{
        {"class", e.class_label},
        {"box", json{{"cx", e.box.cx}, {"cy", e.box.cy}, {"cz", e.box.cz}, {"l", e.box.l},
                     {"w", e.box.w}, {"h", e.box.h}, {"yaw", e.box.yaw}}},
        {"source_scene", e.source_scene},
        {"num_points", e.num_points},
        {"resized", e.resized},
        {"points_file", "points/" + blob_name(i)}});
  }
  return json{{"entries", std::move(entries)}}.dump(2) + "\n";
}

}  // namespace

void save_bank(const fs::path& dir, const ObjectBank& bank) {
  fs::create_directories(dir / "points");
  sceneio::write_file(dir / "index.json", encode_index(bank));
  for (std::size_t i = 0; i < bank.entries.size(); ++i) {
    sceneio::write_pointcloud(dir / "points" / blob_name(i), bank.entries[i].points);
  }
}

ObjectBank load_bank(const fs::path& dir) {
  const fs::path index_path = dir / "index.json";
  json doc;
  try {
    doc = json::parse(sceneio::read_file(index_path));
  } catch (const json::parse_error& e) {
    throw FormatError(index_path.string() + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array()) {
    throw FormatError(index_path.string() + ": $.entries: expected an array");
  }
  ObjectBank bank;
  const json& entries = doc["entries"];
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const json& j = entries[i];
    const std::string path = index_path.string() + ": entries[" + std::to_string(i) + "]";
    try {
      BankEntry e;
      e.class_label = j.at("class").get<std::string>();
      const json& b = j.at("box");
      e.box = {b.at("cx").get<double>(), b.at("cy").get<double>(), b.at("cz").get<double>(),
               b.at("l").get<double>(),  b.at("w").get<double>(),  b.at("h").get<double>(),
               b.at("yaw").get<double>()};
      e.source_scene = j.at("source_scene").get<std::string>();
      e.num_points = j.at("num_points").get<std::size_t>();
      e.resized = j.at("resized").get<bool>();
      e.box.validate();
      e.points = sceneio::read_pointcloud(dir / j.at("points_file").get<std::string>());
      if (e.points.size() != e.num_points) {
        throw FormatError("num_points " + std::to_string(e.num_points) + " but blob holds " +
                          std::to_string(e.points.size()));
      }
      clamp_to_extent(e.points, e.box.dims());
      bank.entries.push_back(std::move(e));
    } catch (const json::exception& e) {
      throw FormatError(path + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw FormatError(path + ": " + e.what());
    } catch (const FormatError& e) {
      throw FormatError(path + ": " + e.what());
    }
  }
  return bank;
}

std::uint64_t bank_fingerprint(const ObjectBank& bank) {
  std::uint64_t h = fnv1a64(encode_index(bank));
  for (const BankEntry& e : bank.entries) h = fnv1a64(sceneio::encode_pointcloud(e.points), h);
  return h;
}

}  // namespace owl3d::augment
