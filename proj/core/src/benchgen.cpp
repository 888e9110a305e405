#include "owl3d/benchgen.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>

#include "json.hpp"
#include "owl3d/error.hpp"
#include "owl3d/parallel.hpp"
#include "owl3d/rng.hpp"

namespace owl3d::bench {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<std::string> select_scenes(const std::vector<sceneio::SceneRecord>& scenes,
                                       const std::string& target_class, double lo, double hi) {
  std::vector<std::string> ids;
  for (const auto& scene : scenes) {
    const bool hit = std::any_of(scene.annotations.begin(), scene.annotations.end(),
                                 [&](const sceneio::GtObject& o) {
                                   if (o.class_label != target_class) return false;
                                   const double d = std::sqrt(o.box.cx * o.box.cx +
                                                              o.box.cy * o.box.cy +
                                                              o.box.cz * o.box.cz);
                                   return d >= lo && d <= hi;
                                 });
    if (hit) ids.push_back(scene.scene_id);
  }
  return ids;
}

SyntheticScene build_synthetic_scene(const sceneio::SceneRecord& scene,
                                     const augment::ObjectBank& bank,
                                     std::size_t samples_per_scene,
                                     const augment::LocationPool& donor_locations,
                                     std::uint64_t seed, const std::string& unseen_label) {
  SyntheticScene out;
  out.record.scene_id = scene.scene_id;
  out.removed_objects = scene.annotations.size();

  augment::LocationPool own;
  for (const auto& obj : scene.annotations) own.placements.push_back({obj.box.center(), obj.box.yaw});

  out.record.cloud.points.reserve(scene.cloud.size());
  for (const geom::Point& p : scene.cloud.points) {
    const bool inside = std::any_of(scene.annotations.begin(), scene.annotations.end(),
                                    [&](const sceneio::GtObject& o) {
                                      return geom::contains(o.box, {p.x, p.y, p.z});
                                    });
    if (inside) {
      ++out.removed_points;
    } else {
      out.record.cloud.points.push_back(p);
    }
  }

  auto first = augment::paste_samples(out.record, bank, unseen_label, samples_per_scene, own,
                                      seed, "synth-own");
  out.record = std::move(first.scene);
  out.accepted = first.accepted;
  out.bank_entries = first.pasted_bank_entries;
  if (out.accepted < samples_per_scene) {
    auto second = augment::paste_samples(out.record, bank, unseen_label,
                                         samples_per_scene - out.accepted, donor_locations, seed,
                                         "synth-donor");
    out.record = std::move(second.scene);
    out.accepted += second.accepted;
    out.bank_entries.insert(out.bank_entries.end(), second.pasted_bank_entries.begin(),
                            second.pasted_bank_entries.end());
  }
  out.excluded = out.accepted == 0;
  return out;
}

std::vector<std::string> BenchmarkManifest::scene_ids() const {
  std::vector<std::string> ids;
  ids.reserve(scenes.size());
  for (const auto& s : scenes) ids.push_back(s.scene_id);
  return ids;
}

std::string fingerprint_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::vector<sceneio::SceneRecord> sorted_by_id(const std::vector<sceneio::SceneRecord>& scenes) {
  std::vector<sceneio::SceneRecord> sorted = scenes;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.scene_id < b.scene_id; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].scene_id == sorted[i - 1].scene_id) {
      throw Error("duplicate scene id: " + sorted[i].scene_id);
    }
  }
  return sorted;
}

json box_json(const geom::Box3D& b) {
  return json{{"cx", b.cx}, {"cy", b.cy}, {"cz", b.cz}, {"l", b.l},
              {"w", b.w},   {"h", b.h},   {"yaw", b.yaw}};
}

}  // namespace

std::uint64_t scenes_fingerprint(const std::vector<sceneio::SceneRecord>& scenes) {
  std::uint64_t h = fnv1a64("owl3d-scenes");
  for (const auto& s : sorted_by_id(scenes)) {
    h = fnv1a64(sceneio::encode_annotations({s.scene_id, s.annotations}), h);
    h = fnv1a64(sceneio::encode_pointcloud(s.cloud), h);
  }
  return h;
}

std::string encode_manifest(const BenchmarkManifest& m) {
  json scenes = json::array();
  for (const auto& s : m.scenes) {
    json inserted = json::array();
    for (const auto& ins : s.inserted) {
      inserted.push_back(json{{"class", ins.object.class_label},
                              {"box", box_json(ins.object.box)},
                              {"num_points", ins.object.num_points},
                              {"bank_entry", ins.bank_entry}});
    }
    scenes.push_back(json{{"scene_id", s.scene_id}, {"inserted", std::move(inserted)}});
  }
  json excluded = json::array();
  for (const auto& e : m.excluded) excluded.push_back(json{{"scene_id", e.scene_id}, {"reason", e.reason}});
  const SynthParams& p = m.params;
  json doc{
      {"name", p.name},
      {"seed", p.seed},
      {"params",
       json{{"samples_per_scene", p.samples_per_scene},
            {"range_m", json::array({p.range_lo, p.range_hi})},
            {"unseen_label", p.unseen_label},
            {"donor_classes", std::vector<std::string>(p.donor_classes.begin(), p.donor_classes.end())}}},
      {"bank_fingerprint", m.bank_fingerprint},
      {"input_fingerprint", m.input_fingerprint},
      {"scene_ids", m.scene_ids()},
      {"scenes", std::move(scenes)},
      {"excluded", std::move(excluded)}};
  return doc.dump(2) + "\n";
}

BenchmarkManifest decode_manifest(std::string_view json_text) {
  BenchmarkManifest m;
  try {
    const json doc = json::parse(json_text);
    m.params.name = doc.at("name").get<std::string>();
    m.params.seed = doc.at("seed").get<std::uint64_t>();
    const json& p = doc.at("params");
    m.params.samples_per_scene = p.at("samples_per_scene").get<std::size_t>();
    const json& range = p.at("range_m");
    if (!range.is_array() || range.size() != 2) throw FormatError("params.range_m: expected [lo, hi]");
    m.params.range_lo = range[0].get<double>();
    m.params.range_hi = range[1].get<double>();
    m.params.unseen_label = p.at("unseen_label").get<std::string>();
    m.params.donor_classes.clear();
    for (const auto& c : p.at("donor_classes")) m.params.donor_classes.insert(c.get<std::string>());
    m.bank_fingerprint = doc.at("bank_fingerprint").get<std::string>();
    m.input_fingerprint = doc.at("input_fingerprint").get<std::string>();
    for (const auto& s : doc.at("scenes")) {
      ManifestScene ms;
      ms.scene_id = s.at("scene_id").get<std::string>();
      for (const auto& ins : s.at("inserted")) {
        InsertedObject io;
        io.object.class_label = ins.at("class").get<std::string>();
        const json& b = ins.at("box");
        io.object.box = {b.at("cx").get<double>(), b.at("cy").get<double>(), b.at("cz").get<double>(),
                         b.at("l").get<double>(),  b.at("w").get<double>(),  b.at("h").get<double>(),
                         b.at("yaw").get<double>()};
        io.object.num_points = ins.at("num_points").get<std::size_t>();
        io.bank_entry = ins.at("bank_entry").get<std::size_t>();
        ms.inserted.push_back(std::move(io));
      }
      m.scenes.push_back(std::move(ms));
    }
    for (const auto& e : doc.at("excluded")) {
      m.excluded.push_back({e.at("scene_id").get<std::string>(), e.at("reason").get<std::string>()});
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("manifest: ") + e.what());
  }
  return m;
}

BenchmarkManifest read_manifest(const fs::path& path) {
  try {
    return decode_manifest(sceneio::read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

BenchmarkManifest freeze_benchmark(const std::vector<sceneio::SceneRecord>& scenes,
                                   const augment::ObjectBank& bank, const SynthParams& params,
                                   const fs::path& out_dir, std::size_t threads) {
  if (params.range_lo > params.range_hi) {
    throw std::invalid_argument("synthetic benchmark range has lo > hi");
  }
  const auto sorted = sorted_by_id(scenes);
  const auto donors = augment::location_pool_from_scenes(sorted, params.donor_classes);

  std::vector<SyntheticScene> generated(sorted.size());
  parallel_for(sorted.size(), threads, [&](std::size_t i) {
    generated[i] = build_synthetic_scene(sorted[i], bank, params.samples_per_scene, donors,
                                         params.seed, params.unseen_label);
  });

  BenchmarkManifest manifest;
  manifest.params = params;
  manifest.bank_fingerprint = fingerprint_hex(augment::bank_fingerprint(bank));
  manifest.input_fingerprint = fingerprint_hex(scenes_fingerprint(sorted));

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  for (const SyntheticScene& syn : generated) {
    const std::string& id = syn.record.scene_id;
    if (syn.excluded) {
      manifest.excluded.push_back({id, "no object could be inserted"});
      continue;
    }
    if (select_scenes({syn.record}, params.unseen_label, params.range_lo, params.range_hi).empty()) {
      manifest.excluded.push_back({id, "no inserted object within range"});
      continue;
    }
    ManifestScene ms;
    ms.scene_id = id;
    for (std::size_t k = 0; k < syn.record.annotations.size(); ++k) {
      ms.inserted.push_back({syn.record.annotations[k], syn.bank_entries[k]});
    }
    manifest.scenes.push_back(std::move(ms));
    sceneio::write_scene(out_dir, syn.record);
  }
  sceneio::write_file(out_dir / "manifest.json", encode_manifest(manifest));
  return manifest;
}

BenchmarkManifest regenerate_benchmark(const fs::path& manifest_path,
                                       const std::vector<sceneio::SceneRecord>& scenes,
                                       const augment::ObjectBank& bank, const fs::path& out_dir,
                                       std::size_t threads) {
  const BenchmarkManifest stored = read_manifest(manifest_path);
  const std::string bank_fp = fingerprint_hex(augment::bank_fingerprint(bank));
  if (bank_fp != stored.bank_fingerprint) {
    throw Error("object bank fingerprint " + bank_fp + " does not match manifest " +
                stored.bank_fingerprint);
  }
  const std::string input_fp = fingerprint_hex(scenes_fingerprint(scenes));
  if (input_fp != stored.input_fingerprint) {
    throw Error("input scenes fingerprint " + input_fp + " does not match manifest " +
                stored.input_fingerprint);
  }
  return freeze_benchmark(scenes, bank, stored.params, out_dir, threads);
}

}  // namespace owl3d::bench
