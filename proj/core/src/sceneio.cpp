#include "owl3d/sceneio.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "owl3d/error.hpp"

namespace owl3d::sceneio {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(ScoreSpace space) {
  return space == ScoreSpace::kLogit ? "logit" : "prob";
}

ScoreSpace score_space_from_string(std::string_view s) {
  if (s == "logit") return ScoreSpace::kLogit;
  if (s == "prob") return ScoreSpace::kProb;
  throw FormatError("score_space must be \"logit\" or \"prob\", got \"" + std::string(s) + "\"");
}

// ---- files --------------------------------------------------------------

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return ss.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

// ---- point clouds -------------------------------------------------------

namespace {

float load_le_float(const char* p) {
  std::uint32_t u;
  std::memcpy(&u, p, 4);
  if constexpr (std::endian::native == std::endian::big) {
    u = ((u & 0xffu) << 24) | ((u & 0xff00u) << 8) | ((u >> 8) & 0xff00u) | (u >> 24);
  }
  return std::bit_cast<float>(u);
}

void store_le_float(float f, char* p) {
  auto u = std::bit_cast<std::uint32_t>(f);
  if constexpr (std::endian::native == std::endian::big) {
    u = ((u & 0xffu) << 24) | ((u & 0xff00u) << 8) | ((u >> 8) & 0xff00u) | (u >> 24);
  }
  std::memcpy(p, &u, 4);
}

constexpr std::size_t kRecordBytes = 16;

}  // namespace

geom::PointCloud decode_pointcloud(std::string_view bytes, CloudReadStats* stats) {
  if (bytes.size() % kRecordBytes != 0) {
    throw FormatError("point cloud byte count " + std::to_string(bytes.size()) +
                      " is not a multiple of 16");
  }
  CloudReadStats local;
  geom::PointCloud cloud;
  cloud.points.reserve(bytes.size() / kRecordBytes);
  for (std::size_t off = 0; off < bytes.size(); off += kRecordBytes) {
    const float x = load_le_float(bytes.data() + off);
    const float y = load_le_float(bytes.data() + off + 4);
    const float z = load_le_float(bytes.data() + off + 8);
    float intensity = load_le_float(bytes.data() + off + 12);
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z) || !std::isfinite(intensity)) {
      ++local.dropped_nonfinite;
      continue;
    }
    if (intensity < 0.0f || intensity > 1.0f) {
      intensity = std::clamp(intensity, 0.0f, 1.0f);
      ++local.clamped_intensity;
    }
    cloud.points.push_back({x, y, z, intensity});
  }
  if (stats) *stats = local;
  return cloud;
}

geom::PointCloud read_pointcloud(const fs::path& path, CloudReadStats* stats) {
  const std::string bytes = read_file(path);
  try {
    return decode_pointcloud(bytes, stats);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string encode_pointcloud(const geom::PointCloud& cloud) {
  std::string bytes(cloud.points.size() * kRecordBytes, '\0');
  char* p = bytes.data();
  for (const geom::Point& pt : cloud.points) {
    store_le_float(static_cast<float>(pt.x), p);
    store_le_float(static_cast<float>(pt.y), p + 4);
    store_le_float(static_cast<float>(pt.z), p + 8);
    store_le_float(static_cast<float>(pt.intensity), p + 12);
    p += kRecordBytes;
  }
  return bytes;
}

void write_pointcloud(const fs::path& path, const geom::PointCloud& cloud) {
  write_file(path, encode_pointcloud(cloud));
}

// ---- calibration --------------------------------------------------------

namespace {

bool orthonormal(const Mat3& r, double tol) {
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double dot = 0.0;
      for (int k = 0; k < 3; ++k) dot += r[i][k] * r[j][k];
      if (std::abs(dot - (i == j ? 1.0 : 0.0)) > tol) return false;
    }
  }
  return true;
}

Mat3 rotation_block(const std::array<std::array<double, 4>, 3>& m) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = m[i][j];
  return r;
}

double det(const Mat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Mat3 inverse(const Mat3& m) {
  const double d = det(m);
  if (!std::isfinite(d) || std::abs(d) < 1e-12) {
    throw FormatError("singular calibration matrix");
  }
  Mat3 inv{};
  inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / d;
  inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / d;
  inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / d;
  inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / d;
  inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / d;
  inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / d;
  inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / d;
  inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / d;
  inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / d;
  return inv;
}

geom::Vec3 mul(const Mat3& m, const geom::Vec3& v) {
  return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
          m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
          m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
}

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream ss{std::string(line)};
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& tok, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw FormatError(where + ": not a number: \"" + tok + "\"");
  }
}

}  // namespace

void Calib::validate() const {
  for (const auto& row : r0_rect)
    for (double v : row)
      if (!std::isfinite(v)) throw FormatError("R0_rect has a non-finite entry");
  for (const auto& row : tr_velo_to_cam)
    for (double v : row)
      if (!std::isfinite(v)) throw FormatError("Tr_velo_to_cam has a non-finite entry");
  if (!orthonormal(r0_rect, 1e-3)) throw FormatError("R0_rect is not orthonormal");
  if (!orthonormal(rotation_block(tr_velo_to_cam), 1e-3)) {
    throw FormatError("Tr_velo_to_cam rotation is not orthonormal");
  }
}

Calib identity_calib() { return Calib{}; }

Calib parse_kitti_calib(std::string_view text) {
  Calib calib;
  bool have_r0 = false;
  bool have_tr = false;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    const std::string key = line.substr(0, colon);
    const auto toks = split_ws(std::string_view(line).substr(colon + 1));
    const std::string where = "calib line " + std::to_string(line_no);
    if (key == "R0_rect" || key == "R_rect") {
      if (toks.size() != 9) throw FormatError(where + ": R0_rect needs 9 values");
      for (int i = 0; i < 9; ++i) calib.r0_rect[i / 3][i % 3] = parse_double(toks[i], where);
      have_r0 = true;
    } else if (key == "Tr_velo_to_cam" || key == "Tr_velo_cam") {
      if (toks.size() != 12) throw FormatError(where + ": Tr_velo_to_cam needs 12 values");
      for (int i = 0; i < 12; ++i) {
        calib.tr_velo_to_cam[i / 4][i % 4] = parse_double(toks[i], where);
      }
      have_tr = true;
    }
  }
  if (!have_r0) throw FormatError("calib: missing R0_rect");
  if (!have_tr) throw FormatError("calib: missing Tr_velo_to_cam");
  calib.validate();
  return calib;
}

geom::Vec3 lidar_to_rect(const geom::Vec3& p, const Calib& calib) {
  const auto& tr = calib.tr_velo_to_cam;
  const geom::Vec3 cam = mul(rotation_block(tr), p);
  return mul(calib.r0_rect, {cam.x + tr[0][3], cam.y + tr[1][3], cam.z + tr[2][3]});
}

geom::Vec3 rect_to_lidar(const geom::Vec3& p, const Calib& calib) {
  const auto& tr = calib.tr_velo_to_cam;
  const geom::Vec3 cam = mul(inverse(calib.r0_rect), p);
  return mul(inverse(rotation_block(tr)),
             {cam.x - tr[0][3], cam.y - tr[1][3], cam.z - tr[2][3]});
}

geom::Box3D camera_box_to_lidar(const CameraBox& cam, const Calib& calib) {
  const geom::Vec3 bottom = rect_to_lidar({cam.x, cam.y, cam.z}, calib);
  geom::Box3D box;
  box.cx = bottom.x;
  box.cy = bottom.y;
  box.cz = bottom.z + 0.5 * cam.h;
  box.l = cam.l;
  box.w = cam.w;
  box.h = cam.h;
  box.yaw = geom::normalize_yaw(-cam.ry - 0.5 * geom::kPi);
  return box;
}

CameraBox lidar_box_to_camera(const geom::Box3D& box, const Calib& calib) {
  const geom::Vec3 bottom = lidar_to_rect({box.cx, box.cy, box.cz - 0.5 * box.h}, calib);
  CameraBox cam;
  cam.h = box.h;
  cam.w = box.w;
  cam.l = box.l;
  cam.x = bottom.x;
  cam.y = bottom.y;
  cam.z = bottom.z;
  cam.ry = geom::normalize_yaw(-box.yaw - 0.5 * geom::kPi);
  return cam;
}

std::vector<GtObject> parse_kitti_labels(std::string_view text, const Calib& calib) {
  std::vector<GtObject> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    const std::string where = "label line " + std::to_string(line_no);
    // 15 fields for ground truth, 16 when a detection score is appended.
    if (toks.size() != 15 && toks.size() != 16) {
      throw FormatError(where + ": expected 15 fields, got " + std::to_string(toks.size()));
    }
    if (toks[0] == "DontCare") continue;
    CameraBox cam;
    cam.h = parse_double(toks[8], where);
    cam.w = parse_double(toks[9], where);
    cam.l = parse_double(toks[10], where);
    cam.x = parse_double(toks[11], where);
    cam.y = parse_double(toks[12], where);
    cam.z = parse_double(toks[13], where);
    cam.ry = parse_double(toks[14], where);
    GtObject obj;
    obj.class_label = toks[0];
    obj.box = camera_box_to_lidar(cam, calib);
    try {
      obj.box.validate();
    } catch (const std::invalid_argument& e) {
      throw FormatError(where + ": " + e.what());
    }
    out.push_back(std::move(obj));
  }
  return out;
}

void count_points(SceneRecord& scene) {
  for (GtObject& obj : scene.annotations) {
    obj.num_points = geom::points_in_box(scene.cloud, obj.box).size();
  }
}

// ---- JSON codecs --------------------------------------------------------

namespace {

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw FormatError(path + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(path + "." + key + ": missing key");
  return *it;
}

double get_number(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number()) throw FormatError(path + "." + key + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw FormatError(path + "." + key + ": non-finite number");
  return d;
}

std::string get_string(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string()) throw FormatError(path + "." + key + ": expected a string");
  return v.get<std::string>();
}

const json& get_array(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_array()) throw FormatError(path + "." + key + ": expected an array");
  return v;
}

json box_to_json(const geom::Box3D& b) {
  return json{{"cx", b.cx}, {"cy", b.cy}, {"cz", b.cz}, {"l", b.l},
              {"w", b.w},   {"h", b.h},   {"yaw", b.yaw}};
}

geom::Box3D box_from_json(const json& parent, const std::string& path) {
  const json& j = require(parent, "box", path);
  const std::string bp = path + ".box";
  geom::Box3D b;
  b.cx = get_number(j, "cx", bp);
  b.cy = get_number(j, "cy", bp);
  b.cz = get_number(j, "cz", bp);
  b.l = get_number(j, "l", bp);
  b.w = get_number(j, "w", bp);
  b.h = get_number(j, "h", bp);
  b.yaw = get_number(j, "yaw", bp);
  try {
    b.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(bp + ": " + e.what());
  }
  return b;
}

json parse_json(std::string_view text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(where + ": invalid JSON: " + e.what());
  }
}

}  // namespace

std::string encode_annotations(const SceneAnnotations& scene) {
  json objects = json::array();
  for (const GtObject& o : scene.objects) {
    objects.push_back(
        json{{"class", o.class_label}, {"box", box_to_json(o.box)}, {"num_points", o.num_points}});
  }
  json doc{{"scene_id", scene.scene_id}, {"objects", std::move(objects)}};
  return doc.dump(2) + "\n";
}

SceneAnnotations decode_annotations(std::string_view json_text) {
  const json doc = parse_json(json_text, "annotations");
  SceneAnnotations scene;
  scene.scene_id = get_string(doc, "scene_id", "$");
  if (scene.scene_id.empty()) throw FormatError("$.scene_id: must be non-empty");
  const json& objects = get_array(doc, "objects", "$");
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const std::string path = "objects[" + std::to_string(i) + "]";
    const json& o = objects[i];
    if (!o.is_object()) throw FormatError(path + ": expected an object");
    GtObject obj;
    obj.class_label = get_string(o, "class", path);
    if (obj.class_label.empty()) throw FormatError(path + ".class: must be non-empty");
    obj.box = box_from_json(o, path);
    const json& np = require(o, "num_points", path);
    if (!np.is_number_integer() || np.get<long long>() < 0) {
      throw FormatError(path + ".num_points: expected a non-negative integer");
    }
    obj.num_points = np.get<std::size_t>();
    scene.objects.push_back(std::move(obj));
  }
  return scene;
}

void write_annotations(const fs::path& path, const SceneAnnotations& scene) {
  write_file(path, encode_annotations(scene));
}

SceneAnnotations read_annotations(const fs::path& path) {
  const std::string text = read_file(path);
  try {
    return decode_annotations(text);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string encode_detections_line(const SceneDetections& scene) {
  json dets = json::array();
  for (const Detection& d : scene.detections) {
    json j{{"conf", d.conf}, {"scores", d.scores}, {"box", box_to_json(d.box)}};
    j["objectness"] = d.objectness ? json(*d.objectness) : json(nullptr);
    dets.push_back(std::move(j));
  }
  json doc{{"scene_id", scene.scene_id},
           {"score_space", std::string(to_string(scene.score_space))},
           {"detections", std::move(dets)}};
  return doc.dump();
}

SceneDetections decode_detections_line(std::string_view line, std::size_t num_classes) {
  const json doc = parse_json(line, "detections");
  SceneDetections scene;
  scene.scene_id = get_string(doc, "scene_id", "$");
  if (scene.scene_id.empty()) throw FormatError("$.scene_id: must be non-empty");
  if (auto it = doc.find("score_space"); it != doc.end()) {
    if (!it->is_string()) throw FormatError("$.score_space: expected a string");
    scene.score_space = score_space_from_string(it->get<std::string>());
  }
  const json& dets = get_array(doc, "detections", "$");
  std::size_t expected = num_classes;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const std::string path = "detections[" + std::to_string(i) + "]";
    const json& j = dets[i];
    if (!j.is_object()) throw FormatError(path + ": expected an object");
    Detection d;
    d.conf = get_number(j, "conf", path);
    const json& scores = get_array(j, "scores", path);
    if (scores.empty()) throw FormatError(path + ".scores: must be non-empty");
    if (expected == 0) expected = scores.size();
    if (scores.size() != expected) {
      throw FormatError(path + ".scores: expected " + std::to_string(expected) +
                        " values, got " + std::to_string(scores.size()));
    }
    d.scores.reserve(scores.size());
    for (std::size_t k = 0; k < scores.size(); ++k) {
      if (!scores[k].is_number() || !std::isfinite(scores[k].get<double>())) {
        throw FormatError(path + ".scores[" + std::to_string(k) + "]: expected a finite number");
      }
      d.scores.push_back(scores[k].get<double>());
    }
    if (auto it = j.find("objectness"); it != j.end() && !it->is_null()) {
      if (!it->is_number()) throw FormatError(path + ".objectness: expected a number or null");
      d.objectness = it->get<double>();
    }
    d.box = box_from_json(j, path);
    scene.detections.push_back(std::move(d));
  }
  return scene;
}

void write_detections(const fs::path& path, const std::vector<SceneDetections>& scenes) {
  std::string text;
  for (const SceneDetections& s : scenes) {
    text += encode_detections_line(s);
    text += '\n';
  }
  write_file(path, text);
}

std::vector<SceneDetections> read_detections(const fs::path& path, std::size_t num_classes) {
  const std::string text = read_file(path);
  std::vector<SceneDetections> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(decode_detections_line(line, num_classes));
    } catch (const FormatError& e) {
      throw FormatError(path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
    if (num_classes == 0 && !out.back().detections.empty()) {
      num_classes = out.back().detections.front().scores.size();
    }
  }
  return out;
}

// ---- scene directories --------------------------------------------------

void write_scene(const fs::path& dir, const SceneRecord& scene) {
  write_pointcloud(dir / "clouds" / (scene.scene_id + ".bin"), scene.cloud);
  write_annotations(dir / "annotations" / (scene.scene_id + ".json"),
                    {scene.scene_id, scene.annotations});
}

SceneRecord read_scene(const fs::path& dir, const std::string& scene_id) {
  SceneAnnotations ann = read_annotations(dir / "annotations" / (scene_id + ".json"));
  if (ann.scene_id != scene_id) {
    throw FormatError((dir / "annotations" / (scene_id + ".json")).string() +
                      ": scene_id \"" + ann.scene_id + "\" does not match file name");
  }
  SceneRecord rec;
  rec.scene_id = scene_id;
  rec.annotations = std::move(ann.objects);
  const fs::path cloud_path = dir / "clouds" / (scene_id + ".bin");
  if (fs::exists(cloud_path)) rec.cloud = read_pointcloud(cloud_path);
  return rec;
}

std::vector<std::string> list_scenes(const fs::path& dir) {
  const fs::path ann_dir = dir / "annotations";
  if (!fs::is_directory(ann_dir)) throw IoError("not a scene directory (no annotations/): " + dir.string());
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(ann_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      ids.push_back(entry.path().stem().string());
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<SceneRecord> read_scene_dir(const fs::path& dir) {
  std::vector<SceneRecord> scenes;
  for (const std::string& id : list_scenes(dir)) scenes.push_back(read_scene(dir, id));
  return scenes;
}

}  // namespace owl3d::sceneio
