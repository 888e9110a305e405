#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "owl3d/geom.hpp"

namespace owl3d::sceneio {

struct GtObject {
  std::string class_label;
  geom::Box3D box;
  std::size_t num_points = 0;

  friend bool operator==(const GtObject&, const GtObject&) = default;
};

struct SceneRecord {
  std::string scene_id;
  geom::PointCloud cloud;
  std::vector<GtObject> annotations;
};

// Annotation-only view of a scene, the unit handled by the annotation codec.
struct SceneAnnotations {
  std::string scene_id;
  std::vector<GtObject> objects;

  friend bool operator==(const SceneAnnotations&, const SceneAnnotations&) = default;
};

enum class ScoreSpace { kLogit, kProb };

std::string_view to_string(ScoreSpace space);
ScoreSpace score_space_from_string(std::string_view s);

struct Detection {
  double conf = 0.0;
  std::vector<double> scores;
  std::optional<double> objectness;
  geom::Box3D box;

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct SceneDetections {
  std::string scene_id;
  ScoreSpace score_space = ScoreSpace::kLogit;
  std::vector<Detection> detections;

  friend bool operator==(const SceneDetections&, const SceneDetections&) = default;
};

using Mat3 = std::array<std::array<double, 3>, 3>;

// KITTI calibration restricted to what the LiDAR <-> rectified-camera mapping
// needs. tr_velo_to_cam is the 3x4 row-major extrinsic [R | t].
struct Calib {
  Mat3 r0_rect{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  std::array<std::array<double, 4>, 3> tr_velo_to_cam{
      {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}}};

  // Throws FormatError if a matrix is non-finite or a rotation block is not
  // orthonormal within 1e-3.
  void validate() const;
};

Calib identity_calib();

// ---- point clouds -------------------------------------------------------

struct CloudReadStats {
  std::size_t dropped_nonfinite = 0;
  std::size_t clamped_intensity = 0;
};

// KITTI velodyne layout: little-endian float32 (x, y, z, intensity) records.
geom::PointCloud read_pointcloud(const std::filesystem::path& path,
                                 CloudReadStats* stats = nullptr);
geom::PointCloud decode_pointcloud(std::string_view bytes, CloudReadStats* stats = nullptr);
std::string encode_pointcloud(const geom::PointCloud& cloud);
void write_pointcloud(const std::filesystem::path& path, const geom::PointCloud& cloud);

// ---- KITTI text formats -------------------------------------------------

Calib parse_kitti_calib(std::string_view text);

// Camera-frame label box: bottom-center location in the rectified camera frame
// and rotation_y about the camera y axis.
struct CameraBox {
  double h = 0.0;
  double w = 0.0;
  double l = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double ry = 0.0;
};

geom::Box3D camera_box_to_lidar(const CameraBox& cam, const Calib& calib);
CameraBox lidar_box_to_camera(const geom::Box3D& box, const Calib& calib);

geom::Vec3 lidar_to_rect(const geom::Vec3& p, const Calib& calib);
geom::Vec3 rect_to_lidar(const geom::Vec3& p, const Calib& calib);

// Parses label_2 text. "DontCare" lines are skipped; num_points is left 0.
std::vector<GtObject> parse_kitti_labels(std::string_view text, const Calib& calib);

// Fills num_points from the scene cloud.
void count_points(SceneRecord& scene);

// ---- canonical JSON codecs ----------------------------------------------

std::string encode_annotations(const SceneAnnotations& scene);
SceneAnnotations decode_annotations(std::string_view json_text);
void write_annotations(const std::filesystem::path& path, const SceneAnnotations& scene);
SceneAnnotations read_annotations(const std::filesystem::path& path);

// One JSON document per line. num_classes == 0 accepts any (but uniform)
// score length.
std::string encode_detections_line(const SceneDetections& scene);
SceneDetections decode_detections_line(std::string_view line, std::size_t num_classes);
void write_detections(const std::filesystem::path& path,
                      const std::vector<SceneDetections>& scenes);
std::vector<SceneDetections> read_detections(const std::filesystem::path& path,
                                             std::size_t num_classes);

// ---- scene directories --------------------------------------------------
// Layout: clouds/<scene_id>.bin and annotations/<scene_id>.json.

void write_scene(const std::filesystem::path& dir, const SceneRecord& scene);
SceneRecord read_scene(const std::filesystem::path& dir, const std::string& scene_id);
// Scene ids found under annotations/, sorted.
std::vector<std::string> list_scenes(const std::filesystem::path& dir);
std::vector<SceneRecord> read_scene_dir(const std::filesystem::path& dir);

// Whole-file helpers shared by the other modules.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace owl3d::sceneio
