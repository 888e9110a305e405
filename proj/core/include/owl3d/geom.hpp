#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace owl3d::geom {

inline constexpr double kPi = 3.14159265358979323846;

// Wraps an angle into (-pi, pi].
double normalize_yaw(double yaw);

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

// Box extents (l, w, h) in meters.
struct Dims {
  double l = 1.0;
  double w = 1.0;
  double h = 1.0;

  friend bool operator==(const Dims&, const Dims&) = default;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// Gravity-aligned oriented box. (cx, cy, cz) is the geometric center, (l, w, h)
// the extents along the box-local x, y, z axes, yaw the rotation about +z.
struct Box3D {
  double cx = 0.0;
  double cy = 0.0;
  double cz = 0.0;
  double l = 1.0;
  double w = 1.0;
  double h = 1.0;
  double yaw = 0.0;

  Vec3 center() const { return {cx, cy, cz}; }
  Dims dims() const { return {l, w, h}; }
  double volume() const { return l * w * h; }
  double bottom() const { return cz - 0.5 * h; }
  double top() const { return cz + 0.5 * h; }

  // Counter-clockwise BEV corners.
  std::array<Vec2, 4> bev_corners() const;

  // Throws std::invalid_argument unless dims > 0, all fields finite and yaw
  // lies in (-pi, pi].
  void validate() const;

  friend bool operator==(const Box3D&, const Box3D&) = default;
};

// Returns a copy with yaw wrapped into (-pi, pi].
Box3D normalized(Box3D box);

struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct PointCloud {
  std::vector<Point> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  friend bool operator==(const PointCloud&, const PointCloud&) = default;
};

// Tolerance applied to face tests so that points lying on a face stay inside
// after rigid motions and rescaling.
inline constexpr double kBoundaryTolerance = 1e-9;

// Orientation tolerance used by the convex clipper (units of m^2).
inline constexpr double kClipEpsilon = 1e-9;

double polygon_area(std::span<const Vec2> polygon);

// Intersection of two convex counter-clockwise polygons.
std::vector<Vec2> clip_convex(std::span<const Vec2> subject,
                              std::span<const Vec2> clip);

double bev_intersection_area(const Box3D& a, const Box3D& b);
double bev_iou(const Box3D& a, const Box3D& b);
double iou_3d(const Box3D& a, const Box3D& b);

// Maps a world point into the box frame: translate by -center, rotate by -yaw.
Vec3 to_box_frame(const Box3D& box, const Vec3& p);
Vec3 from_box_frame(const Box3D& box, const Vec3& local);

bool contains(const Box3D& box, const Vec3& p);
std::vector<std::size_t> points_in_box(const PointCloud& cloud, const Box3D& box);

struct TransformedObject {
  PointCloud cloud;
  Box3D box;
};

// Rigidly moves an object so that its box lands at new_center / new_yaw.
TransformedObject transform_object(const PointCloud& cloud, const Box3D& box,
                                   const Vec3& new_center, double new_yaw);

// Anisotropic rescale in the box frame. Throws std::invalid_argument on a
// non-positive target dimension.
TransformedObject resize_object(const PointCloud& cloud, const Box3D& box,
                                const Dims& target_dims);

double center_distance(const Box3D& a, const Box3D& b);

}  // namespace owl3d::geom
