#include "owl3d/geom.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace owl3d::geom {

double normalize_yaw(double yaw) {
  double r = std::remainder(yaw, 2.0 * kPi);  // [-pi, pi]
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

std::array<Vec2, 4> Box3D::bev_corners() const {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  const double hl = 0.5 * l;
  const double hw = 0.5 * w;
  const std::array<Vec2, 4> local = {{{hl, hw}, {-hl, hw}, {-hl, -hw}, {hl, -hw}}};
  std::array<Vec2, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) {
    out[i] = {cx + c * local[i].x - s * local[i].y, cy + s * local[i].x + c * local[i].y};
  }
  return out;
}

void Box3D::validate() const {
  for (double v : {cx, cy, cz, l, w, h, yaw}) {
    if (!std::isfinite(v)) throw std::invalid_argument("box has a non-finite field");
  }
  if (l <= 0.0 || w <= 0.0 || h <= 0.0) {
    throw std::invalid_argument("box dimensions must be positive");
  }
  if (yaw <= -kPi || yaw > kPi) {
    throw std::invalid_argument("box yaw outside (-pi, pi]: " + std::to_string(yaw));
  }
}

Box3D normalized(Box3D box) {
  box.yaw = normalize_yaw(box.yaw);
  return box;
}

double polygon_area(std::span<const Vec2> polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = polygon[i];
    const Vec2& q = polygon[(i + 1) % n];
    twice += p.x * q.y - q.x * p.y;
  }
  return 0.5 * std::abs(twice);
}

namespace {

double cross(const Vec2& a, const Vec2& b, const Vec2& p) {
  return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
}

}  // namespace

std::vector<Vec2> clip_convex(std::span<const Vec2> subject, std::span<const Vec2> clip) {
  std::vector<Vec2> output(subject.begin(), subject.end());
  std::vector<Vec2> input;
  const std::size_t m = clip.size();
  for (std::size_t e = 0; e < m && !output.empty(); ++e) {
    const Vec2& a = clip[e];
    const Vec2& b = clip[(e + 1) % m];
    input.swap(output);
    output.clear();
    const std::size_t n = input.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& prev = input[(i + n - 1) % n];
      const Vec2& cur = input[i];
      const double d_prev = cross(a, b, prev);
      const double d_cur = cross(a, b, cur);
      const bool in_prev = d_prev >= -kClipEpsilon;
      const bool in_cur = d_cur >= -kClipEpsilon;
      if (in_cur) {
        if (!in_prev) {
          const double t = d_prev / (d_prev - d_cur);
          output.push_back({prev.x + t * (cur.x - prev.x), prev.y + t * (cur.y - prev.y)});
        }
        output.push_back(cur);
      } else if (in_prev) {
        const double t = d_prev / (d_prev - d_cur);
        output.push_back({prev.x + t * (cur.x - prev.x), prev.y + t * (cur.y - prev.y)});
      }
    }
  }
  return output;
}

namespace {

// Quick reject on circumscribed circles before clipping.
bool bev_far_apart(const Box3D& a, const Box3D& b) {
  const double ra = 0.5 * std::hypot(a.l, a.w);
  const double rb = 0.5 * std::hypot(b.l, b.w);
  return std::hypot(a.cx - b.cx, a.cy - b.cy) > ra + rb;
}

double box_bev_area(const Box3D& box) {
  const auto corners = box.bev_corners();
  return polygon_area(corners);
}

}  // namespace

double bev_intersection_area(const Box3D& a, const Box3D& b) {
  if (bev_far_apart(a, b)) return 0.0;
  const auto ca = a.bev_corners();
  const auto cb = b.bev_corners();
  const auto poly = clip_convex(ca, cb);
  return polygon_area(poly);
}

double bev_iou(const Box3D& a, const Box3D& b) {
  const double inter = bev_intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  const double uni = box_bev_area(a) + box_bev_area(b) - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double iou_3d(const Box3D& a, const Box3D& b) {
  const double dz = std::min(a.top(), b.top()) - std::max(a.bottom(), b.bottom());
  if (dz <= 0.0) return 0.0;
  const double inter_area = bev_intersection_area(a, b);
  if (inter_area <= 0.0) return 0.0;
  const double inter = inter_area * dz;
  // Volumes use the same arithmetic as the overlap so identical boxes give 1.
  const double vol_a = box_bev_area(a) * (a.top() - a.bottom());
  const double vol_b = box_bev_area(b) * (b.top() - b.bottom());
  const double uni = vol_a + vol_b - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

Vec3 to_box_frame(const Box3D& box, const Vec3& p) {
  const double dx = p.x - box.cx;
  const double dy = p.y - box.cy;
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  return {c * dx + s * dy, -s * dx + c * dy, p.z - box.cz};
}

Vec3 from_box_frame(const Box3D& box, const Vec3& local) {
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  return {box.cx + c * local.x - s * local.y, box.cy + s * local.x + c * local.y,
          box.cz + local.z};
}

bool contains(const Box3D& box, const Vec3& p) {
  const Vec3 q = to_box_frame(box, p);
  return std::abs(q.x) <= 0.5 * box.l + kBoundaryTolerance &&
         std::abs(q.y) <= 0.5 * box.w + kBoundaryTolerance &&
         std::abs(q.z) <= 0.5 * box.h + kBoundaryTolerance;
}

std::vector<std::size_t> points_in_box(const PointCloud& cloud, const Box3D& box) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const Point& p = cloud.points[i];
    if (contains(box, {p.x, p.y, p.z})) idx.push_back(i);
  }
  return idx;
}

TransformedObject transform_object(const PointCloud& cloud, const Box3D& box,
                                   const Vec3& new_center, double new_yaw) {
  if (new_center == box.center() && new_yaw == box.yaw) return {cloud, box};
  const double dyaw = new_yaw - box.yaw;
  const double c = std::cos(dyaw);
  const double s = std::sin(dyaw);
  TransformedObject out;
  out.cloud.points.reserve(cloud.points.size());
  for (const Point& p : cloud.points) {
    const double dx = p.x - box.cx;
    const double dy = p.y - box.cy;
    const double dz = p.z - box.cz;
    out.cloud.points.push_back({new_center.x + c * dx - s * dy, new_center.y + s * dx + c * dy,
                                new_center.z + dz, p.intensity});
  }
  out.box = box;
  out.box.cx = new_center.x;
  out.box.cy = new_center.y;
  out.box.cz = new_center.z;
  out.box.yaw = normalize_yaw(new_yaw);
  return out;
}

TransformedObject resize_object(const PointCloud& cloud, const Box3D& box,
                                const Dims& target) {
  if (!(target.l > 0.0 && target.w > 0.0 && target.h > 0.0) || !std::isfinite(target.l) ||
      !std::isfinite(target.w) || !std::isfinite(target.h)) {
    throw std::invalid_argument("resize target dimensions must be positive and finite");
  }
  if (target == box.dims()) return {cloud, box};
  const double sx = target.l / box.l;
  const double sy = target.w / box.w;
  const double sz = target.h / box.h;
  TransformedObject out;
  out.box = box;
  out.box.l = target.l;
  out.box.w = target.w;
  out.box.h = target.h;
  out.cloud.points.reserve(cloud.points.size());
  for (const Point& p : cloud.points) {
    const Vec3 local = to_box_frame(box, {p.x, p.y, p.z});
    const Vec3 world = from_box_frame(out.box, {local.x * sx, local.y * sy, local.z * sz});
    out.cloud.points.push_back({world.x, world.y, world.z, p.intensity});
  }
  return out;
}

double center_distance(const Box3D& a, const Box3D& b) {
  const double dx = a.cx - b.cx;
  const double dy = a.cy - b.cy;
  const double dz = a.cz - b.cz;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace owl3d::geom
