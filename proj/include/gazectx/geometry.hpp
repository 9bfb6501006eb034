/*
 * Copyright 2026 The gazectx Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Camera model, angular coordinates and visual-size metrics.
//
// Camera frame: +x right, +y down, +z along the optical axis. An angular
// point is the per-axis gnomonic angle of a direction, azimuth = atan(x/z),
// elevation = atan(y/z), so pixel = principal_point + f * tan(angle). Areas are
// measured in these (azimuth, elevation) degree coordinates, not as solid
// angle; the distortion stays around 2% inside a 50 degree half field of view.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "gazectx/error.hpp"
#include "gazectx/types.hpp"

namespace gazectx {

inline constexpr double kDegPerRad = 180.0 / std::numbers::pi;
inline constexpr double kRadPerDeg = std::numbers::pi / 180.0;

inline double deg(double rad) { return rad * kDegPerRad; }
inline double rad(double deg) { return deg * kRadPerDeg; }

struct AngularPoint {
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;
  bool operator==(const AngularPoint&) const = default;
};

// Linear (pinhole) camera.
struct CameraModel {
  double focal_length_px = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  double width = 0.0;
  double height = 0.0;
  double max_fov_deg = 0.0;  // half-angle about the optical axis

  // Empty when valid, otherwise a description of the first broken invariant.
  std::optional<std::string> check() const {
    if (!(focal_length_px > 0.0)) return "focal_length_px must be > 0";
    if (!(width > 0.0) || !(height > 0.0)) return "resolution must be > 0";
    if (!(cx >= 0.0 && cx <= width) || !(cy >= 0.0 && cy <= height))
      return "principal point outside the image";
    if (!(max_fov_deg > 0.0 && max_fov_deg < 90.0))
      return "max_fov_deg must be in (0, 90)";
    const double half_x = std::max(cx, width - cx);
    const double half_y = std::max(cy, height - cy);
    if (deg(std::atan(std::max(half_x, half_y) / focal_length_px)) >
        max_fov_deg + 1e-9)
      return "image extent exceeds max_fov_deg";
    return std::nullopt;
  }

  bool contains_pixel(double u, double v) const {
    return u >= 0.0 && u <= width && v >= 0.0 && v <= height;
  }

  bool operator==(const CameraModel&) const = default;
};

inline AngularPoint pixel_to_angular(const CameraModel& camera, double u,
                                     double v) {
  if (!(u >= 0.0 && u <= camera.width)) {
    std::ostringstream msg;
    msg << "pixel x=" << u << " outside [0, " << camera.width << "]";
    throw DomainError(msg.str());
  }
  if (!(v >= 0.0 && v <= camera.height)) {
    std::ostringstream msg;
    msg << "pixel y=" << v << " outside [0, " << camera.height << "]";
    throw DomainError(msg.str());
  }
  return {deg(std::atan((u - camera.cx) / camera.focal_length_px)),
          deg(std::atan((v - camera.cy) / camera.focal_length_px))};
}

inline Eigen::Vector2d angular_to_pixel(const CameraModel& camera,
                                        AngularPoint p) {
  return {camera.cx + camera.focal_length_px * std::tan(rad(p.azimuth_deg)),
          camera.cy + camera.focal_length_px * std::tan(rad(p.elevation_deg))};
}

// Requires direction.z() > 0.
inline AngularPoint direction_to_angular(const Eigen::Vector3d& direction) {
  return {deg(std::atan(direction.x() / direction.z())),
          deg(std::atan(direction.y() / direction.z()))};
}

inline Eigen::Vector3d angular_to_direction(AngularPoint p) {
  return Eigen::Vector3d(std::tan(rad(p.azimuth_deg)),
                         std::tan(rad(p.elevation_deg)), 1.0)
      .normalized();
}

// Angle between two directions in degrees, [0, 180].
inline double angular_distance(const Eigen::Vector3d& a,
                               const Eigen::Vector3d& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0))
    throw DomainError("angular_distance: zero-length direction");
  // atan2 form of arccos(dot) keeps precision near 0 and 180 degrees.
  return deg(std::atan2(a.cross(b).norm(), a.dot(b)));
}

// Angle between a direction and the optical axis.
inline double off_axis_deg(const Eigen::Vector3d& direction) {
  return angular_distance(direction, Eigen::Vector3d::UnitZ());
}

inline bool in_field_of_view(const CameraModel& camera,
                             const Eigen::Vector3d& direction) {
  return direction.z() > 0.0 && off_axis_deg(direction) <= camera.max_fov_deg;
}

// ---------------------------------------------------------------------------
// Planar polygon primitives over (azimuth, elevation).

namespace detail {

inline double cross(AngularPoint o, AngularPoint a, AngularPoint b) {
  return (a.azimuth_deg - o.azimuth_deg) * (b.elevation_deg - o.elevation_deg) -
         (a.elevation_deg - o.elevation_deg) * (b.azimuth_deg - o.azimuth_deg);
}

inline int sign(double v) { return (v > 0.0) - (v < 0.0); }

// True when the open segments cross at a single interior point. Collinear
// overlaps and touching endpoints do not count.
inline bool properly_cross(AngularPoint a, AngularPoint b, AngularPoint c,
                           AngularPoint d) {
  const int d1 = sign(cross(a, b, c));
  const int d2 = sign(cross(a, b, d));
  const int d3 = sign(cross(c, d, a));
  const int d4 = sign(cross(c, d, b));
  return d1 * d2 < 0 && d3 * d4 < 0;
}

inline double point_segment_distance(AngularPoint p, AngularPoint a,
                                     AngularPoint b) {
  const double ax = b.azimuth_deg - a.azimuth_deg;
  const double ay = b.elevation_deg - a.elevation_deg;
  const double px = p.azimuth_deg - a.azimuth_deg;
  const double py = p.elevation_deg - a.elevation_deg;
  const double len2 = ax * ax + ay * ay;
  double t = len2 > 0.0 ? (px * ax + py * ay) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(px - t * ax, py - t * ay);
}

inline void require_polygon(std::span<const AngularPoint> v, const char* op) {
  if (v.size() < 3)
    throw DegenerateInput(std::string(op) + ": polygon needs >= 3 vertices, got " +
                          std::to_string(v.size()));
}

}  // namespace detail

// Object silhouette in angular coordinates. Construction enforces >= 3
// vertices, the forward hemisphere, a vertex cap and simplicity (no two
// non-adjacent edges properly cross; collinear degenerate outlines are
// accepted and have zero area).
class AngularPolygon {
 public:
  static constexpr std::size_t kDefaultVertexCap = 4096;

  AngularPolygon(ObjectId object_id, std::vector<AngularPoint> vertices,
                 std::size_t vertex_cap = kDefaultVertexCap)
      : object_id_(object_id), vertices_(std::move(vertices)) {
    if (vertices_.size() < 3)
      throw DegenerateInput("polygon needs >= 3 vertices, got " +
                            std::to_string(vertices_.size()));
    if (vertices_.size() > vertex_cap)
      throw DomainError("polygon has " + std::to_string(vertices_.size()) +
                        " vertices, cap is " + std::to_string(vertex_cap));
    for (const auto& p : vertices_) {
      if (!(std::abs(p.azimuth_deg) < 90.0) ||
          !(std::abs(p.elevation_deg) < 90.0))
        throw DomainError("polygon vertex outside the forward hemisphere");
    }
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 2; j < n; ++j) {
        if (i == 0 && j == n - 1) continue;  // adjacent through the wrap
        if (detail::properly_cross(vertices_[i], vertices_[(i + 1) % n],
                                   vertices_[j], vertices_[(j + 1) % n]))
          throw DomainError("polygon is self-intersecting (edges " +
                            std::to_string(i) + " and " + std::to_string(j) +
                            ")");
      }
    }
  }

  ObjectId object_id() const { return object_id_; }
  std::span<const AngularPoint> vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }

  bool operator==(const AngularPolygon&) const = default;

 private:
  ObjectId object_id_;
  std::vector<AngularPoint> vertices_;
};

// Shoelace area in deg^2, orientation-independent.
inline double angular_polygon_area(std::span<const AngularPoint> v) {
  detail::require_polygon(v, "angular_polygon_area");
  double twice = 0.0;
  for (std::size_t i = 0, n = v.size(); i < n; ++i) {
    const auto& a = v[i];
    const auto& b = v[(i + 1) % n];
    twice += a.azimuth_deg * b.elevation_deg - b.azimuth_deg * a.elevation_deg;
  }
  return 0.5 * std::abs(twice);
}

inline double angular_polygon_area(const AngularPolygon& poly) {
  return angular_polygon_area(poly.vertices());
}

// Radius of the disc with the same area: sqrt(area / pi).
inline double area_equivalent_radius(double area_deg2) {
  if (!(area_deg2 >= 0.0))
    throw DomainError("area_equivalent_radius: negative area " +
                      std::to_string(area_deg2));
  return std::sqrt(area_deg2 / std::numbers::pi);
}

// Andrew's monotone chain. Counter-clockwise, collinear points dropped.
inline std::vector<AngularPoint> convex_hull(std::span<const AngularPoint> pts) {
  std::vector<AngularPoint> p(pts.begin(), pts.end());
  std::sort(p.begin(), p.end(), [](const AngularPoint& a, const AngularPoint& b) {
    return a.azimuth_deg < b.azimuth_deg ||
           (a.azimuth_deg == b.azimuth_deg && a.elevation_deg < b.elevation_deg);
  });
  p.erase(std::unique(p.begin(), p.end()), p.end());
  if (p.size() < 3) return p;
  std::vector<AngularPoint> hull(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && detail::cross(hull[k - 2], hull[k - 1], p[i]) <= 0.0) --k;
    hull[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && detail::cross(hull[k - 2], hull[k - 1], p[i - 1]) <= 0.0)
      --k;
    hull[k++] = p[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

// Half of the minimal caliper width of the convex hull (rotating calipers over
// hull edges). Zero for collinear input.
inline double minimal_half_width(std::span<const AngularPoint> v) {
  detail::require_polygon(v, "minimal_half_width");
  const auto hull = convex_hull(v);
  const std::size_t n = hull.size();
  if (n < 3) return 0.0;
  auto edge_dist = [&](std::size_t i, std::size_t j) {
    // Twice the triangle area over the edge length = distance to the edge line.
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % n];
    return detail::cross(a, b, hull[j]) /
           std::hypot(b.azimuth_deg - a.azimuth_deg,
                      b.elevation_deg - a.elevation_deg);
  };
  double best = std::numeric_limits<double>::infinity();
  std::size_t j = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (j == i) j = (j + 1) % n;
    while (edge_dist(i, (j + 1) % n) > edge_dist(i, j)) j = (j + 1) % n;
    best = std::min(best, edge_dist(i, j));
  }
  return 0.5 * best;
}

inline double minimal_half_width(const AngularPolygon& poly) {
  return minimal_half_width(poly.vertices());
}

// Even-odd rule.
inline bool polygon_contains(std::span<const AngularPoint> v, AngularPoint p) {
  bool inside = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    const auto& a = v[i];
    const auto& b = v[j];
    if ((a.elevation_deg > p.elevation_deg) !=
        (b.elevation_deg > p.elevation_deg)) {
      const double x = a.azimuth_deg + (p.elevation_deg - a.elevation_deg) *
                                           (b.azimuth_deg - a.azimuth_deg) /
                                           (b.elevation_deg - a.elevation_deg);
      if (p.azimuth_deg < x) inside = !inside;
    }
  }
  return inside;
}

// Distance (deg) from a point to the nearest polygon edge.
inline double boundary_distance(std::span<const AngularPoint> v,
                                AngularPoint p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i)
    best = std::min(best, detail::point_segment_distance(p, v[i],
                                                         v[(i + 1) % v.size()]));
  return best;
}

struct VisualSizeMetrics {
  double area_deg2 = 0.0;
  double radius_deg = 0.0;          // average-case accuracy requirement
  double half_min_width_deg = 0.0;  // conservative requirement, L_min / 2

  double min_width_deg() const { return 2.0 * half_min_width_deg; }

  static VisualSizeMetrics of(const AngularPolygon& poly) {
    VisualSizeMetrics m;
    m.area_deg2 = angular_polygon_area(poly);
    m.radius_deg = area_equivalent_radius(m.area_deg2);
    m.half_min_width_deg = minimal_half_width(poly);
    return m;
  }
};

// ---------------------------------------------------------------------------
// Projection of synthetic shapes.

struct OutOfView {
  bool operator==(const OutOfView&) const = default;
};

using Projection = std::variant<AngularPolygon, OutOfView>;

inline constexpr int kDefaultSphereVertices = 32;

// Silhouette of a sphere or box whose pose is given in the camera frame.
// Spheres become a regular n-gon of angular radius asin(r/d) about the center
// direction; boxes the convex hull of their 8 projected corners. Occlusion
// between objects is not modeled.
inline Projection project_object(const CameraModel& camera,
                                 const Pose& object_in_camera,
                                 const ObjectShape& shape,
                                 int sphere_vertices = kDefaultSphereVertices,
                                 ObjectId id = {}) {
  const Eigen::Vector3d& c = object_in_camera.position;
  const double d = c.norm();

  if (shape.kind == ShapeKind::kSphere) {
    const double r = shape.radius();
    if (d <= r)
      throw DegenerateProjection("camera inside sphere (d=" + std::to_string(d) +
                                 ", r=" + std::to_string(r) + ")");
    if (!in_field_of_view(camera, c)) return OutOfView{};
    const AngularPoint center = direction_to_angular(c);
    const double alpha = deg(std::asin(r / d));
    constexpr double kLimit = 89.999;
    std::vector<AngularPoint> v;
    v.reserve(sphere_vertices);
    for (int k = 0; k < sphere_vertices; ++k) {
      const double t = 2.0 * std::numbers::pi * k / sphere_vertices;
      v.push_back({std::clamp(center.azimuth_deg + alpha * std::cos(t), -kLimit,
                              kLimit),
                   std::clamp(center.elevation_deg + alpha * std::sin(t),
                              -kLimit, kLimit)});
    }
    return AngularPolygon(id, std::move(v));
  }

  const Eigen::Matrix3d rot = object_in_camera.rotation();
  const Eigen::Vector3d half = 0.5 * shape.dims;
  const Eigen::Vector3d origin_local = rot.transpose() * (-c);
  if ((origin_local.array().abs() <= half.array()).all())
    throw DegenerateProjection("camera inside box");
  if (!in_field_of_view(camera, c)) return OutOfView{};

  std::vector<AngularPoint> corners;
  corners.reserve(8);
  for (int i = 0; i < 8; ++i) {
    const Eigen::Vector3d local((i & 1) ? half.x() : -half.x(),
                                (i & 2) ? half.y() : -half.y(),
                                (i & 4) ? half.z() : -half.z());
    const Eigen::Vector3d p = c + rot * local;
    // A corner at or behind the camera plane has no linear projection.
    if (p.z() <= 1e-9) return OutOfView{};
    corners.push_back(direction_to_angular(p));
  }
  auto hull = convex_hull(corners);
  if (hull.size() < 3) throw DegenerateProjection("box projects to a segment");
  return AngularPolygon(id, std::move(hull));
}

}  // namespace gazectx
