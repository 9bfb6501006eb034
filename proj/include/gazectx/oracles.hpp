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

// Brute-force reference computations and ground-truth scoring. These share
// no code with the paths they check beyond the basic types.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gazectx/gaze.hpp"
#include "gazectx/geometry.hpp"
#include "gazectx/synthgen.hpp"
#include "gazectx/types.hpp"

namespace gazectx::oracle {

// Area of a convex polygon by counting grid cell centers inside it. The grid
// spans the polygon's bounding box with `cells` cells per side.
inline double raster_area_convex(std::span<const AngularPoint> v, int cells = 1000) {
  double x0 = v[0].azimuth_deg, x1 = x0, y0 = v[0].elevation_deg, y1 = y0;
  double signed2 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    x0 = std::min(x0, v[i].azimuth_deg);
    x1 = std::max(x1, v[i].azimuth_deg);
    y0 = std::min(y0, v[i].elevation_deg);
    y1 = std::max(y1, v[i].elevation_deg);
    const auto& a = v[i];
    const auto& b = v[(i + 1) % v.size()];
    signed2 += a.azimuth_deg * b.elevation_deg - b.azimuth_deg * a.elevation_deg;
  }
  const double orient = signed2 >= 0.0 ? 1.0 : -1.0;
  const double dx = (x1 - x0) / cells, dy = (y1 - y0) / cells;
  std::int64_t inside = 0;
  for (int iy = 0; iy < cells; ++iy) {
    const double y = y0 + (iy + 0.5) * dy;
    for (int ix = 0; ix < cells; ++ix) {
      const double x = x0 + (ix + 0.5) * dx;
      bool in = true;
      for (std::size_t i = 0; i < v.size() && in; ++i) {
        const auto& a = v[i];
        const auto& b = v[(i + 1) % v.size()];
        const double c = (b.azimuth_deg - a.azimuth_deg) * (y - a.elevation_deg) -
                         (b.elevation_deg - a.elevation_deg) * (x - a.azimuth_deg);
        in = orient * c >= 0.0;
      }
      inside += in;
    }
  }
  return static_cast<double>(inside) * dx * dy;
}

// Slab test: does the ray from the origin along `dir` hit the oriented box?
inline bool ray_hits_box(const Eigen::Vector3d& dir, const Eigen::Vector3d& center,
                         const Eigen::Matrix3d& rot, const Eigen::Vector3d& half) {
  const Eigen::Vector3d o = rot.transpose() * (-center);
  const Eigen::Vector3d d = rot.transpose() * dir;
  double t0 = 0.0, t1 = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (std::abs(d[a]) < 1e-15) {
      if (std::abs(o[a]) > half[a]) return false;
      continue;
    }
    double ta = (-half[a] - o[a]) / d[a];
    double tb = (half[a] - o[a]) / d[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

// Angular silhouette area (deg²) of a box in the camera frame, by casting one
// ray per cell of a cells×cells grid over [az0, az1]×[el0, el1].
inline double raster_box_area(const Pose& box_in_camera, const Eigen::Vector3d& dims,
                              double az0, double az1, double el0, double el1,
                              int cells = 1000) {
  const Eigen::Matrix3d rot = box_in_camera.rotation();
  const Eigen::Vector3d half = dims / 2.0;
  const double daz = (az1 - az0) / cells, del = (el1 - el0) / cells;
  std::int64_t hits = 0;
  for (int iy = 0; iy < cells; ++iy) {
    const double ty = std::tan(rad(el0 + (iy + 0.5) * del));
    for (int ix = 0; ix < cells; ++ix) {
      const double tx = std::tan(rad(az0 + (ix + 0.5) * daz));
      hits += ray_hits_box(Eigen::Vector3d(tx, ty, 1.0), box_in_camera.position, rot, half);
    }
  }
  return static_cast<double>(hits) * daz * del;
}

// ---------------------------------------------------------------------------
// Ground-truth scoring.

inline double overlap_ns(std::int64_t a0, std::int64_t a1, std::int64_t b0, std::int64_t b1) {
  return static_cast<double>(std::max<std::int64_t>(0, std::min(a1, b1) - std::max(a0, b0)));
}

struct F1Score {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t matched = 0;
};

// One-to-one matching of detected and true intervals: a pair matches when
// their temporal intersection-over-union is at least 0.5.
inline F1Score interval_f1(std::span<const FixationEvent> detected,
                           std::span<const TrueFixation> truth) {
  F1Score s;
  std::vector<bool> used(truth.size(), false);
  for (const auto& d : detected) {
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (used[i]) continue;
      const auto& t = truth[i];
      const double inter = overlap_ns(d.start_ns, d.end_ns, t.start_ns, t.end_ns);
      const double uni = static_cast<double>(std::max(d.end_ns, t.end_ns) -
                                             std::min(d.start_ns, t.start_ns));
      if (uni > 0.0 && inter / uni >= 0.5) {
        used[i] = true;
        ++s.matched;
        break;
      }
    }
  }
  s.precision = detected.empty() ? 0.0 : static_cast<double>(s.matched) / detected.size();
  s.recall = truth.empty() ? 0.0 : static_cast<double>(s.matched) / truth.size();
  s.f1 = s.precision + s.recall > 0.0
             ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
             : 0.0;
  return s;
}

// Share of true fixations whose most-overlapping detected fixation is
// assigned to the true target. Missed fixations count as wrong.
inline double assignment_accuracy(const Scanpath& sp, std::span<const TrueFixation> truth) {
  if (truth.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& t : truth) {
    const FixationEvent* best = nullptr;
    double best_overlap = 0.0;
    for (const auto& d : sp.fixations) {
      const double o = overlap_ns(d.start_ns, d.end_ns, t.start_ns, t.end_ns);
      if (o > best_overlap) {
        best_overlap = o;
        best = &d;
      }
    }
    if (best && best->assigned_object && *best->assigned_object == t.target) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(truth.size());
}

// Whether the assigned objects, in order, equal the true targets.
inline bool assignment_sequence_matches(const Scanpath& sp, std::span<const TrueFixation> truth) {
  if (sp.fixations.size() != truth.size()) return false;
  for (std::size_t i = 0; i < truth.size(); ++i)
    if (sp.fixations[i].assigned_object != truth[i].target) return false;
  return true;
}

}  // namespace gazectx::oracle
