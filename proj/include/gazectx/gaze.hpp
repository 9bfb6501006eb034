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

// Velocity-threshold (I-VT) fixation detection, fixation-to-object assignment
// and scanpath assembly.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gazectx/error.hpp"
#include "gazectx/geometry.hpp"
#include "gazectx/scene.hpp"

namespace gazectx {

struct DetectorConfig {
  double velocity_threshold_deg_s = 100.0;
  double min_duration_ms = 150.0;
  int max_gap_samples = 1;

  void check() const {
    if (!(velocity_threshold_deg_s > 0.0))
      throw ConfigError("detector: velocity_threshold_deg_s must be > 0");
    if (!(min_duration_ms > 0.0))
      throw ConfigError("detector: min_duration_ms must be > 0");
    if (max_gap_samples < 0)
      throw ConfigError("detector: max_gap_samples must be >= 0");
  }
};

// Default assignment tolerance: the device's stated median error.
inline constexpr double kDefaultToleranceDeg = 1.5;
// Objects farther than this are never assigned.
inline constexpr double kMaxFixatedDistanceM = 2.0;

struct GazeSample {
  std::int64_t t_ns = 0;
  Eigen::Vector3d direction = Eigen::Vector3d::UnitZ();
};

enum class AssignmentKind {
  kNone,       // unassigned
  kHit,        // gaze inside the silhouette
  kTolerance,  // gaze within tolerance of the silhouette boundary
};

inline const char* to_string(AssignmentKind k) {
  switch (k) {
    case AssignmentKind::kHit: return "hit";
    case AssignmentKind::kTolerance: return "tolerance";
    case AssignmentKind::kNone: break;
  }
  return "none";
}

struct FixationEvent {
  std::int64_t start_ns = 0;
  std::int64_t end_ns = 0;
  Eigen::Vector3d centroid_direction = Eigen::Vector3d::UnitZ();
  std::optional<ObjectId> assigned_object;
  AssignmentKind assignment = AssignmentKind::kNone;

  double duration_ms() const { return static_cast<double>(end_ns - start_ns) / 1e6; }
  std::int64_t midpoint_ns() const { return start_ns + (end_ns - start_ns) / 2; }
};

struct Scanpath {
  std::vector<FixationEvent> fixations;
};

// A fixation is a maximal run of samples where each kept sample links to the
// next kept one: the angular displacement between them, divided by the mean
// sample interval spanned, stays below the threshold. Up to max_gap_samples
// consecutive samples may be skipped when the link across them holds; this
// bridges single-sample outliers but never a real saccade, which does not
// return to its start. Runs shorter than min_duration_ms are dropped. Velocity
// uses adjacent-sample differencing with no smoothing window.
inline std::vector<FixationEvent> detect_fixations(std::span<const GazeSample> samples,
                                                   const DetectorConfig& cfg) {
  cfg.check();
  if (samples.size() < 2)
    throw InputError("detect_fixations: need >= 2 samples, got " +
                     std::to_string(samples.size()));
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].t_ns > samples[i - 1].t_ns))
      throw InputError("detect_fixations: timestamps not increasing at sample " +
                       std::to_string(i) + " (" + std::to_string(samples[i - 1].t_ns) +
                       " -> " + std::to_string(samples[i].t_ns) + ")");
  }

  const std::size_t n = samples.size();
  const double thr = cfg.velocity_threshold_deg_s;
  auto linked = [&](std::size_t a, std::size_t b) {
    const double dt_s = static_cast<double>(samples[b].t_ns - samples[a].t_ns) * 1e-9;
    const double per_interval = dt_s / static_cast<double>(b - a);
    return angular_distance(samples[a].direction, samples[b].direction) <
           thr * per_interval;
  };

  std::vector<FixationEvent> out;
  const auto min_ns = static_cast<std::int64_t>(std::llround(cfg.min_duration_ms * 1e6));
  std::size_t start = 0;
  while (start < n) {
    std::vector<std::size_t> kept{start};
    std::size_t end = start;
    for (;;) {
      std::optional<std::size_t> next;
      for (std::size_t b = end + 1;
           b < n && b <= end + 1 + static_cast<std::size_t>(cfg.max_gap_samples); ++b) {
        if (linked(end, b)) {
          next = b;
          break;
        }
      }
      if (!next) break;
      end = *next;
      kept.push_back(end);
    }
    if (samples[end].t_ns - samples[start].t_ns >= min_ns) {
      Eigen::Vector3d sum = Eigen::Vector3d::Zero();
      for (std::size_t k : kept) sum += samples[k].direction.normalized();
      FixationEvent ev;
      ev.start_ns = samples[start].t_ns;
      ev.end_ns = samples[end].t_ns;
      ev.centroid_direction = sum.normalized();
      out.push_back(ev);
    }
    start = end + 1;
  }
  return out;
}

inline std::vector<GazeSample> gaze_samples(const Recording& rec) {
  std::vector<GazeSample> s;
  s.reserve(rec.frames.size());
  for (const auto& f : rec.frames) s.push_back({f.t_ns, f.gaze});
  return s;
}

struct Assignment {
  std::optional<ObjectId> object;
  AssignmentKind kind = AssignmentKind::kNone;
};

// Picks the object under the fixation at the frame nearest its midpoint.
// Candidates are observed objects within max_distance_m with an available
// silhouette. A containing silhouette wins, the nearest object on overlap;
// otherwise the object whose boundary is closest in angle, if within
// tolerance_deg.
inline Assignment assign_fixation_object(const FixationEvent& fix, const Recording& rec,
                                         double tolerance_deg = kDefaultToleranceDeg,
                                         double max_distance_m = kMaxFixatedDistanceM) {
  if (rec.frames.empty()) return {};
  const Frame& frame = rec.frames[rec.nearest_frame(fix.midpoint_ns())];
  if (frame.objects.empty() || !(fix.centroid_direction.z() > 0.0)) return {};
  const AngularPoint gaze = direction_to_angular(fix.centroid_direction);

  std::optional<ObjectId> hit;
  double hit_dist = std::numeric_limits<double>::infinity();
  std::optional<ObjectId> near;
  double near_angle = std::numeric_limits<double>::infinity();
  double near_dist = std::numeric_limits<double>::infinity();

  for (const auto& obs : frame.objects) {
    const double dist = object_distance(frame, obs.id);
    if (dist > max_distance_m) continue;
    const auto sil = resolve_silhouette(rec, frame, obs);
    if (sil.status != SilhouetteStatus::kAvailable) continue;
    const auto verts = sil.polygon->vertices();
    if (polygon_contains(verts, gaze)) {
      if (dist < hit_dist) {
        hit = obs.id;
        hit_dist = dist;
      }
      continue;
    }
    const double angle = boundary_distance(verts, gaze);
    if (angle <= tolerance_deg &&
        (angle < near_angle || (angle == near_angle && dist < near_dist))) {
      near = obs.id;
      near_angle = angle;
      near_dist = dist;
    }
  }
  if (hit) return {hit, AssignmentKind::kHit};
  if (near) return {near, AssignmentKind::kTolerance};
  return {};
}

// Detection then assignment over the whole recording. Consecutive fixations
// on the same object stay separate; unassigned fixations are kept.
inline Scanpath build_scanpath(const Recording& rec, const DetectorConfig& detector,
                               double tolerance_deg = kDefaultToleranceDeg) {
  const auto samples = gaze_samples(rec);
  Scanpath sp;
  sp.fixations = detect_fixations(samples, detector);
  for (auto& fx : sp.fixations) {
    const auto a = assign_fixation_object(fx, rec, tolerance_deg);
    fx.assigned_object = a.object;
    fx.assignment = a.kind;
  }
  return sp;
}

struct AssignmentCounts {
  std::size_t hit = 0;
  std::size_t tolerance = 0;
  std::size_t none = 0;
};

inline AssignmentCounts count_assignments(const Scanpath& sp) {
  AssignmentCounts c;
  for (const auto& f : sp.fixations) {
    switch (f.assignment) {
      case AssignmentKind::kHit: ++c.hit; break;
      case AssignmentKind::kTolerance: ++c.tolerance; break;
      case AssignmentKind::kNone: ++c.none; break;
    }
  }
  return c;
}

// CSV dump: start_ns,end_ns,duration_ms,object_id,az_deg,el_deg. Unassigned
// fixations leave object_id empty; directions behind the camera leave the
// angles empty.
inline std::string fixations_csv(const Scanpath& sp) {
  std::string out = "start_ns,end_ns,duration_ms,object_id,az_deg,el_deg\n";
  char buf[128];
  for (const auto& f : sp.fixations) {
    out += std::to_string(f.start_ns) + "," + std::to_string(f.end_ns) + ",";
    std::snprintf(buf, sizeof buf, "%.3f", f.duration_ms());
    out += buf;
    out += ",";
    if (f.assigned_object) out += std::to_string(f.assigned_object->value);
    out += ",";
    if (f.centroid_direction.z() > 0.0) {
      const auto a = direction_to_angular(f.centroid_direction);
      std::snprintf(buf, sizeof buf, "%.6f,%.6f", a.azimuth_deg, a.elevation_deg);
      out += buf;
    } else {
      out += ",";
    }
    out += "\n";
  }
  return out;
}

}  // namespace gazectx
