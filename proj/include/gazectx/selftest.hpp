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

// Built-in reference checks: hand-evaluated values and brute-force oracles
// run against the library. Exposed by `gazectx selftest`.

#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "gazectx/analysis.hpp"
#include "gazectx/experiments.hpp"
#include "gazectx/gaze.hpp"
#include "gazectx/geometry.hpp"
#include "gazectx/oracles.hpp"
#include "gazectx/synthgen.hpp"

namespace gazectx {

struct SelfCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline std::string show(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline SelfCheck near_check(std::string name, double got, double want, double tol) {
  return {std::move(name), std::abs(got - want) <= tol,
          "got " + show(got) + ", want " + show(want) + " +/- " + show(tol)};
}

inline std::vector<AngularPoint> regular_polygon(int n, double radius_deg) {
  std::vector<AngularPoint> v;
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * i / n;
    v.push_back({radius_deg * std::cos(a), radius_deg * std::sin(a)});
  }
  return v;
}

// One stored square silhouette spanning [-2°, 2°] in both axes, 1 m ahead.
inline Recording square_target_recording() {
  Recording rec;
  rec.recording_id = "selftest-square";
  rec.camera = {610.0, 704.0, 704.0, 1408.0, 1408.0, 50.0};
  rec.silhouettes = SilhouetteSource::kStored;
  rec.catalog.push_back({ObjectId{1}, "mug", ObjectShape::sphere(0.03)});
  Frame f;
  f.t_ns = 0;
  ObjectObservation obs;
  obs.id = ObjectId{1};
  obs.pose.position = Eigen::Vector3d(0.0, 0.0, 1.0);
  obs.silhouette = AngularPolygon(ObjectId{1}, {{-2, -2}, {2, -2}, {2, 2}, {-2, 2}});
  f.objects.push_back(obs);
  rec.frames.push_back(f);
  return rec;
}

}  // namespace detail

inline std::vector<SelfCheck> run_selftest() {
  std::vector<SelfCheck> out;
  auto guarded = [&](const std::string& name, const std::function<SelfCheck()>& fn) {
    try {
      out.push_back(fn());
    } catch (const std::exception& e) {
      out.push_back({name, false, std::string("threw: ") + e.what()});
    }
  };
  using detail::near_check;

  guarded("pixel_to_angular atan(0.5)", [] {
    const CameraModel cam{500.0, 704.0, 704.0, 1408.0, 1408.0, 60.0};
    return near_check("pixel_to_angular atan(0.5)",
                      pixel_to_angular(cam, 704.0 + 250.0, 704.0).azimuth_deg,
                      deg(std::atan(0.5)), 1e-9);
  });
  guarded("area_equivalent_radius sqrt(100/pi)", [] {
    return near_check("area_equivalent_radius sqrt(100/pi)", area_equivalent_radius(100.0),
                      std::sqrt(100.0 / std::numbers::pi), 1e-9);
  });
  guarded("minimal_half_width regular 64-gon", [] {
    const auto v = detail::regular_polygon(64, 3.0);
    return near_check("minimal_half_width regular 64-gon", minimal_half_width(v),
                      3.0 * std::cos(std::numbers::pi / 64.0), 1e-9);
  });
  guarded("sphere silhouette asin(0.1)", [] {
    const CameraModel cam{610.0, 704.0, 704.0, 1408.0, 1408.0, 50.0};
    Pose p;
    p.position = Eigen::Vector3d(0.0, 0.0, 1.0);
    const auto proj = project_object(cam, p, ObjectShape::sphere(0.1), 256);
    const auto m = VisualSizeMetrics::of(std::get<AngularPolygon>(proj));
    const double want = deg(std::asin(0.1));
    return near_check("sphere silhouette asin(0.1)", m.radius_deg, want, 0.02 * want);
  });
  guarded("box silhouette vs ray rasterization", [] {
    const CameraModel cam{610.0, 704.0, 704.0, 1408.0, 1408.0, 50.0};
    Pose p;
    p.position = Eigen::Vector3d(0.0, 0.0, 10.0);
    const auto proj = project_object(cam, p, ObjectShape::box(1.0, 1.0, 1.0));
    const double area = angular_polygon_area(std::get<AngularPolygon>(proj));
    const double ref = oracle::raster_box_area(p, Eigen::Vector3d(1, 1, 1), -3.5, 3.5, -3.5, 3.5);
    return near_check("box silhouette vs ray rasterization", area, ref, 0.02 * ref);
  });
  guarded("percentile q90 of 1..100", [] {
    std::vector<double> v;
    for (int i = 1; i <= 100; ++i) v.push_back(i);
    return near_check("percentile q90 of 1..100", percentile(v, 90.0), 90.1, 1e-9);
  });
  guarded("bootstrap 50/50 interval", [] {
    std::vector<int> o(100, 0);
    std::fill(o.begin(), o.begin() + 50, 1);
    const auto ci = bootstrap_ci(o, 0.95, 10000, 1);
    const bool ok = std::abs(ci.low - 0.40) <= 0.02 && std::abs(ci.high - 0.60) <= 0.02;
    return SelfCheck{"bootstrap 50/50 interval", ok,
                     "got (" + detail::show(ci.low) + ", " + detail::show(ci.high) +
                         "), want (0.40, 0.60) +/- 0.02"};
  });
  guarded("assignment tolerance boundary", [] {
    const Recording rec = detail::square_target_recording();
    FixationEvent fx;
    fx.centroid_direction = angular_to_direction({3.0, 0.0});  // 1° outside
    const auto wide = assign_fixation_object(fx, rec, 1.5);
    const auto tight = assign_fixation_object(fx, rec, 0.5);
    const bool ok = wide.object == ObjectId{1} && wide.kind == AssignmentKind::kTolerance &&
                    !tight.object;
    return SelfCheck{"assignment tolerance boundary", ok,
                     std::string("tol 1.5 -> ") + to_string(wide.kind) + ", tol 0.5 -> " +
                         to_string(tight.kind)};
  });
  guarded("zero-error scanpath recovery", [] {
    SynthConfig cfg;
    cfg.seed = 11;
    cfg.n_fixations = 20;
    cfg.gaze_jitter_deg = 0.0;
    const auto scene = generate(cfg);
    const auto sp = build_scanpath(scene.recording, DetectorConfig{});
    const auto f1 = oracle::interval_f1(sp.fixations, scene.truth.true_fixations);
    const bool seq = oracle::assignment_sequence_matches(sp, scene.truth.true_fixations);
    return SelfCheck{"zero-error scanpath recovery", f1.f1 >= 0.95 && seq,
                     "F1 " + detail::show(f1.f1) + (seq ? ", sequence exact" : ", sequence differs")};
  });
  guarded("perturb_gaze mean offset", [] {
    SynthConfig cfg;
    cfg.seed = 3;
    cfg.gaze_jitter_deg = 0.0;
    const auto scene = generate(cfg);
    const auto moved = perturb_gaze(scene.recording, 3.0, 5);
    double sum = 0.0;
    for (std::size_t i = 0; i < moved.frames.size(); ++i)
      sum += angular_distance(scene.recording.frames[i].gaze, moved.frames[i].gaze);
    return near_check("perturb_gaze mean offset", sum / moved.frames.size(), 3.0, 0.2);
  });
  guarded("echo-previous mock on repeated targets", [] {
    SynthConfig cfg;
    cfg.seed = 21;
    cfg.n_fixations = 30;
    cfg.revisit_probability = 1.0;
    auto scene = generate(cfg);
    std::vector<TrialSource> src(1);
    src[0].scanpath = build_scanpath(scene.recording, DetectorConfig{});
    src[0].recording = std::move(scene.recording);
    const auto trials = sample_e1_trials(src, 1000, 1).trials;
    MockClient mock(MockStrategy::kEchoPrevious, "mock:echo-prev", 0);
    const Agent agents[] = {client_agent(mock)};
    SweepOptions opt;
    opt.k_values = {1, 5, 10};
    opt.resamples = 200;
    const auto table = run_sweep(trials, src, agents, opt);
    bool ok = !trials.empty();
    for (const auto& r : table.rows) ok = ok && r.accuracy && *r.accuracy == 1.0;
    return SelfCheck{"echo-previous mock on repeated targets", ok,
                     std::to_string(trials.size()) + " trials"};
  });
  return out;
}

}  // namespace gazectx
