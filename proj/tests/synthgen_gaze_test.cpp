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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "gazectx/gaze.hpp"
#include "gazectx/oracles.hpp"
#include "gazectx/scene.hpp"
#include "gazectx/selftest.hpp"
#include "gazectx/synthgen.hpp"

namespace gazectx {
namespace {

constexpr std::int64_t kStepNs = 33'333'333;

std::vector<GazeSample> constant_run(std::int64_t t0, int n, const Eigen::Vector3d& d) {
  std::vector<GazeSample> s;
  for (int i = 0; i < n; ++i) s.push_back({t0 + i * kStepNs, d.normalized()});
  return s;
}

double total_fixation_ms(const std::vector<FixationEvent>& ev) {
  double t = 0.0;
  for (const auto& e : ev) t += e.duration_ms();
  return t;
}

SynthConfig tiny_objects(std::uint64_t seed) {
  SynthConfig cfg;
  cfg.seed = seed;
  cfg.placement_radius_m = {1.0, 1.0};
  const double r = std::sin(rad(1.0));
  cfg.object_size_m = {r, r};
  cfg.sphere_fraction = 1.0;
  return cfg;
}

// --- generation ---------------------------------------------------------

TEST(Generate, DeterministicBytes) {
  SynthConfig cfg;
  cfg.seed = 99;
  const auto a = generate(cfg), b = generate(cfg);
  EXPECT_EQ(save_recording(a.recording), save_recording(b.recording));
  EXPECT_EQ(truth_to_json(a.truth), truth_to_json(b.truth));
  cfg.seed = 100;
  EXPECT_NE(save_recording(generate(cfg).recording), save_recording(a.recording));
}

TEST(Generate, CountsFollowConfig) {
  SynthConfig cfg;
  cfg.n_fixations = 5;
  cfg.interaction_fraction = 0.0;
  const auto s = generate(cfg);
  EXPECT_EQ(s.truth.true_fixations.size(), 5u);
  EXPECT_TRUE(s.truth.true_interaction_targets.empty());
  EXPECT_TRUE(s.recording.interactions.empty());
}

TEST(Generate, ZeroJitterHitsCentroid) {
  SynthConfig cfg;
  cfg.seed = 4;
  cfg.n_objects = 1;
  cfg.n_fixations = 6;
  cfg.gaze_jitter_deg = 0.0;
  const auto s = generate(cfg);
  int checked = 0;
  for (const auto& tf : s.truth.true_fixations) {
    for (const auto& f : s.recording.frames) {
      if (f.t_ns < tf.start_ns || f.t_ns > tf.end_ns) continue;
      const auto* obs = f.find(tf.target);
      ASSERT_NE(obs, nullptr);
      const Eigen::Vector3d want = object_in_camera(f, *obs).position.normalized();
      EXPECT_LT(angular_distance(f.gaze, want), 1e-6);
      ++checked;
    }
  }
  EXPECT_GT(checked, 0);
}

TEST(Generate, ThresholdsExercisedOnBothSides) {
  SynthConfig cfg;
  cfg.seed = 8;
  const auto s = generate(cfg);
  const auto& tf = s.truth.true_fixations;
  for (const auto& f : tf) EXPECT_GE(f.end_ns - f.start_ns, 150'000'000);
  const auto& frames = s.recording.frames;
  for (std::size_t i = 0; i + 1 < tf.size(); ++i) {
    double peak = 0.0;
    for (std::size_t k = 0; k + 1 < frames.size(); ++k) {
      if (frames[k].t_ns < tf[i].end_ns || frames[k + 1].t_ns > tf[i + 1].start_ns) continue;
      const double dt = (frames[k + 1].t_ns - frames[k].t_ns) * 1e-9;
      peak = std::max(peak, angular_distance(frames[k].gaze, frames[k + 1].gaze) / dt);
    }
    EXPECT_GT(peak, 100.0) << "saccade " << i;
  }
}

TEST(Generate, SphereSilhouettesMatchAsin) {
  SynthConfig cfg;
  cfg.seed = 13;
  cfg.sphere_fraction = 1.0;
  const auto s = generate(cfg);
  const auto& rec = s.recording;
  int n = 0;
  for (const auto& f : rec.frames) {
    for (const auto& obs : f.objects) {
      const auto sil = resolve_silhouette(rec, f, obs);
      if (sil.status != SilhouetteStatus::kAvailable) continue;
      const double want =
          deg(std::asin(rec.entry(obs.id).shape.radius() / object_distance(f, obs.id)));
      EXPECT_NEAR(VisualSizeMetrics::of(*sil.polygon).radius_deg, want, 0.02 * want);
      ++n;
    }
  }
  EXPECT_GT(n, 0);
}

TEST(Generate, ConfigErrors) {
  SynthConfig cfg;
  cfg.n_objects = 0;
  EXPECT_THROW(generate(cfg), ConfigError);
  cfg = SynthConfig{};
  cfg.fixation_duration_ms = {100.0, 600.0};
  EXPECT_THROW(generate(cfg), ConfigError);
  cfg = SynthConfig{};
  cfg.interaction_fraction = 1.5;
  EXPECT_THROW(generate(cfg), ConfigError);
  cfg = SynthConfig{};
  cfg.n_objects = 200;
  EXPECT_THROW(generate(cfg), PlacementFailure);
}

TEST(Generate, TruthRoundTrip) {
  SynthConfig cfg;
  cfg.interaction_fraction = 0.5;
  const auto s = generate(cfg);
  EXPECT_EQ(truth_from_json(truth_to_json(s.truth)), s.truth);
}

// --- perturbation -------------------------------------------------------

double mean_offset(const Recording& a, const Recording& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.frames.size(); ++i)
    sum += angular_distance(a.frames[i].gaze, b.frames[i].gaze);
  return sum / static_cast<double>(a.frames.size());
}

TEST(PerturbGaze, ZeroIsIdentity) {
  const auto rec = generate(SynthConfig{}).recording;
  EXPECT_TRUE(perturb_gaze(rec, 0.0, 1) == rec);
  EXPECT_THROW(perturb_gaze(rec, -1.0, 1), DomainError);
}

TEST(PerturbGaze, MeanOffsetAcrossSeeds) {
  SynthConfig cfg;
  cfg.seed = 3;
  cfg.n_fixations = 100;
  const auto rec = generate(cfg).recording;
  ASSERT_GE(rec.frames.size(), 1000u);
  const auto a = perturb_gaze(rec, 3.0, 5);
  const auto b = perturb_gaze(rec, 3.0, 6);
  EXPECT_NEAR(mean_offset(rec, a), 3.0, 0.2);
  EXPECT_NEAR(mean_offset(rec, b), 3.0, 0.2);
  EXPECT_FALSE(a == b);
  EXPECT_TRUE(perturb_gaze(rec, 3.0, 5) == a);
}

// --- detection ----------------------------------------------------------

TEST(DetectFixations, ConstantGazeIsOneFixation) {
  const auto s = constant_run(0, 16, Eigen::Vector3d::UnitZ());  // 500 ms at 30 Hz
  const auto ev = detect_fixations(s, DetectorConfig{});
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].start_ns, s.front().t_ns);
  EXPECT_EQ(ev[0].end_ns, s.back().t_ns);
}

TEST(DetectFixations, ShortRunsAreDropped) {
  auto s = constant_run(0, 4, Eigen::Vector3d::UnitZ());
  const auto tail = constant_run(4 * kStepNs, 4, Eigen::Vector3d(1, 0, 1));
  s.insert(s.end(), tail.begin(), tail.end());
  EXPECT_TRUE(detect_fixations(s, DetectorConfig{}).empty());
}

TEST(DetectFixations, InputErrors) {
  const auto one = constant_run(0, 1, Eigen::Vector3d::UnitZ());
  EXPECT_THROW(detect_fixations(one, DetectorConfig{}), InputError);
  auto s = constant_run(0, 5, Eigen::Vector3d::UnitZ());
  std::swap(s[1].t_ns, s[2].t_ns);
  EXPECT_THROW(detect_fixations(s, DetectorConfig{}), InputError);
}

TEST(DetectFixations, TranslationAndRotationInvariance) {
  SynthConfig cfg;
  cfg.seed = 21;
  const auto samples = gaze_samples(generate(cfg).recording);
  const auto base = detect_fixations(samples, DetectorConfig{});
  ASSERT_FALSE(base.empty());

  auto shifted = samples;
  for (auto& s : shifted) s.t_ns += 123'456'789;
  const auto ev = detect_fixations(shifted, DetectorConfig{});
  ASSERT_EQ(ev.size(), base.size());
  for (std::size_t i = 0; i < ev.size(); ++i) {
    EXPECT_EQ(ev[i].start_ns, base[i].start_ns + 123'456'789);
    EXPECT_EQ(ev[i].end_ns, base[i].end_ns + 123'456'789);
  }

  const Eigen::Matrix3d r =
      Eigen::AngleAxisd(0.4, Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix();
  auto rotated = samples;
  for (auto& s : rotated) s.direction = r * s.direction;
  const auto rev = detect_fixations(rotated, DetectorConfig{});
  ASSERT_EQ(rev.size(), base.size());
  for (std::size_t i = 0; i < rev.size(); ++i) {
    EXPECT_EQ(rev[i].start_ns, base[i].start_ns);
    EXPECT_EQ(rev[i].end_ns, base[i].end_ns);
  }
}

TEST(DetectFixations, ThresholdMonotonicity) {
  SynthConfig cfg;
  cfg.seed = 22;
  cfg.gaze_jitter_deg = 1.5;
  const auto samples = gaze_samples(generate(cfg).recording);
  double prev = -1.0;
  for (double thr : {20.0, 40.0, 60.0, 100.0, 200.0, 400.0}) {
    DetectorConfig d;
    d.velocity_threshold_deg_s = thr;
    const double t = total_fixation_ms(detect_fixations(samples, d));
    EXPECT_GE(t, prev) << "threshold " << thr;
    prev = t;
  }
}

// --- assignment ---------------------------------------------------------

Recording two_sphere_recording(double near_z, double far_z) {
  Recording rec;
  rec.recording_id = "overlap";
  rec.camera = SynthConfig{}.camera;
  rec.catalog = {{ObjectId{1}, "near", ObjectShape::sphere(0.05)},
                 {ObjectId{2}, "far", ObjectShape::sphere(0.2)}};
  for (int i = 0; i < 3; ++i) {
    Frame f;
    f.t_ns = i * kStepNs;
    Pose a, b;
    a.position = Eigen::Vector3d(0, 0, near_z);
    b.position = Eigen::Vector3d(0, 0, far_z);
    f.objects = {{ObjectId{1}, a, std::nullopt}, {ObjectId{2}, b, std::nullopt}};
    rec.frames.push_back(f);
  }
  return rec;
}

TEST(AssignFixation, SoleObjectAtCentroid) {
  auto rec = two_sphere_recording(1.0, 5.0);  // the far sphere is beyond 2 m
  FixationEvent fx;
  fx.end_ns = 2 * kStepNs;
  const auto a = assign_fixation_object(fx, rec);
  EXPECT_EQ(a.object, ObjectId{1});
  EXPECT_EQ(a.kind, AssignmentKind::kHit);
}

TEST(AssignFixation, NearestDepthWinsOnOverlap) {
  const auto rec = two_sphere_recording(0.5, 1.8);
  FixationEvent fx;
  fx.end_ns = 2 * kStepNs;
  EXPECT_EQ(assign_fixation_object(fx, rec).object, ObjectId{1});
}

TEST(AssignFixation, NeverBeyondTwoMeters) {
  auto rec = two_sphere_recording(2.5, 3.0);
  FixationEvent fx;
  fx.end_ns = 2 * kStepNs;
  EXPECT_FALSE(assign_fixation_object(fx, rec, 90.0).object.has_value());
}

TEST(AssignFixation, ToleranceBoundary) {
  const Recording rec = detail::square_target_recording();
  FixationEvent fx;
  fx.centroid_direction = angular_to_direction({3.0, 0.0});  // 1 degree outside
  const auto wide = assign_fixation_object(fx, rec, 1.5);
  EXPECT_EQ(wide.object, ObjectId{1});
  EXPECT_EQ(wide.kind, AssignmentKind::kTolerance);
  EXPECT_FALSE(assign_fixation_object(fx, rec, 0.5).object.has_value());
}

// --- scanpaths ----------------------------------------------------------

TEST(BuildScanpath, RecoversGroundTruth) {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.n_fixations = 20;
    const auto s = generate(cfg);
    const auto sp = build_scanpath(s.recording, DetectorConfig{});
    EXPECT_GE(oracle::interval_f1(sp.fixations, s.truth.true_fixations).f1, 0.95);
  }
}

TEST(BuildScanpath, ZeroJitterExactSequence) {
  SynthConfig cfg;
  cfg.seed = 14;
  cfg.gaze_jitter_deg = 0.0;
  const auto s = generate(cfg);
  const auto sp = build_scanpath(s.recording, DetectorConfig{});
  EXPECT_EQ(sp.fixations.size(), s.truth.true_fixations.size());
  EXPECT_TRUE(oracle::assignment_sequence_matches(sp, s.truth.true_fixations));
}

TEST(BuildScanpath, LargeErrorCollapsesAccuracy) {
  const auto s = generate(tiny_objects(31));
  const auto clean = build_scanpath(s.recording, DetectorConfig{});
  EXPECT_GE(oracle::assignment_accuracy(clean, s.truth.true_fixations), 0.9);
  const auto moved = perturb_gaze(s.recording, 10.0, 2);
  const auto sp = build_scanpath(moved, DetectorConfig{});
  EXPECT_LT(oracle::assignment_accuracy(sp, s.truth.true_fixations), 0.2);
}

TEST(BuildScanpath, InteractionsDoNotMatter) {
  SynthConfig cfg;
  cfg.interaction_fraction = 0.5;
  auto rec = generate(cfg).recording;
  const auto a = build_scanpath(rec, DetectorConfig{});
  rec.interactions.clear();
  const auto b = build_scanpath(rec, DetectorConfig{});
  EXPECT_EQ(fixations_csv(a), fixations_csv(b));
}

}  // namespace
}  // namespace gazectx
