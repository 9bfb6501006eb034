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

// Deterministic synthetic scenes and scanpaths with ground-truth sidecars.
//
// Scenes are static: a device at a random world pose looks at spheres and
// boxes placed inside its field of view with non-overlapping silhouettes. The
// scanpath alternates fixations (gaze at the target's center plus Gaussian
// jitter) and linearly interpolated saccades. Fixation and saccade boundaries
// sit on the sample grid so ground-truth intervals are exactly recoverable.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gazectx/error.hpp"
#include "gazectx/geometry.hpp"
#include "gazectx/rng.hpp"
#include "gazectx/scene.hpp"

namespace gazectx {

struct Range {
  double min = 0.0;
  double max = 0.0;
  bool operator==(const Range&) const = default;
};

struct SynthConfig {
  std::uint64_t seed = 0;
  int n_objects = 8;
  Range object_size_m{0.04, 0.12};       // sphere radius / box half-extent
  Range placement_radius_m{0.4, 1.9};    // distance from the device
  int n_fixations = 40;
  Range fixation_duration_ms{150.0, 600.0};
  Range saccade_duration_ms{30.0, 80.0};
  double gaze_jitter_deg = 0.3;
  double interaction_fraction = 0.2;
  double sample_rate_hz = 30.0;
  double sphere_fraction = 0.5;          // remaining objects are boxes
  double revisit_probability = 0.0;      // chance the next target repeats
  std::string task_label = "synthetic";
  CameraModel camera{610.0, 704.0, 704.0, 1408.0, 1408.0, 50.0};

  void check() const {
    auto fail = [](const std::string& m) { throw ConfigError("synth: " + m); };
    if (n_objects < 1) fail("n_objects must be >= 1");
    if (n_fixations < 1) fail("n_fixations must be >= 1");
    auto range = [&](Range r, const char* name) {
      if (!(r.min > 0.0) || !(r.max >= r.min))
        fail(std::string(name) + " must be a non-empty positive range");
    };
    range(object_size_m, "object_size_range");
    range(placement_radius_m, "placement_radius_range");
    range(fixation_duration_ms, "fixation_duration_range_ms");
    range(saccade_duration_ms, "saccade_duration_range_ms");
    if (fixation_duration_ms.min < 150.0)
      fail("fixation durations must be >= 150 ms");
    if (!(gaze_jitter_deg >= 0.0)) fail("gaze_jitter_deg must be >= 0");
    if (!(interaction_fraction >= 0.0 && interaction_fraction <= 1.0))
      fail("interaction_fraction must be in [0, 1]");
    if (!(sample_rate_hz > 0.0)) fail("sample_rate_hz must be > 0");
    if (!(sphere_fraction >= 0.0 && sphere_fraction <= 1.0))
      fail("sphere_fraction must be in [0, 1]");
    if (!(revisit_probability >= 0.0 && revisit_probability <= 1.0))
      fail("revisit_probability must be in [0, 1]");
    if (auto err = camera.check()) fail("camera: " + *err);
  }
};

struct TrueFixation {
  std::int64_t start_ns = 0;
  std::int64_t end_ns = 0;
  ObjectId target;
  bool operator==(const TrueFixation&) const = default;
};

struct TrueInteraction {
  std::int64_t t_ns = 0;
  ObjectId target;
  bool operator==(const TrueInteraction&) const = default;
};

struct GroundTruth {
  std::vector<TrueFixation> true_fixations;
  std::vector<TrueInteraction> true_interaction_targets;
  bool operator==(const GroundTruth&) const = default;
};

struct SynthScene {
  Recording recording;
  GroundTruth truth;
};

// Saccades are generated with a peak velocity of at least this, three times
// the default detection threshold.
inline constexpr double kSaccadePeakVelocityDegS = 300.0;
// Minimum angular separation of object centers; keeps every direct saccade at
// or above the peak velocity even when it spans a single sample interval.
inline constexpr double kMinCenterSeparationDeg = 11.0;
// Same-target revisits leave and return through a point this far away.
inline constexpr double kRevisitExcursionDeg = 12.0;

namespace detail {

inline const char* const kObjectNames[] = {
    "mug",         "vase",        "book",       "remote control", "bowl",
    "candle",      "spoon",       "picture frame", "tissue box",  "plant pot",
    "water bottle", "salt shaker", "keys",      "notebook",        "lamp",
    "glass",       "phone",       "cutting board", "kettle",      "toy car",
    "jar",         "sponge",      "clock",      "speaker"};

inline std::string object_name(int i) {
  constexpr int n = static_cast<int>(std::size(kObjectNames));
  std::string name = kObjectNames[i % n];
  if (i >= n) name += " " + std::to_string(i / n + 1);
  return name;
}

inline Eigen::Quaterniond random_rotation(Rng& rng) {
  // Shoemake's uniform quaternion.
  const double u1 = rng.uniform(), u2 = rng.uniform(), u3 = rng.uniform();
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  const double t2 = 2.0 * std::numbers::pi * u2, t3 = 2.0 * std::numbers::pi * u3;
  return Eigen::Quaterniond(b * std::cos(t3), a * std::sin(t2), a * std::cos(t2),
                            b * std::sin(t3))
      .normalized();
}

// Orthonormal tangent basis at a unit direction, oriented by a fixed
// reference so a constant 2D offset means a constant screen-space shift.
inline std::pair<Eigen::Vector3d, Eigen::Vector3d> tangent_basis(
    const Eigen::Vector3d& dir) {
  Eigen::Vector3d ref = Eigen::Vector3d::UnitY();
  if (std::abs(dir.dot(ref)) > 0.99) ref = Eigen::Vector3d::UnitX();
  const Eigen::Vector3d e1 = ref.cross(dir).normalized();
  const Eigen::Vector3d e2 = dir.cross(e1).normalized();
  return {e1, e2};
}

// Rotates a unit direction by a tangent-plane offset (degrees, 2D).
inline Eigen::Vector3d offset_direction(const Eigen::Vector3d& dir, double ox_deg,
                                        double oy_deg) {
  const double mag = std::hypot(ox_deg, oy_deg);
  if (mag == 0.0) return dir;
  const auto [e1, e2] = tangent_basis(dir);
  const Eigen::Vector3d t = (ox_deg * e1 + oy_deg * e2) / mag;
  const double a = rad(mag);
  return (std::cos(a) * dir + std::sin(a) * t).normalized();
}

inline Eigen::Vector3d slerp(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                             double t) {
  const double omega = std::atan2(a.cross(b).norm(), a.dot(b));
  if (omega < 1e-12) return a;
  const double s = std::sin(omega);
  return ((std::sin((1.0 - t) * omega) / s) * a + (std::sin(t * omega) / s) * b)
      .normalized();
}

struct Placed {
  Eigen::Vector3d local;  // center in the device frame
  double angular_radius_deg;
};

}  // namespace detail

inline std::int64_t sample_time_ns(std::int64_t index, double rate_hz) {
  return static_cast<std::int64_t>(std::llround(static_cast<double>(index) * 1e9 / rate_hz));
}

inline SynthScene generate(const SynthConfig& cfg) {
  cfg.check();
  Rng rng(cfg.seed);
  const CameraModel& cam = cfg.camera;

  Recording rec;
  rec.recording_id = "synth-" + std::to_string(cfg.seed);
  rec.sample_rate_hz = cfg.sample_rate_hz;
  rec.camera = cam;
  rec.task_label = cfg.task_label;
  rec.silhouettes = SilhouetteSource::kComputed;
  rec.notes = {
      "synthetic scene; fixation durations uniform in [" +
          std::to_string(cfg.fixation_duration_ms.min) + ", " +
          std::to_string(cfg.fixation_duration_ms.max) +
          "] ms (stand-in distribution)",
      "gaze model: target center + isotropic Gaussian jitter sigma=" +
          std::to_string(cfg.gaze_jitter_deg) + " deg"};

  Pose device;
  device.position = Eigen::Vector3d(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
                                    rng.uniform(1.2, 1.8));
  device.orientation = detail::random_rotation(rng);
  const Eigen::Matrix3d device_rot = device.rotation();

  // Placement by rejection sampling.
  constexpr int kMaxAttempts = 2000;
  const double cone_deg = cam.max_fov_deg - 5.0;
  std::vector<detail::Placed> placed;
  std::vector<ObjectObservation> observations;
  for (int i = 0; i < cfg.n_objects; ++i) {
    CatalogEntry entry;
    entry.id = ObjectId{static_cast<std::uint32_t>(i + 1)};
    entry.name = detail::object_name(i);
    Pose pose;
    bool ok = false;
    for (int attempt = 0; attempt < kMaxAttempts && !ok; ++attempt) {
      const bool sphere = rng.uniform() < cfg.sphere_fraction;
      const double size = rng.uniform(cfg.object_size_m.min, cfg.object_size_m.max);
      ObjectShape shape = ObjectShape::sphere(size);
      if (!sphere) {
        shape = ObjectShape::box(
            2.0 * size, 2.0 * rng.uniform(cfg.object_size_m.min, cfg.object_size_m.max),
            2.0 * rng.uniform(cfg.object_size_m.min, cfg.object_size_m.max));
      }
      const double dist =
          rng.uniform(cfg.placement_radius_m.min, cfg.placement_radius_m.max);
      const double cos_max = std::cos(rad(cone_deg));
      const double theta = std::acos(1.0 - rng.uniform() * (1.0 - cos_max));
      const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const Eigen::Vector3d dir(std::sin(theta) * std::cos(phi),
                                std::sin(theta) * std::sin(phi), std::cos(theta));
      const Eigen::Quaterniond orient =
          sphere ? Eigen::Quaterniond::Identity() : detail::random_rotation(rng);
      const double bound = shape.bounding_radius();
      if (dist <= 1.05 * bound) continue;
      const double alpha = deg(std::asin(bound / dist));
      if (deg(theta) + alpha > cam.max_fov_deg - 1.0) continue;
      bool clear = true;
      for (const auto& p : placed) {
        const double sep = angular_distance(dir, p.local);
        if (sep < std::max(kMinCenterSeparationDeg,
                           alpha + p.angular_radius_deg + 1.0)) {
          clear = false;
          break;
        }
      }
      if (!clear) continue;
      placed.push_back({dir * dist, alpha});
      entry.shape = shape;
      pose.position = device.position + device_rot * (dir * dist);
      pose.orientation = (device.orientation * orient).normalized();
      ok = true;
    }
    if (!ok)
      throw PlacementFailure("could not place object " + std::to_string(i + 1) +
                             " of " + std::to_string(cfg.n_objects) + " after " +
                             std::to_string(kMaxAttempts) + " attempts");
    rec.catalog.push_back(entry);
    // Every frame observes the same static scene.
    observations.push_back({entry.id, pose, std::nullopt});
  }

  // Target sequence and durations, in sample intervals.
  const double interval_ms = 1000.0 / cfg.sample_rate_hz;
  const auto n_fix = static_cast<std::size_t>(cfg.n_fixations);
  std::vector<int> targets(n_fix);
  std::vector<std::int64_t> fix_intervals(n_fix);
  std::vector<std::int64_t> sac_intervals(n_fix, 0);
  std::vector<bool> revisit(n_fix, false);
  const auto min_fix = static_cast<std::int64_t>(
      std::ceil(cfg.fixation_duration_ms.min / interval_ms - 1e-9));
  const auto max_fix = std::max(
      min_fix, static_cast<std::int64_t>(
                   std::floor(cfg.fixation_duration_ms.max / interval_ms + 1e-9)));
  for (std::size_t j = 0; j < n_fix; ++j) {
    if (j == 0) {
      targets[j] = static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.n_objects)));
    } else if (cfg.n_objects == 1 || rng.uniform() < cfg.revisit_probability) {
      targets[j] = targets[j - 1];
      revisit[j] = true;
    } else {
      const auto k = static_cast<int>(
          rng.below(static_cast<std::uint64_t>(cfg.n_objects - 1)));
      targets[j] = k >= targets[j - 1] ? k + 1 : k;
    }
    const double dur = rng.uniform(cfg.fixation_duration_ms.min,
                                   cfg.fixation_duration_ms.max);
    fix_intervals[j] = std::clamp(
        static_cast<std::int64_t>(std::ceil(dur / interval_ms - 1e-9)), min_fix,
        max_fix);
    if (j > 0) {
      const double sdur = rng.uniform(cfg.saccade_duration_ms.min,
                                      cfg.saccade_duration_ms.max);
      std::int64_t m = std::max<std::int64_t>(1, std::llround(sdur / interval_ms));
      if (revisit[j]) {
        m = 3;  // two excursion samples: wider than a one-sample gap bridge
      } else {
        const double amp = angular_distance(placed[targets[j - 1]].local,
                                            placed[targets[j]].local);
        // Constant-speed saccade: amplitude / duration must reach the peak.
        const auto fastest = static_cast<std::int64_t>(
            std::floor(amp / (kSaccadePeakVelocityDegS * interval_ms / 1000.0)));
        m = std::clamp<std::int64_t>(m, 1, std::max<std::int64_t>(1, fastest));
      }
      sac_intervals[j] = m;
    }
  }

  // Lay fixations onto the sample grid.
  std::vector<std::int64_t> fix_start(n_fix), fix_end(n_fix);
  std::int64_t cursor = 0;
  const auto min_fix_ns = static_cast<std::int64_t>(
      std::llround(cfg.fixation_duration_ms.min * 1e6));
  for (std::size_t j = 0; j < n_fix; ++j) {
    cursor += sac_intervals[j];
    fix_start[j] = cursor;
    std::int64_t end = cursor + fix_intervals[j];
    while (sample_time_ns(end, cfg.sample_rate_hz) -
               sample_time_ns(cursor, cfg.sample_rate_hz) <
           min_fix_ns)
      ++end;
    fix_end[j] = end;
    cursor = end;
  }

  auto target_dir = [&](int t) -> Eigen::Vector3d {
    return placed[static_cast<std::size_t>(t)].local.normalized();
  };

  GroundTruth truth;
  const std::int64_t n_samples = fix_end.back() + 1;
  rec.frames.reserve(static_cast<std::size_t>(n_samples));
  std::size_t j = 0;
  for (std::int64_t i = 0; i < n_samples; ++i) {
    while (i > fix_end[j]) ++j;
    Eigen::Vector3d gaze;
    if (i >= fix_start[j]) {
      gaze = target_dir(targets[j]);
      if (cfg.gaze_jitter_deg > 0.0) {
        const double ox = cfg.gaze_jitter_deg * rng.normal();
        const double oy = cfg.gaze_jitter_deg * rng.normal();
        gaze = detail::offset_direction(gaze, ox, oy);
      }
    } else {
      // Inside the saccade leading into fixation j.
      const Eigen::Vector3d from = target_dir(targets[j - 1]);
      const Eigen::Vector3d to = target_dir(targets[j]);
      const double frac = static_cast<double>(i - fix_end[j - 1]) /
                          static_cast<double>(sac_intervals[j]);
      if (revisit[j]) {
        const double phi = 2.0 * std::numbers::pi *
                           (static_cast<double>(derive_seed(cfg.seed, 17, j) >> 11) *
                            0x1.0p-53);
        const Eigen::Vector3d away = detail::offset_direction(
            from, kRevisitExcursionDeg * std::cos(phi),
            kRevisitExcursionDeg * std::sin(phi));
        gaze = frac <= 0.5 ? detail::slerp(from, away, frac * 2.0)
                           : detail::slerp(away, to, frac * 2.0 - 1.0);
      } else {
        gaze = detail::slerp(from, to, frac);
      }
    }
    Frame f;
    f.t_ns = sample_time_ns(i, cfg.sample_rate_hz);
    f.device = device;
    f.gaze = gaze.normalized();
    f.objects = observations;
    rec.frames.push_back(std::move(f));
  }

  for (std::size_t k = 0; k < n_fix; ++k) {
    truth.true_fixations.push_back(
        {sample_time_ns(fix_start[k], cfg.sample_rate_hz),
         sample_time_ns(fix_end[k], cfg.sample_rate_hz),
         rec.catalog[static_cast<std::size_t>(targets[k])].id});
  }

  // Interactions: a fixed share of fixations, chosen without replacement, are
  // followed by an interaction on the fixated object. Onset lands after the
  // fixation ends and within 1 s of its midpoint frame.
  const auto n_inter = static_cast<std::size_t>(
      std::llround(cfg.interaction_fraction * static_cast<double>(n_fix)));
  std::vector<std::size_t> order(n_fix);
  for (std::size_t k = 0; k < n_fix; ++k) order[k] = k;
  for (std::size_t k = 0; k < n_inter; ++k) {
    const auto pick = k + static_cast<std::size_t>(rng.below(n_fix - k));
    std::swap(order[k], order[pick]);
  }
  std::vector<std::size_t> chosen(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_inter));
  std::sort(chosen.begin(), chosen.end());
  for (std::size_t k : chosen) {
    const auto& tf = truth.true_fixations[k];
    const std::int64_t onset =
        tf.end_ns + 1'000'000 + static_cast<std::int64_t>(rng.uniform(0.0, 400e6));
    const std::int64_t length = static_cast<std::int64_t>(rng.uniform(500e6, 2000e6));
    rec.interactions.push_back({tf.target, onset, onset + length});
    truth.true_interaction_targets.push_back({onset, tf.target});
  }
  return {std::move(rec), std::move(truth)};
}

// ---------------------------------------------------------------------------
// Gaze error injection.

namespace detail {

// Mean of the Rice distribution with noncentrality nu and scale sigma.
inline double rice_mean(double nu, double sigma) {
  if (sigma <= 0.0) return nu;
  const double y = nu * nu / (2.0 * sigma * sigma);
  if (y > 200.0) return std::sqrt(nu * nu + sigma * sigma);  // asymptotic
  const double h = y / 2.0;
  const double laguerre = std::exp(-h) * ((1.0 + y) * std::cyl_bessel_i(0.0, h) +
                                          y * std::cyl_bessel_i(1.0, h));
  return sigma * std::sqrt(std::numbers::pi / 2.0) * laguerre;
}

}  // namespace detail

// Per-sample noise scale as a share of the requested error, capped.
inline constexpr double kPerturbNoiseFraction = 0.1;
inline constexpr double kPerturbNoiseCapDeg = 0.5;

// Rotates every gaze sample by a constant bias plus isotropic Gaussian noise
// in the tangent plane. The bias magnitude is solved so that the expected
// angular offset equals error_deg.
inline Recording perturb_gaze(const Recording& rec, double error_deg,
                              std::uint64_t seed) {
  if (!(error_deg >= 0.0))
    throw DomainError("perturb_gaze: error_deg must be >= 0");
  Recording out = rec;
  if (error_deg == 0.0) return out;

  const double sigma = std::min(kPerturbNoiseFraction * error_deg, kPerturbNoiseCapDeg);
  double lo = 0.0, hi = error_deg;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (detail::rice_mean(mid, sigma) < error_deg ? lo : hi) = mid;
  }
  const double bias = 0.5 * (lo + hi);

  Rng rng(derive_seed(seed, 0x9a2e));
  const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double bx = bias * std::cos(phi);
  const double by = bias * std::sin(phi);
  for (auto& f : out.frames) {
    const double ox = bx + sigma * rng.normal();
    const double oy = by + sigma * rng.normal();
    f.gaze = detail::offset_direction(f.gaze.normalized(), ox, oy);
  }
  out.notes.push_back("gaze perturbed: constant bias + Gaussian noise, expected "
                      "offset " + std::to_string(error_deg) + " deg, seed " +
                      std::to_string(seed));
  return out;
}

// ---------------------------------------------------------------------------
// Ground-truth sidecar: {true_fixations:[{start_ns,end_ns,id}],
// interactions:[{t_ns,id}]}.

inline std::string truth_to_json(const GroundTruth& truth) {
  nlohmann::ordered_json j;
  auto fix = nlohmann::ordered_json::array();
  for (const auto& f : truth.true_fixations)
    fix.push_back({{"start_ns", f.start_ns}, {"end_ns", f.end_ns}, {"id", f.target.value}});
  auto inter = nlohmann::ordered_json::array();
  for (const auto& i : truth.true_interaction_targets)
    inter.push_back({{"t_ns", i.t_ns}, {"id", i.target.value}});
  j["true_fixations"] = std::move(fix);
  j["interactions"] = std::move(inter);
  return j.dump() + "\n";
}

inline GroundTruth truth_from_json(const std::string& text) {
  GroundTruth t;
  try {
    const auto j = nlohmann::json::parse(text);
    for (const auto& f : j.at("true_fixations"))
      t.true_fixations.push_back({f.at("start_ns").get<std::int64_t>(),
                                  f.at("end_ns").get<std::int64_t>(),
                                  ObjectId{f.at("id").get<std::uint32_t>()}});
    for (const auto& i : j.at("interactions"))
      t.true_interaction_targets.push_back(
          {i.at("t_ns").get<std::int64_t>(), ObjectId{i.at("id").get<std::uint32_t>()}});
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("truth sidecar: ") + e.what());
  }
  return t;
}

}  // namespace gazectx
