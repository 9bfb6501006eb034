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

// Interaction-space classification and visual-size distributions: the
// eye-tracking accuracy requirement report.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gazectx/error.hpp"
#include "gazectx/gaze.hpp"
#include "gazectx/geometry.hpp"
#include "gazectx/scene.hpp"

namespace gazectx {

enum class Space { kNear, kMid, kInteracted, kFixated };

inline constexpr std::array<Space, 4> kAllSpaces = {Space::kNear, Space::kMid,
                                                    Space::kInteracted, Space::kFixated};

inline const char* to_string(Space s) {
  switch (s) {
    case Space::kNear: return "near";
    case Space::kMid: return "mid";
    case Space::kInteracted: return "interacted";
    case Space::kFixated: return "fixated";
  }
  return "?";
}

struct SpaceConfig {
  double near_max_m = 1.0;
  double mid_min_m = 1.0;
  double mid_max_m = 2.0;
  double fixated_max_m = 2.0;
  double interaction_pad_s = 1.0;
  // Fixated samples are emitted once per fixation unless this is set, in which
  // case every frame inside the fixation contributes.
  bool fixated_per_frame = false;

  void check() const {
    if (!(near_max_m > 0.0 && near_max_m <= mid_min_m && mid_min_m < mid_max_m))
      throw ConfigError("space: need 0 < near_max <= mid_min < mid_max");
    if (!(interaction_pad_s >= 0.0))
      throw ConfigError("space: interaction_pad_s must be >= 0");
    if (!(fixated_max_m > 0.0)) throw ConfigError("space: fixated_max_m must be > 0");
  }
};

// Tags for every object observed in the frame, evaluated at time t_ns. Near
// uses <= near_max, mid uses (mid_min, mid_max]; interacted holds while t is
// within a padded interaction on that object. Tags may co-occur.
inline std::map<ObjectId, std::set<Space>> classify_spaces(
    const Frame& frame, std::span<const InteractionEvent> interactions,
    std::int64_t t_ns, const SpaceConfig& cfg) {
  const auto pad = static_cast<std::int64_t>(std::llround(cfg.interaction_pad_s * 1e9));
  std::map<ObjectId, std::set<Space>> out;
  for (const auto& obs : frame.objects) {
    auto& tags = out[obs.id];
    const double d = object_distance(frame, obs.id);
    if (d <= cfg.near_max_m) tags.insert(Space::kNear);
    if (d > cfg.mid_min_m && d <= cfg.mid_max_m) tags.insert(Space::kMid);
    for (const auto& ev : interactions) {
      if (ev.id == obs.id && t_ns >= ev.start_ns - pad && t_ns <= ev.end_ns + pad) {
        tags.insert(Space::kInteracted);
        break;
      }
    }
  }
  return out;
}

struct SizeSample {
  ObjectId object_id;
  std::int64_t t_ns = 0;
  Space space = Space::kNear;
  double radius_deg = 0.0;
  double half_min_width_deg = 0.0;
  bool operator==(const SizeSample&) const = default;
};

struct SizeCollection {
  std::vector<SizeSample> samples;
  std::size_t skipped = 0;  // in-view objects whose silhouette was unavailable

  void merge(const SizeCollection& other) {
    samples.insert(samples.end(), other.samples.begin(), other.samples.end());
    skipped += other.skipped;
  }
};

// One sample per (in-view object, frame, tag) for near/mid/interacted, plus one
// fixated sample per assigned fixation within fixated_max_m, taken at the
// fixation's midpoint frame.
inline SizeCollection collect_size_samples(const Recording& rec, const Scanpath& scanpath,
                                           const SpaceConfig& cfg) {
  cfg.check();
  SizeCollection out;
  auto emit = [&](const Frame& frame, const ObjectObservation& obs,
                  std::span<const Space> spaces) {
    const auto sil = resolve_silhouette(rec, frame, obs);
    if (sil.status != SilhouetteStatus::kAvailable) {
      ++out.skipped;
      return;
    }
    const auto m = VisualSizeMetrics::of(*sil.polygon);
    for (Space s : spaces)
      out.samples.push_back({obs.id, frame.t_ns, s, m.radius_deg, m.half_min_width_deg});
  };

  for (const auto& frame : rec.frames) {
    const auto tags = classify_spaces(frame, rec.interactions, frame.t_ns, cfg);
    for (const auto& obs : frame.objects) {
      if (!object_in_view(rec, frame, obs)) continue;
      const auto& t = tags.at(obs.id);
      if (t.empty()) continue;
      const std::vector<Space> spaces(t.begin(), t.end());
      emit(frame, obs, spaces);
    }
  }

  constexpr std::array<Space, 1> kFixated = {Space::kFixated};
  for (const auto& fx : scanpath.fixations) {
    if (!fx.assigned_object) continue;
    auto emit_at = [&](const Frame& frame) {
      const auto* obs = frame.find(*fx.assigned_object);
      if (!obs || object_distance(frame, obs->id) > cfg.fixated_max_m) return;
      if (!object_in_view(rec, frame, *obs)) return;
      emit(frame, *obs, kFixated);
    };
    if (cfg.fixated_per_frame) {
      for (const auto& frame : rec.frames)
        if (frame.t_ns >= fx.start_ns && frame.t_ns <= fx.end_ns) emit_at(frame);
    } else {
      emit_at(rec.frames[rec.nearest_frame(fx.midpoint_ns())]);
    }
  }
  return out;
}

// Linear-interpolation percentile: sorted order, rank q/100 * (n - 1).
inline double percentile(std::span<const double> values, double q) {
  if (values.empty()) throw DomainError("percentile: empty input");
  if (!(q >= 0.0 && q <= 100.0))
    throw DomainError("percentile: q must be in [0, 100]");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double rank = q / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (rank - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// ---------------------------------------------------------------------------
// Report.

enum class SizeMetric { kRadius, kHalfMinWidth };

inline const char* to_string(SizeMetric m) {
  return m == SizeMetric::kRadius ? "radius_deg" : "half_min_width_deg";
}

inline constexpr double kHistogramBinDeg = 0.25;
inline constexpr double kReliableAccuracyDeg = 3.0;
inline constexpr std::array<double, 5> kReportPercentiles = {10, 25, 50, 75, 90};

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n = 0;
};

struct SpaceSummary {
  std::size_t count = 0;
  std::array<double, 5> percentiles{};  // p10, p25, p50, p75, p90
  double frac_ge_3deg = 0.0;            // share of samples with metric >= 3 deg
  std::vector<HistogramBin> histogram;
};

struct SizeDistributionReport {
  std::map<SizeMetric, std::map<Space, SpaceSummary>> summaries;
  SpaceConfig config;
  std::size_t skipped = 0;
  std::vector<std::string> notes;
};

inline SpaceSummary summarize(std::span<const double> values) {
  SpaceSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  for (std::size_t i = 0; i < kReportPercentiles.size(); ++i)
    s.percentiles[i] = percentile(values, kReportPercentiles[i]);
  std::size_t ge = 0;
  for (double v : values) ge += v >= kReliableAccuracyDeg;
  s.frac_ge_3deg = static_cast<double>(ge) / static_cast<double>(values.size());
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  const auto first = static_cast<std::int64_t>(std::floor(*mn / kHistogramBinDeg));
  const auto last = static_cast<std::int64_t>(std::floor(*mx / kHistogramBinDeg));
  for (std::int64_t b = first; b <= last; ++b)
    s.histogram.push_back({static_cast<double>(b) * kHistogramBinDeg,
                           static_cast<double>(b + 1) * kHistogramBinDeg, 0});
  for (double v : values) {
    const auto b = static_cast<std::int64_t>(std::floor(v / kHistogramBinDeg));
    ++s.histogram[static_cast<std::size_t>(b - first)].n;
  }
  return s;
}

inline std::vector<std::string> default_report_notes() {
  return {"distance = device origin to object pose position (centroid), meters",
          "field of view membership = object center within camera max_fov_deg",
          "silhouettes are unoccluded per-object projections",
          "the reference point for distance (device vs body) is not specified by "
          "the source protocol; device origin used",
          "fixated samples are taken once per fixation at its midpoint frame "
          "unless fixated_per_frame is set"};
}

inline SizeDistributionReport build_report(const SizeCollection& collection,
                                           const SpaceConfig& cfg) {
  SizeDistributionReport r;
  r.config = cfg;
  r.skipped = collection.skipped;
  r.notes = default_report_notes();
  for (SizeMetric metric : {SizeMetric::kRadius, SizeMetric::kHalfMinWidth}) {
    for (Space space : kAllSpaces) {
      std::vector<double> values;
      for (const auto& s : collection.samples)
        if (s.space == space)
          values.push_back(metric == SizeMetric::kRadius ? s.radius_deg
                                                         : s.half_min_width_deg);
      r.summaries[metric][space] = summarize(values);
    }
  }
  return r;
}

inline nlohmann::ordered_json config_json(const SpaceConfig& c) {
  return {{"near_max_m", c.near_max_m},
          {"mid_min_m", c.mid_min_m},
          {"mid_max_m", c.mid_max_m},
          {"fixated_max_m", c.fixated_max_m},
          {"interaction_pad_s", c.interaction_pad_s},
          {"fixated_per_frame", c.fixated_per_frame}};
}

// One document per metric. Each space key follows
// {count, percentiles{p10..p90}, frac_ge_3deg, histogram[{lo,hi,n}]}; empty
// spaces carry count 0 and null percentiles.
inline nlohmann::ordered_json report_json(const SizeDistributionReport& r,
                                          SizeMetric metric) {
  nlohmann::ordered_json j;
  j["metric"] = to_string(metric);
  for (Space space : kAllSpaces) {
    const auto& s = r.summaries.at(metric).at(space);
    nlohmann::ordered_json sj;
    sj["count"] = s.count;
    nlohmann::ordered_json pct;
    for (std::size_t i = 0; i < kReportPercentiles.size(); ++i) {
      const std::string key = "p" + std::to_string(static_cast<int>(kReportPercentiles[i]));
      if (s.count)
        pct[key] = s.percentiles[i];
      else
        pct[key] = nullptr;
    }
    sj["percentiles"] = std::move(pct);
    if (s.count)
      sj["frac_ge_3deg"] = s.frac_ge_3deg;
    else
      sj["frac_ge_3deg"] = nullptr;
    auto hist = nlohmann::ordered_json::array();
    for (const auto& b : s.histogram)
      hist.push_back({{"lo", b.lo}, {"hi", b.hi}, {"n", b.n}});
    sj["histogram"] = std::move(hist);
    j[to_string(space)] = std::move(sj);
  }
  j["skipped"] = r.skipped;
  j["config"] = config_json(r.config);
  j["notes"] = r.notes;
  return j;
}

// Flat rendering: metric,space,statistic,value.
inline std::string report_csv(const SizeDistributionReport& r) {
  std::string out = "metric,space,statistic,value\n";
  char buf[64];
  auto row = [&](SizeMetric m, Space s, const std::string& stat, double v, bool present) {
    out += std::string(to_string(m)) + "," + to_string(s) + "," + stat + ",";
    if (present) {
      std::snprintf(buf, sizeof buf, "%.6f", v);
      out += buf;
    }
    out += "\n";
  };
  for (SizeMetric m : {SizeMetric::kRadius, SizeMetric::kHalfMinWidth}) {
    for (Space space : kAllSpaces) {
      const auto& s = r.summaries.at(m).at(space);
      out += std::string(to_string(m)) + "," + to_string(space) + ",count," +
             std::to_string(s.count) + "\n";
      for (std::size_t i = 0; i < kReportPercentiles.size(); ++i)
        row(m, space, "p" + std::to_string(static_cast<int>(kReportPercentiles[i])),
            s.percentiles[i], s.count > 0);
      row(m, space, "frac_ge_3deg", s.frac_ge_3deg, s.count > 0);
    }
  }
  return out;
}

enum class ReportFormat { kJson, kCsv };

inline ReportFormat parse_report_format(const std::string& name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "csv") return ReportFormat::kCsv;
  throw UsageError("unknown report format '" + name + "' (expected json or csv)");
}

struct EmittedReport {
  SizeDistributionReport report;
  std::string text;
};

// JSON emits both metrics as {"radius_deg": {...}, "half_min_width_deg": {...}}.
inline EmittedReport emit_report(const SizeCollection& collection, const SpaceConfig& cfg,
                                 const std::string& format) {
  const auto fmt = parse_report_format(format);
  EmittedReport out{build_report(collection, cfg), {}};
  if (fmt == ReportFormat::kCsv) {
    out.text = report_csv(out.report);
  } else {
    nlohmann::ordered_json j;
    for (SizeMetric m : {SizeMetric::kRadius, SizeMetric::kHalfMinWidth})
      j[to_string(m)] = report_json(out.report, m);
    out.text = j.dump(2) + "\n";
  }
  return out;
}

}  // namespace gazectx
