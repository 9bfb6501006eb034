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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "gazectx/gazectx.hpp"

namespace fs = std::filesystem;
using namespace gazectx;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

TrialSource source_of(SynthScene scene, double tolerance = kDefaultToleranceDeg) {
  TrialSource s;
  s.scanpath = build_scanpath(scene.recording, DetectorConfig{}, tolerance);
  s.recording = std::move(scene.recording);
  return s;
}

// ---------------------------------------------------------------------------

Verdict ac1_sphere_oracle() {
  const auto t0 = Clock::now();
  const CameraModel cam{610.0, 704.0, 704.0, 1408.0, 1408.0, 50.0};
  double worst = 0.0;
  for (double ratio : {0.05, 0.1, 0.3}) {
    Pose p;
    p.position = Eigen::Vector3d(0.0, 0.0, 1.0);
    const auto proj = project_object(cam, p, ObjectShape::sphere(ratio));
    const auto m = VisualSizeMetrics::of(std::get<AngularPolygon>(proj));
    const double want = deg(std::asin(ratio));
    worst = std::max({worst, std::abs(m.radius_deg - want) / want,
                      std::abs(m.half_min_width_deg - want) / want});
  }
  const double secs = seconds_since(t0);
  return {worst <= 0.02 && secs < 1.0,
          "max relative error " + fmt("%.4f", worst) + " (limit 0.02), " + fmt("%.3f", secs) +
              " s"};
}

Verdict ac2_rasterization() {
  const auto t0 = Clock::now();
  const CameraModel cam{610.0, 704.0, 704.0, 1408.0, 1408.0, 50.0};
  Rng rng(20260101);
  double worst = 0.0;
  int n = 0;
  while (n < 100) {
    Pose p;
    const double dist = rng.uniform(0.3, 3.0);
    const double az = rng.uniform(-30.0, 30.0), el = rng.uniform(-30.0, 30.0);
    p.position = angular_to_direction({az, el}) * dist;
    p.orientation = detail::random_rotation(rng);
    const double size = rng.uniform(0.03, 0.3);
    const ObjectShape shape =
        rng.uniform() < 0.5
            ? ObjectShape::sphere(size)
            : ObjectShape::box(size, rng.uniform(0.03, 0.3), rng.uniform(0.03, 0.3));
    Projection proj = OutOfView{};
    try {
      proj = project_object(cam, p, shape);
    } catch (const DomainError&) {
      continue;
    }
    if (!std::holds_alternative<AngularPolygon>(proj)) continue;
    const auto& poly = std::get<AngularPolygon>(proj);
    const double shoelace = angular_polygon_area(poly);
    const double raster = oracle::raster_area_convex(poly.vertices(), 1000);
    worst = std::max(worst, std::abs(shoelace - raster) / raster);
    ++n;
  }
  const double secs = seconds_since(t0);
  return {worst <= 0.02 && secs < 30.0,
          std::to_string(n) + " silhouettes, max relative error " + fmt("%.5f", worst) +
              ", " + fmt("%.1f", secs) + " s"};
}

Verdict ac3_fixation_recovery() {
  const auto t0 = Clock::now();
  std::size_t matched = 0, detected = 0, truth = 0;
  int exact = 0;
  for (int s = 0; s < 50; ++s) {
    SynthConfig cfg;
    cfg.seed = 1000 + static_cast<std::uint64_t>(s);
    const auto scene = generate(cfg);
    const auto sp = build_scanpath(scene.recording, DetectorConfig{});
    const auto f1 = oracle::interval_f1(sp.fixations, scene.truth.true_fixations);
    matched += f1.matched;
    detected += sp.fixations.size();
    truth += scene.truth.true_fixations.size();
    exact += oracle::assignment_sequence_matches(sp, scene.truth.true_fixations);
  }
  const double p = static_cast<double>(matched) / detected;
  const double r = static_cast<double>(matched) / truth;
  const double f1 = 2 * p * r / (p + r);

  // Large objects under 1.5 deg of gaze error.
  std::size_t correct_total = 0, fix_total = 0;
  for (int s = 0; s < 20; ++s) {
    SynthConfig cfg;
    cfg.seed = 2000 + static_cast<std::uint64_t>(s);
    cfg.n_objects = 5;
    cfg.sphere_fraction = 1.0;
    cfg.placement_radius_m = {0.6, 1.2};
    cfg.object_size_m = {0.085, 0.12};  // asin(0.085 / 1.2) > 4 deg
    const auto scene = generate(cfg);
    const auto noisy = perturb_gaze(scene.recording, 1.5, 77 + static_cast<std::uint64_t>(s));
    const auto sp = build_scanpath(noisy, DetectorConfig{});
    const double acc = oracle::assignment_accuracy(sp, scene.truth.true_fixations);
    correct_total += static_cast<std::size_t>(std::llround(acc * scene.truth.true_fixations.size()));
    fix_total += scene.truth.true_fixations.size();
  }
  const double acc = static_cast<double>(correct_total) / fix_total;
  const double secs = seconds_since(t0);
  return {f1 >= 0.99 && exact == 50 && acc >= 0.9 && secs < 60.0,
          "F1 " + fmt("%.4f", f1) + ", exact sequences " + std::to_string(exact) +
              "/50, accuracy at 1.5 deg on >=4 deg objects " + fmt("%.3f", acc) + ", " +
              fmt("%.1f", secs) + " s"};
}

Verdict ac4_error_knee() {
  const double radius_deg = 3.0;
  const std::vector<double> errors = {0.5, 1.0, 2.0, 4.0, 8.0};
  std::vector<double> acc(errors.size(), 0.0);
  std::size_t fix_total = 0;
  for (int s = 0; s < 20; ++s) {
    SynthConfig cfg;
    cfg.seed = 3000 + static_cast<std::uint64_t>(s);
    cfg.n_objects = 6;
    cfg.sphere_fraction = 1.0;
    cfg.placement_radius_m = {1.0, 1.0};
    const double r = std::sin(rad(radius_deg));
    cfg.object_size_m = {r, r};
    const auto scene = generate(cfg);
    fix_total += scene.truth.true_fixations.size();
    for (std::size_t e = 0; e < errors.size(); ++e) {
      const auto noisy = perturb_gaze(scene.recording, errors[e], 500 + static_cast<std::uint64_t>(s));
      const auto sp = build_scanpath(noisy, DetectorConfig{});
      acc[e] += oracle::assignment_accuracy(sp, scene.truth.true_fixations) *
                scene.truth.true_fixations.size();
    }
  }
  bool monotone = true, knee = true;
  std::string detail;
  for (std::size_t e = 0; e < errors.size(); ++e) {
    acc[e] /= static_cast<double>(fix_total);
    if (e > 0 && acc[e] > acc[e - 1]) monotone = false;
    if (acc[e] < 0.5 && errors[e] <= radius_deg) knee = false;
    detail += fmt("%.1f", errors[e]) + "deg:" + fmt("%.3f", acc[e]) + " ";
  }
  const bool drops = acc.back() < 0.5;
  return {monotone && knee && drops,
          detail + (monotone ? "monotone" : "NOT monotone") +
              (drops ? ", below 0.5 beyond the radius" : ", never drops below 0.5")};
}

// Mixtures of uniform angular radii, in degrees.
struct Mixture {
  std::vector<std::tuple<double, double, double>> parts;  // weight, lo, hi

  double cdf(double x) const {
    double f = 0.0;
    for (auto [w, lo, hi] : parts) f += w * std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
    return f;
  }
  double draw(Rng& rng) const {
    double u = rng.uniform();
    for (auto [w, lo, hi] : parts) {
      if (u < w) return rng.uniform(lo, hi);
      u -= w;
    }
    auto [w, lo, hi] = parts.back();
    return rng.uniform(lo, hi);
  }
};

double median_of(const std::function<double(double)>& cdf) {
  double lo = 0.0, hi = 90.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < 0.5 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Verdict ac5_distribution_protocol() {
  const Mixture near{{{0.7, 1.0, 5.0}, {0.3, 2.0, 10.0}}};
  const Mixture mid{{{0.5, 0.5, 2.0}, {0.5, 1.0, 4.0}}};
  const Mixture inter{{{0.6, 2.0, 6.0}, {0.4, 4.0, 8.0}}};
  struct Group {
    const Mixture* mix;
    double dist;
    int count;
    Space space;
  };
  const Group groups[] = {{&near, 0.8, 2000, Space::kNear},
                          {&mid, 1.5, 2000, Space::kMid},
                          {&inter, 2.5, 1000, Space::kInteracted}};

  Recording rec;
  rec.recording_id = "mixture";
  rec.camera = {610.0, 704.0, 704.0, 1408.0, 1408.0, 50.0};
  Scanpath sp;
  Rng rng(4242);
  std::uint32_t next_id = 1;
  std::int64_t frame = 0;
  for (const auto& g : groups) {
    for (int i = 0; i < g.count; ++i, ++frame) {
      const double alpha = g.mix->draw(rng);
      const ObjectId id{next_id++};
      rec.catalog.push_back({id, "obj" + std::to_string(id.value),
                             ObjectShape::sphere(g.dist * std::sin(rad(alpha)))});
      Frame f;
      f.t_ns = frame * 33'333'333;
      ObjectObservation obs;
      obs.id = id;
      obs.pose.position =
          angular_to_direction({rng.uniform(-25.0, 25.0), rng.uniform(-25.0, 25.0)}) * g.dist;
      f.objects.push_back(obs);
      rec.frames.push_back(f);
      if (g.space == Space::kInteracted) {
        rec.interactions.push_back({id, f.t_ns, f.t_ns});
      } else {
        FixationEvent fx;
        fx.start_ns = f.t_ns - 5'000'000;
        fx.end_ns = f.t_ns + 5'000'000;
        fx.assigned_object = id;
        fx.assignment = AssignmentKind::kHit;
        sp.fixations.push_back(fx);
      }
    }
  }
  const SpaceConfig cfg;
  const auto emitted = emit_report(collect_size_samples(rec, sp, cfg), cfg, "json");
  const auto& radius = emitted.report.summaries.at(SizeMetric::kRadius);

  std::map<Space, double> want = {
      {Space::kNear, median_of([&](double x) { return near.cdf(x); })},
      {Space::kMid, median_of([&](double x) { return mid.cdf(x); })},
      {Space::kInteracted, median_of([&](double x) { return inter.cdf(x); })},
      {Space::kFixated,
       median_of([&](double x) { return 0.5 * near.cdf(x) + 0.5 * mid.cdf(x); })}};
  bool ok = true;
  std::string detail;
  for (Space s : kAllSpaces) {
    const double got = radius.at(s).percentiles[2];
    ok = ok && std::abs(got - want[s]) <= kHistogramBinDeg;
    detail += std::string(to_string(s)) + " " + fmt("%.3f", got) + "/" + fmt("%.3f", want[s]) + " ";
  }
  return {ok, "p50 got/analytic: " + detail + "(tolerance 0.25 deg)"};
}

Verdict ac6_sweep_correctness() {
  // (a) Accuracies equal a brute-force recount of the trial log.
  std::vector<TrialSource> sources;
  for (int s = 0; s < 3; ++s) {
    SynthConfig cfg;
    cfg.seed = 600 + static_cast<std::uint64_t>(s);
    cfg.n_fixations = 60;
    sources.push_back(source_of(generate(cfg)));
  }
  const auto trials = sample_e1_trials(sources, 100, 9).trials;
  MockClient uniform(MockStrategy::kUniformRandom, "mock:uniform-random", 3, 0.05);
  MockClient greedy(MockStrategy::kGreedy, "mock:greedy", 3);
  std::vector<Agent> agents = {baseline_agent(BaselineStrategy::kRandomVisible),
                               baseline_agent(BaselineStrategy::kGreedyMostFixated),
                               client_agent(uniform), client_agent(greedy)};
  SweepOptions opt;
  opt.seed = 5;
  opt.jobs = 4;
  opt.resamples = 500;
  const auto table = run_sweep(trials, sources, agents, opt);
  bool recount_ok = true;
  for (const auto& row : table.rows) {
    std::size_t c = 0, w = 0, d = 0, t = 0;
    for (const auto& r : table.log) {
      if (r.strategy != row.strategy || r.k != row.k) continue;
      if (r.outcome == TrialOutcome::kCorrect || r.outcome == TrialOutcome::kWrong) {
        if ((r.chosen == r.truth) != (r.outcome == TrialOutcome::kCorrect)) recount_ok = false;
      }
      c += r.outcome == TrialOutcome::kCorrect;
      w += r.outcome == TrialOutcome::kWrong;
      d += r.outcome == TrialOutcome::kDiscarded;
      t += r.outcome == TrialOutcome::kTransport;
    }
    if (row.status == "skipped") continue;
    const double acc = static_cast<double>(c) / static_cast<double>(c + w);
    if (!row.accuracy || *row.accuracy != acc || row.n_scored != c + w ||
        row.n_discarded != d || row.n_transport != t)
      recount_ok = false;
  }

  // (b) Echo-previous on repeated-target scenes.
  std::vector<TrialSource> repeated;
  for (int s = 0; s < 3; ++s) {
    SynthConfig cfg;
    cfg.seed = 700 + static_cast<std::uint64_t>(s);
    cfg.n_fixations = 40;
    cfg.revisit_probability = 1.0;
    repeated.push_back(source_of(generate(cfg)));
  }
  const auto rep_trials = sample_e1_trials(repeated, 1000, 1).trials;
  MockClient echo(MockStrategy::kEchoPrevious, "mock:echo-prev", 0);
  const Agent echo_agent[] = {client_agent(echo)};
  SweepOptions eopt;
  eopt.resamples = 500;
  const auto echo_table = run_sweep(rep_trials, repeated, echo_agent, eopt);
  bool echo_ok = !rep_trials.empty();
  for (const auto& row : echo_table.rows)
    if (row.k >= 1) echo_ok = echo_ok && row.accuracy && *row.accuracy == 1.0;

  // (c) random_visible converges to 1/v.
  constexpr int kVisible = 5;
  std::vector<TrialSource> wide;
  for (int s = 0; s < 25; ++s) {
    SynthConfig cfg;
    cfg.seed = 800 + static_cast<std::uint64_t>(s);
    cfg.n_objects = kVisible;
    cfg.n_fixations = 100;
    wide.push_back(source_of(generate(cfg)));
  }
  const auto sample = sample_e1_trials(wide, 2000, 4);
  bool all_v = sample.trials.size() == 2000;
  for (const auto& t : sample.trials)
    all_v = all_v && build_payload(t, wide[t.source_index], 0).visible_objects.size() == kVisible;
  const Agent rv[] = {baseline_agent(BaselineStrategy::kRandomVisible)};
  SweepOptions ropt;
  ropt.k_values = {0};
  ropt.seed = 31;
  ropt.resamples = 200;
  const auto rv_table = run_sweep(sample.trials, wide, rv, ropt);
  const double p = 1.0 / kVisible;
  const double sigma = std::sqrt(p * (1 - p) / 2000.0);
  const double got = *rv_table.rows.front().accuracy;
  const bool rv_ok = all_v && std::abs(got - p) <= 3 * sigma;

  return {recount_ok && echo_ok && rv_ok,
          std::string("log recount ") + (recount_ok ? "exact" : "MISMATCH") + ", echo-prev " +
              (echo_ok ? "1.0 for k>=1" : "below 1.0") + " on " +
              std::to_string(rep_trials.size()) + " trials, random_visible " + fmt("%.4f", got) +
              " vs " + fmt("%.4f", p) + " +/- " + fmt("%.4f", 3 * sigma) + " (n=" +
              std::to_string(sample.trials.size()) + ")"};
}

Verdict ac7_bootstrap_calibration() {
  const auto t0 = Clock::now();
  constexpr int kDatasets = 500, kN = 200;
  constexpr double kP = 0.3;
  int covered = 0;
  for (int d = 0; d < kDatasets; ++d) {
    Rng rng(derive_seed(7007, d));
    std::vector<int> o(kN);
    for (auto& x : o) x = rng.bernoulli(kP);
    const auto ci = bootstrap_ci(o, 0.95, 10000, derive_seed(99, d));
    covered += ci.low <= kP && kP <= ci.high;
  }
  const double rate = static_cast<double>(covered) / kDatasets;
  const double secs = seconds_since(t0);
  return {std::abs(rate - 0.95) <= 0.03 && secs < 60.0,
          "coverage " + fmt("%.3f", rate) + " (target 0.95 +/- 0.03), " + fmt("%.1f", secs) +
              " s"};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(GAZECTX_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Verdict ac8_end_to_end_determinism() {
  const fs::path dir = fs::path(GAZECTX_TEST_TMP) / "ac8";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string a = (dir / "a.jsonl").string(), b = (dir / "b.jsonl").string();
  int rc = run_cli("synth --seed 7 --objects 5 --fixations 120 -o " + a);
  rc |= run_cli("synth --seed 7 --objects 5 --fixations 120 -o " + b);
  const bool synth_same = rc == 0 && slurp(a) == slurp(b) && !slurp(a).empty() &&
                          slurp(dir / "a.truth.json") == slurp(dir / "b.truth.json");

  const std::string common = "experiment e1 --client mock:uniform-random --k 0..10 --n 60 "
                             "--seed 3 --resamples 1000 -i " + a + " -o ";
  rc = run_cli("--jobs 1 " + common + (dir / "run1").string());
  rc |= run_cli("--jobs 1 " + common + (dir / "run2").string());
  rc |= run_cli("--jobs 8 " + common + (dir / "run8").string());
  bool same = rc == 0;
  std::string missing;
  for (const char* f : {"results.csv", "results.json", "curves.svg", "meta.json"}) {
    const auto r1 = slurp(dir / "run1" / f);
    if (r1.empty()) missing += std::string(f) + " ";
    same = same && !r1.empty() && r1 == slurp(dir / "run2" / f) && r1 == slurp(dir / "run8" / f);
  }
  return {synth_same && same,
          std::string("synth ") + (synth_same ? "identical" : "DIFFERS") +
              ", experiment outputs across runs and --jobs 1/8 " +
              (same ? "identical" : "DIFFER") + (missing.empty() ? "" : ", missing " + missing)};
}

Verdict ac9_discard_rule() {
  std::vector<TrialSource> sources;
  for (int s = 0; s < 4; ++s) {
    SynthConfig cfg;
    cfg.seed = 900 + static_cast<std::uint64_t>(s);
    cfg.n_fixations = 80;
    sources.push_back(source_of(generate(cfg)));
  }
  const auto trials = sample_e1_trials(sources, 200, 2).trials;
  MockClient clean(MockStrategy::kEchoPrevious, "mock:echo-prev", 11, 0.0);
  MockClient noisy(MockStrategy::kEchoPrevious, "mock:echo-prev", 11, 0.05);
  SweepOptions opt;
  opt.seed = 8;
  opt.resamples = 500;
  const Agent ca[] = {client_agent(clean)};
  const Agent na[] = {client_agent(noisy)};
  const auto tc = run_sweep(trials, sources, ca, opt);
  const auto tn = run_sweep(trials, sources, na, opt);

  std::map<std::pair<int, std::string>, TrialOutcome> clean_outcome;
  for (const auto& r : tc.log) clean_outcome[{r.k, r.trial_id}] = r.outcome;
  bool n_changed = false, subset_equal = true;
  std::size_t discarded = 0, total = 0;
  for (std::size_t i = 0; i < tn.rows.size(); ++i) {
    const auto& rn = tn.rows[i];
    n_changed = n_changed || rn.n_scored != tc.rows[i].n_scored;
    discarded += rn.n_discarded;
    total += rn.n_scored + rn.n_discarded;
    std::size_t c = 0, n = 0;
    for (const auto& r : tn.log) {
      if (r.k != rn.k || r.outcome == TrialOutcome::kDiscarded) continue;
      ++n;
      c += clean_outcome.at({r.k, r.trial_id}) == TrialOutcome::kCorrect;
    }
    const double clean_subset = static_cast<double>(c) / static_cast<double>(n);
    subset_equal = subset_equal && rn.accuracy && *rn.accuracy == clean_subset &&
                   n == rn.n_scored;
  }
  const double rate = static_cast<double>(discarded) / static_cast<double>(total);
  return {n_changed && subset_equal && discarded > 0,
          "discarded " + fmt("%.3f", rate) + " of responses, n_scored " +
              (n_changed ? "changed" : "UNCHANGED") + ", scored-subset accuracy " +
              (subset_equal ? "identical to the clean run" : "DIFFERS")};
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* name;
    Verdict (*fn)();
  };
  const Criterion criteria[] = {
      {"AC1", "geometry oracle", ac1_sphere_oracle},
      {"AC2", "rasterization equivalence", ac2_rasterization},
      {"AC3", "fixation recovery", ac3_fixation_recovery},
      {"AC4", "error-vs-size knee", ac4_error_knee},
      {"AC5", "distribution protocol", ac5_distribution_protocol},
      {"AC6", "sweep correctness", ac6_sweep_correctness},
      {"AC7", "bootstrap calibration", ac7_bootstrap_calibration},
      {"AC8", "end-to-end determinism", ac8_end_to_end_determinism},
      {"AC9", "discard rule", ac9_discard_rule},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    try {
      v = c.fn();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    std::printf("%s %s %s: %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str());
    std::fflush(stdout);
    failed += !v.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed,
              std::size(criteria));
  return failed == 0 ? 0 : 1;
}
