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

// E1 (what am I looking at) and E2 (what will I interact with) trial
// sampling, the accuracy-vs-context-length sweep, bootstrap intervals and
// results emission.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "gazectx/analysis.hpp"
#include "gazectx/context_vlm.hpp"
#include "gazectx/error.hpp"
#include "gazectx/gaze.hpp"
#include "gazectx/parallel.hpp"
#include "gazectx/rng.hpp"
#include "gazectx/scene.hpp"

namespace gazectx {

// A trial needs this many assigned fixations before the current one.
inline constexpr int kMinPriorFixations = 10;
// E2: an interaction must start within (t, t + this].
inline constexpr std::int64_t kInteractionHorizonNs = 1'000'000'000;

struct TrialSource {
  Recording recording;
  Scanpath scanpath;
};

struct TrialSpec {
  std::string trial_id;
  std::size_t source_index = 0;
  std::string recording_id;
  std::int64_t frame_t_ns = 0;
  Question question = Question::kE1;
  std::string truth;
  std::size_t scanpath_index = 0;

  bool operator==(const TrialSpec&) const = default;
};

struct TrialSample {
  std::vector<TrialSpec> trials;
  std::size_t eligible = 0;
  std::size_t shortfall = 0;  // requested minus returned, when too few are eligible
};

struct VisibleObject {
  ObjectId id;
  std::string name;
  std::vector<AngularPoint> outline;
};

// Objects in view with an available silhouette, in catalog order.
inline std::vector<VisibleObject> visible_objects(const Recording& rec, const Frame& frame) {
  std::vector<VisibleObject> out;
  for (const auto& entry : rec.catalog) {
    const auto* obs = frame.find(entry.id);
    if (!obs || !object_in_view(rec, frame, *obs)) continue;
    const auto sil = resolve_silhouette(rec, frame, *obs);
    if (sil.status != SilhouetteStatus::kAvailable) continue;
    const auto v = sil.polygon->vertices();
    out.push_back({entry.id, entry.name, {v.begin(), v.end()}});
  }
  return out;
}

namespace detail {

inline bool contains_name(const std::vector<VisibleObject>& v, const std::string& name) {
  return std::any_of(v.begin(), v.end(), [&](const auto& o) { return o.name == name; });
}

inline std::string trial_id(Question q, const std::string& recording_id, std::size_t index) {
  return std::string(to_string(q)) + ":" + recording_id + ":" + std::to_string(index);
}

// Calls fn(fixation_index, frame) for every fixation preceded by at least
// kMinPriorFixations assigned fixations.
template <typename F>
void for_each_with_history(const TrialSource& src, F&& fn) {
  int assigned_before = 0;
  const auto& fx = src.scanpath.fixations;
  for (std::size_t i = 0; i < fx.size(); ++i) {
    if (assigned_before >= kMinPriorFixations && !src.recording.frames.empty())
      fn(i, src.recording.frames[src.recording.nearest_frame(fx[i].midpoint_ns())]);
    if (fx[i].assigned_object) ++assigned_before;
  }
}

inline TrialSample take_sample(std::vector<TrialSpec> eligible, std::size_t n,
                               std::uint64_t seed) {
  TrialSample out;
  out.eligible = eligible.size();
  if (n == 0 || n >= eligible.size()) {
    out.shortfall = n > eligible.size() ? n - eligible.size() : 0;
    out.trials = std::move(eligible);
    return out;
  }
  // Partial Fisher-Yates over indices, then restore scan order.
  std::vector<std::size_t> idx(eligible.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + rng.below(idx.size() - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  for (std::size_t i : idx) out.trials.push_back(std::move(eligible[i]));
  return out;
}

}  // namespace detail

// Uniform sampling without replacement over fixations that are assigned, are
// visible in their frame, and follow at least 10 assigned fixations. Truth is
// the assigned object.
inline TrialSample sample_e1_trials(std::span<const TrialSource> sources, std::size_t n,
                                    std::uint64_t seed) {
  if (n < 1) throw PreconditionError("sample_e1_trials: n must be >= 1");
  std::vector<TrialSpec> eligible;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const auto& src = sources[s];
    detail::for_each_with_history(src, [&](std::size_t i, const Frame& frame) {
      const auto& fx = src.scanpath.fixations[i];
      if (!fx.assigned_object) return;
      const auto* entry = src.recording.find_entry(*fx.assigned_object);
      if (!entry || !detail::contains_name(visible_objects(src.recording, frame), entry->name))
        return;
      eligible.push_back({detail::trial_id(Question::kE1, src.recording.recording_id, i), s,
                          src.recording.recording_id, frame.t_ns, Question::kE1, entry->name,
                          i});
    });
  }
  return detail::take_sample(std::move(eligible), n, derive_seed(seed, 0xE1));
}

// Fixations with enough history whose frame at time t is followed by an
// interaction starting in (t, t + 1 s]. Truth is the interacted object (the
// earliest onset in the window), which must be visible in the frame. n = 0
// keeps every eligible trial.
inline TrialSample sample_e2_trials(std::span<const TrialSource> sources, std::uint64_t seed,
                                    std::size_t n = 0) {
  std::vector<TrialSpec> eligible;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const auto& src = sources[s];
    const auto& rec = src.recording;
    detail::for_each_with_history(src, [&](std::size_t i, const Frame& frame) {
      const InteractionEvent* next = nullptr;
      for (const auto& ev : rec.interactions) {
        if (ev.start_ns <= frame.t_ns || ev.start_ns > frame.t_ns + kInteractionHorizonNs)
          continue;
        if (!next || ev.start_ns < next->start_ns ||
            (ev.start_ns == next->start_ns && ev.id < next->id))
          next = &ev;
      }
      if (!next) return;
      const auto* entry = rec.find_entry(next->id);
      if (!entry || !detail::contains_name(visible_objects(rec, frame), entry->name)) return;
      eligible.push_back({detail::trial_id(Question::kE2, rec.recording_id, i), s,
                          rec.recording_id, frame.t_ns, Question::kE2, entry->name, i});
    });
  }
  return detail::take_sample(std::move(eligible), n, derive_seed(seed, 0xE2));
}

// Payload with the k most recent assigned fixations before the trial's
// fixation, oldest first.
inline QueryPayload build_payload(const TrialSpec& trial, const TrialSource& src, int k) {
  if (k < 0 || k > kMaxContextFixations)
    throw PreconditionError("k must be in 0..10, got " + std::to_string(k));
  const auto& rec = src.recording;
  const Frame& frame = rec.frames[rec.nearest_frame(trial.frame_t_ns)];
  QueryPayload p;
  p.question = trial.question;
  p.image_ref = trial.trial_id + ".svg";
  LabelCard card;
  for (auto& v : visible_objects(rec, frame)) {
    p.visible_objects.push_back(v.name);
    card.names.push_back(std::move(v.name));
    card.outlines.push_back(std::move(v.outline));
  }
  p.label_card = std::move(card);

  const auto& fx = src.scanpath.fixations;
  std::vector<PriorFixation> prior;
  for (std::size_t j = trial.scanpath_index; j-- > 0 && static_cast<int>(prior.size()) < k;) {
    if (!fx[j].assigned_object) continue;
    const auto* entry = rec.find_entry(*fx[j].assigned_object);
    if (!entry) continue;
    prior.push_back({entry->name, fx[j].duration_ms(),
                     static_cast<double>(trial.frame_t_ns - fx[j].end_ns) / 1e9});
  }
  std::reverse(prior.begin(), prior.end());
  p.prior_fixations = std::move(prior);
  return p;
}

// ---------------------------------------------------------------------------
// Bootstrap.

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

// Percentile bootstrap of the mean of 0/1 outcomes. The interval is widened
// to contain the sample mean if resampling noise would exclude it.
inline Interval bootstrap_ci(std::span<const int> outcomes, double level = 0.95,
                             int resamples = 10000, std::uint64_t seed = 0) {
  if (outcomes.empty()) throw DomainError("bootstrap_ci: empty outcomes");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("bootstrap_ci: level must be in (0, 1)");
  if (resamples < 1) throw DomainError("bootstrap_ci: resamples must be >= 1");
  const std::size_t n = outcomes.size();
  std::size_t ones = 0;
  for (int o : outcomes) {
    if (o != 0 && o != 1) throw DomainError("bootstrap_ci: outcomes must be 0 or 1");
    ones += static_cast<std::size_t>(o);
  }
  const double mean = static_cast<double>(ones) / static_cast<double>(n);
  if (ones == 0 || ones == n) return {mean, mean};
  Rng rng(seed);
  std::vector<double> means(static_cast<std::size_t>(resamples));
  for (auto& m : means) {
    std::size_t s = 0;
    // Indexing a canonical zeros-then-ones layout makes the interval a
    // function of the counts alone, independent of trial order.
    for (std::size_t i = 0; i < n; ++i) s += rng.below(n) >= n - ones;
    m = static_cast<double>(s) / static_cast<double>(n);
  }
  const double tail = (1.0 - level) / 2.0 * 100.0;
  Interval ci{percentile(means, tail), percentile(means, 100.0 - tail)};
  ci.low = std::min(ci.low, mean);
  ci.high = std::max(ci.high, mean);
  return ci;
}

// ---------------------------------------------------------------------------
// Sweep.

// A baseline strategy or a model client answering the queries.
struct Agent {
  std::string name;
  std::optional<BaselineStrategy> baseline;
  VlmClient* client = nullptr;
};

inline Agent baseline_agent(BaselineStrategy s) { return {to_string(s), s, nullptr}; }
inline Agent client_agent(VlmClient& c) { return {c.name(), std::nullopt, &c}; }

enum class TrialOutcome { kCorrect, kWrong, kDiscarded, kTransport, kSkipped };

inline const char* to_string(TrialOutcome o) {
  switch (o) {
    case TrialOutcome::kCorrect: return "correct";
    case TrialOutcome::kWrong: return "wrong";
    case TrialOutcome::kDiscarded: return "discarded";
    case TrialOutcome::kTransport: return "transport";
    case TrialOutcome::kSkipped: return "skipped";
  }
  return "?";
}

inline TrialOutcome parse_trial_outcome(const std::string& s) {
  for (auto o : {TrialOutcome::kCorrect, TrialOutcome::kWrong, TrialOutcome::kDiscarded,
                 TrialOutcome::kTransport, TrialOutcome::kSkipped})
    if (s == to_string(o)) return o;
  throw InputError("unknown trial outcome '" + s + "'");
}

struct TrialRecord {
  std::string strategy;
  int k = 0;
  std::string trial_id;
  std::string truth;
  std::string chosen;  // empty unless an answer was obtained
  TrialOutcome outcome = TrialOutcome::kSkipped;

  bool operator==(const TrialRecord&) const = default;
};

struct ResultRow {
  std::string strategy;
  int k = 0;
  std::size_t n_scored = 0;
  std::size_t n_correct = 0;
  std::size_t n_discarded = 0;
  std::size_t n_transport = 0;
  // Empty when the row is skipped or nothing was scored.
  std::optional<double> accuracy;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  std::string status = "ok";  // ok | skipped | empty

  bool operator==(const ResultRow&) const = default;
};

struct SweepMeta {
  std::uint64_t seed = 0;
  std::string question = "e1";
  std::string client_kind;
  std::string template_version;
  std::size_t n_trials = 0;
  int resamples = 10000;
  double level = 0.95;

  bool operator==(const SweepMeta&) const = default;
};

struct ResultTable {
  SweepMeta meta;
  std::vector<ResultRow> rows;
  std::vector<TrialRecord> log;

  bool operator==(const ResultTable&) const = default;
};

struct SweepOptions {
  std::vector<int> k_values = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::uint64_t seed = 0;
  int jobs = 1;
  int resamples = 10000;
  double level = 0.95;
  std::string template_version = PromptTemplate{}.version;
};

// Per-trial randomness depends only on the sweep seed, agent, k and trial id,
// so worker count and scheduling never change results.
inline std::uint64_t trial_seed(std::uint64_t sweep_seed, const std::string& agent, int k,
                                const std::string& trial_id) {
  return derive_seed(sweep_seed, fnv1a64(agent), static_cast<std::uint64_t>(k),
                     fnv1a64(trial_id));
}

namespace detail {

inline ResultRow aggregate_row(const std::string& strategy, int k,
                               std::span<const TrialRecord> records, const SweepOptions& opt) {
  ResultRow row;
  row.strategy = strategy;
  row.k = k;
  std::vector<int> scored;
  bool skipped = false;
  for (const auto& r : records) {
    switch (r.outcome) {
      case TrialOutcome::kCorrect: scored.push_back(1); break;
      case TrialOutcome::kWrong: scored.push_back(0); break;
      case TrialOutcome::kDiscarded: ++row.n_discarded; break;
      case TrialOutcome::kTransport: ++row.n_transport; break;
      case TrialOutcome::kSkipped: skipped = true; break;
    }
  }
  row.n_scored = scored.size();
  for (int s : scored) row.n_correct += static_cast<std::size_t>(s);
  if (skipped) {
    row.status = "skipped";
    return row;
  }
  if (scored.empty()) {
    row.status = "empty";
    return row;
  }
  row.accuracy = static_cast<double>(row.n_correct) / static_cast<double>(row.n_scored);
  const auto ci = bootstrap_ci(scored, opt.level, opt.resamples,
                               derive_seed(opt.seed, fnv1a64(strategy),
                                           static_cast<std::uint64_t>(k), 0xB0075ULL));
  row.ci_low = ci.low;
  row.ci_high = ci.high;
  return row;
}

}  // namespace detail

// Scores every (agent, k, trial): chosen == truth over parseable answers.
// Unparseable answers are discarded from the denominator and transport
// failures are counted separately. A baseline that needs context is skipped
// at k = 0. Throws TransportExhausted when every trial of some row failed in
// transport.
inline ResultTable run_sweep(std::span<const TrialSpec> trials,
                             std::span<const TrialSource> sources, std::span<const Agent> agents,
                             const SweepOptions& opt) {
  if (trials.empty()) throw PreconditionError("run_sweep: no trials");
  if (agents.empty()) throw PreconditionError("run_sweep: no agents");
  for (int k : opt.k_values)
    if (k < 0 || k > kMaxContextFixations)
      throw PreconditionError("run_sweep: k must be in 0..10, got " + std::to_string(k));
  for (const auto& t : trials)
    if (t.source_index >= sources.size())
      throw PreconditionError("run_sweep: trial " + t.trial_id + " has no source");

  ResultTable table;
  table.meta.seed = opt.seed;
  table.meta.question = to_string(trials.front().question);
  table.meta.template_version = opt.template_version;
  table.meta.n_trials = trials.size();
  table.meta.resamples = opt.resamples;
  table.meta.level = opt.level;
  std::string kinds;
  for (const auto& a : agents) kinds += (kinds.empty() ? "" : ",") + a.name;
  table.meta.client_kind = kinds;

  const std::size_t nk = opt.k_values.size();
  for (const auto& agent : agents) {
    std::vector<TrialRecord> records(nk * trials.size());
    parallel_for(records.size(), opt.jobs, [&](std::size_t cell) {
      const int k = opt.k_values[cell / trials.size()];
      const TrialSpec& trial = trials[cell % trials.size()];
      TrialRecord& r = records[cell];
      r.strategy = agent.name;
      r.k = k;
      r.trial_id = trial.trial_id;
      r.truth = trial.truth;
      const QueryPayload payload = build_payload(trial, sources[trial.source_index], k);
      const std::uint64_t seed = trial_seed(opt.seed, agent.name, k, trial.trial_id);
      if (agent.baseline) {
        if (needs_prior(*agent.baseline) && payload.k() == 0) {
          r.outcome = TrialOutcome::kSkipped;
          return;
        }
        r.chosen = baseline_answer(*agent.baseline, payload, seed);
      } else {
        const QueryOutcome q = agent.client->query(payload, seed);
        if (std::holds_alternative<TransportError>(q)) {
          r.outcome = TrialOutcome::kTransport;
          return;
        }
        if (std::holds_alternative<ParseFailure>(q)) {
          r.outcome = TrialOutcome::kDiscarded;
          return;
        }
        r.chosen = std::get<AgentAnswer>(q).chosen;
      }
      r.outcome = r.chosen == r.truth ? TrialOutcome::kCorrect : TrialOutcome::kWrong;
    });

    for (std::size_t ki = 0; ki < nk; ++ki) {
      const std::span<const TrialRecord> slice(records.data() + ki * trials.size(),
                                               trials.size());
      ResultRow row = detail::aggregate_row(agent.name, opt.k_values[ki], slice, opt);
      if (row.n_transport == trials.size())
        throw TransportExhausted("all " + std::to_string(trials.size()) +
                                 " trials failed in transport at k=" +
                                 std::to_string(opt.k_values[ki]) + " (" + agent.name + ")");
      table.rows.push_back(std::move(row));
    }
    table.log.insert(table.log.end(), std::make_move_iterator(records.begin()),
                     std::make_move_iterator(records.end()));
  }
  return table;
}

// ---------------------------------------------------------------------------
// Emission.

namespace detail {

inline std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline std::string opt6(const std::optional<double>& v) { return v ? fmt6(*v) : std::string(); }

inline nlohmann::ordered_json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

inline std::optional<double> json_opt(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace detail

inline std::string results_csv(const ResultTable& t) {
  std::string out =
      "strategy,k,n_scored,n_discarded,n_transport,accuracy,ci_low,ci_high,status\n";
  for (const auto& r : t.rows) {
    out += r.strategy + "," + std::to_string(r.k) + "," + std::to_string(r.n_scored) + "," +
           std::to_string(r.n_discarded) + "," + std::to_string(r.n_transport) + "," +
           detail::opt6(r.accuracy) + "," + detail::opt6(r.ci_low) + "," +
           detail::opt6(r.ci_high) + "," + r.status + "\n";
  }
  return out;
}

inline nlohmann::ordered_json results_json(const ResultTable& t) {
  nlohmann::ordered_json j;
  j["meta"] = {{"seed", t.meta.seed},
               {"question", t.meta.question},
               {"client_kind", t.meta.client_kind},
               {"template_version", t.meta.template_version},
               {"n_trials", t.meta.n_trials},
               {"resamples", t.meta.resamples},
               {"level", t.meta.level}};
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"strategy", r.strategy},
                    {"k", r.k},
                    {"n_scored", r.n_scored},
                    {"n_correct", r.n_correct},
                    {"n_discarded", r.n_discarded},
                    {"n_transport", r.n_transport},
                    {"accuracy", detail::opt_json(r.accuracy)},
                    {"ci_low", detail::opt_json(r.ci_low)},
                    {"ci_high", detail::opt_json(r.ci_high)},
                    {"status", r.status}});
  }
  j["rows"] = std::move(rows);
  auto log = nlohmann::ordered_json::array();
  for (const auto& r : t.log) {
    log.push_back({{"strategy", r.strategy},
                   {"k", r.k},
                   {"trial_id", r.trial_id},
                   {"truth", r.truth},
                   {"chosen", r.chosen},
                   {"outcome", to_string(r.outcome)}});
  }
  j["trials"] = std::move(log);
  return j;
}

inline ResultTable results_from_json(const nlohmann::json& j) {
  ResultTable t;
  try {
    const auto& m = j.at("meta");
    t.meta.seed = m.at("seed").get<std::uint64_t>();
    t.meta.question = m.at("question").get<std::string>();
    t.meta.client_kind = m.at("client_kind").get<std::string>();
    t.meta.template_version = m.at("template_version").get<std::string>();
    t.meta.n_trials = m.at("n_trials").get<std::size_t>();
    t.meta.resamples = m.at("resamples").get<int>();
    t.meta.level = m.at("level").get<double>();
    for (const auto& r : j.at("rows")) {
      ResultRow row;
      row.strategy = r.at("strategy").get<std::string>();
      row.k = r.at("k").get<int>();
      row.n_scored = r.at("n_scored").get<std::size_t>();
      row.n_correct = r.at("n_correct").get<std::size_t>();
      row.n_discarded = r.at("n_discarded").get<std::size_t>();
      row.n_transport = r.at("n_transport").get<std::size_t>();
      row.accuracy = detail::json_opt(r.at("accuracy"));
      row.ci_low = detail::json_opt(r.at("ci_low"));
      row.ci_high = detail::json_opt(r.at("ci_high"));
      row.status = r.at("status").get<std::string>();
      t.rows.push_back(std::move(row));
    }
    if (j.contains("trials")) {
      for (const auto& r : j.at("trials")) {
        t.log.push_back({r.at("strategy").get<std::string>(), r.at("k").get<int>(),
                         r.at("trial_id").get<std::string>(), r.at("truth").get<std::string>(),
                         r.at("chosen").get<std::string>(),
                         parse_trial_outcome(r.at("outcome").get<std::string>())});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("results.json: ") + e.what());
  }
  return t;
}

// Accuracy against k, one line per strategy over its CI band.
inline std::string curves_svg(const ResultTable& t) {
  constexpr double kW = 640, kH = 400, kL = 60, kR = 170, kT = 30, kB = 50;
  constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                      "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};
  const double pw = kW - kL - kR, ph = kH - kT - kB;
  auto x = [&](double k) { return kL + k / kMaxContextFixations * pw; };
  auto y = [&](double a) { return kT + (1.0 - a) * ph; };
  auto f = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
                  "viewBox=\"0 0 640 400\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  s += "<text x=\"" + f(kL) + "\" y=\"18\">" + t.meta.question +
       " accuracy vs. prior fixations (95% CI)</text>\n";
  for (int i = 0; i <= 10; ++i) {
    const double a = i / 10.0;
    s += "<line x1=\"" + f(kL) + "\" y1=\"" + f(y(a)) + "\" x2=\"" + f(kL + pw) + "\" y2=\"" +
         f(y(a)) + "\" stroke=\"#e0e0e0\"/>\n";
    if (i % 2 == 0)
      s += "<text x=\"" + f(kL - 8) + "\" y=\"" + f(y(a) + 4) + "\" text-anchor=\"end\">" +
           f(a) + "</text>\n";
    s += "<text x=\"" + f(x(i)) + "\" y=\"" + f(kT + ph + 18) + "\" text-anchor=\"middle\">" +
         std::to_string(i) + "</text>\n";
  }
  s += "<rect x=\"" + f(kL) + "\" y=\"" + f(kT) + "\" width=\"" + f(pw) + "\" height=\"" +
       f(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  s += "<text x=\"" + f(kL + pw / 2) + "\" y=\"" + f(kH - 10) +
       "\" text-anchor=\"middle\">prior fixations k</text>\n";

  std::vector<std::string> order;
  std::map<std::string, std::vector<const ResultRow*>> by_strategy;
  for (const auto& r : t.rows) {
    if (!by_strategy.count(r.strategy)) order.push_back(r.strategy);
    by_strategy[r.strategy].push_back(&r);
  }
  for (std::size_t si = 0; si < order.size(); ++si) {
    const std::string color = kPalette[si % std::size(kPalette)];
    std::vector<const ResultRow*> pts;
    for (const auto* r : by_strategy[order[si]])
      if (r->accuracy) pts.push_back(r);
    std::sort(pts.begin(), pts.end(), [](auto* a, auto* b) { return a->k < b->k; });
    if (!pts.empty()) {
      std::string band, line;
      for (const auto* r : pts) band += f(x(r->k)) + "," + f(y(*r->ci_high)) + " ";
      for (auto it = pts.rbegin(); it != pts.rend(); ++it)
        band += f(x((*it)->k)) + "," + f(y(*(*it)->ci_low)) + " ";
      for (const auto* r : pts) line += f(x(r->k)) + "," + f(y(*r->accuracy)) + " ";
      band.pop_back();
      line.pop_back();
      s += "<polygon points=\"" + band + "\" fill=\"" + color +
           "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
      s += "<polyline points=\"" + line + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
      for (const auto* r : pts)
        s += "<circle cx=\"" + f(x(r->k)) + "\" cy=\"" + f(y(*r->accuracy)) + "\" r=\"3\" fill=\"" +
             color + "\"/>\n";
    }
    const double ly = kT + 14.0 + 18.0 * static_cast<double>(si);
    s += "<line x1=\"" + f(kL + pw + 12) + "\" y1=\"" + f(ly - 4) + "\" x2=\"" + f(kL + pw + 32) +
         "\" y2=\"" + f(ly - 4) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    std::string label = order[si];
    label = detail::replace_all(detail::replace_all(detail::replace_all(label, "&", "&amp;"), "<", "&lt;"), ">", "&gt;");
    s += "<text x=\"" + f(kL + pw + 38) + "\" y=\"" + f(ly) + "\">" + label + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

// Writes results.csv, results.json and curves.svg into out_dir.
inline void emit_results(const ResultTable& t, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  auto write = [&](const char* name, const std::string& text) {
    const auto path = out_dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
  };
  write("results.csv", results_csv(t));
  write("results.json", results_json(t).dump(2) + "\n");
  write("curves.svg", curves_svg(t));
}

}  // namespace gazectx
