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

// Run configuration shared by the command-line tool.
//
// File format: flat `key = value` lines grouped under [synth], [detector],
// [space], [client] and [experiment] sections. `#` and `;` start comments.
// Ranges are written `lo,hi`; booleans `true` or `false`.
//
//   [synth]
//   seed = 7
//   object_size_range = 0.04, 0.12
//
//   [client]
//   kind = mock:echo-prev

#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gazectx/analysis.hpp"
#include "gazectx/context_vlm.hpp"
#include "gazectx/error.hpp"
#include "gazectx/gaze.hpp"
#include "gazectx/synthgen.hpp"

namespace gazectx {

struct ExperimentConfig {
  std::size_t n_trials = 200;
  std::uint64_t seed = 0;
  std::string k_values = "0..10";
  std::string baselines = "random_visible,random_prior,greedy_most_fixated,previous_fixation";
  double tolerance_deg = kDefaultToleranceDeg;
  int resamples = 10000;
  double level = 0.95;
  std::string prompt_template;  // path; empty = built-in template
};

struct RunConfig {
  SynthConfig synth;
  DetectorConfig detector;
  SpaceConfig space;
  ClientConfig client;
  ExperimentConfig experiment;
};

// Parses "a..b", "a,b,c" or a single integer into k values within 0..10.
inline std::vector<int> parse_k_values(const std::string& text) {
  auto to_int = [&](std::string_view s) {
    const std::string t = detail::trim(s);
    int v = 0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty())
      throw UsageError("bad k value '" + t + "' in '" + text + "'");
    if (v < 0 || v > kMaxContextFixations)
      throw UsageError("k must be in 0..10, got " + std::to_string(v));
    return v;
  };
  std::vector<int> out;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const int lo = to_int(std::string_view(text).substr(0, dots));
    const int hi = to_int(std::string_view(text).substr(dots + 2));
    if (lo > hi) throw UsageError("empty k range '" + text + "'");
    for (int k = lo; k <= hi; ++k) out.push_back(k);
    return out;
  }
  std::size_t start = 0;
  for (;;) {
    const auto comma = text.find(',', start);
    out.push_back(to_int(std::string_view(text).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = text.find(',', start);
    auto item = detail::trim(std::string_view(text).substr(start, comma - start));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

namespace detail {

struct ConfigField {
  std::string key;  // section.name
  std::function<void(const std::string&)> set;
  std::function<nlohmann::ordered_json()> get;
};

inline double parse_double(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  double out = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty())
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  return out;
}

template <typename I>
I parse_int(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  I out = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty())
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  const std::string t = fold(v);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

inline Range parse_range(const std::string& key, const std::string& v) {
  const auto parts = split_list(v);
  if (parts.size() != 2) throw ConfigError(key + ": expected 'lo,hi', got '" + v + "'");
  return {parse_double(key, parts[0]), parse_double(key, parts[1])};
}

inline std::vector<ConfigField> config_fields(RunConfig& c) {
  std::vector<ConfigField> f;
  auto num = [&](std::string key, double& ref) {
    f.push_back({key, [&ref, key](const std::string& v) { ref = parse_double(key, v); },
                 [&ref] { return nlohmann::ordered_json(ref); }});
  };
  auto i32 = [&](std::string key, int& ref) {
    f.push_back({key, [&ref, key](const std::string& v) { ref = parse_int<int>(key, v); },
                 [&ref] { return nlohmann::ordered_json(ref); }});
  };
  auto u64 = [&](std::string key, std::uint64_t& ref) {
    f.push_back({key,
                 [&ref, key](const std::string& v) { ref = parse_int<std::uint64_t>(key, v); },
                 [&ref] { return nlohmann::ordered_json(ref); }});
  };
  auto usz = [&](std::string key, std::size_t& ref) {
    f.push_back({key,
                 [&ref, key](const std::string& v) { ref = parse_int<std::size_t>(key, v); },
                 [&ref] { return nlohmann::ordered_json(ref); }});
  };
  auto str = [&](std::string key, std::string& ref) {
    f.push_back({key, [&ref](const std::string& v) { ref = trim(v); },
                 [&ref] { return nlohmann::ordered_json(ref); }});
  };
  auto flag = [&](std::string key, bool& ref) {
    f.push_back({key, [&ref, key](const std::string& v) { ref = parse_bool(key, v); },
                 [&ref] { return nlohmann::ordered_json(ref); }});
  };
  auto range = [&](std::string key, Range& ref) {
    f.push_back({key, [&ref, key](const std::string& v) { ref = parse_range(key, v); },
                 [&ref] { return nlohmann::ordered_json::array({ref.min, ref.max}); }});
  };

  auto& s = c.synth;
  u64("synth.seed", s.seed);
  i32("synth.n_objects", s.n_objects);
  range("synth.object_size_range", s.object_size_m);
  range("synth.placement_radius_range", s.placement_radius_m);
  i32("synth.n_fixations", s.n_fixations);
  range("synth.fixation_duration_range_ms", s.fixation_duration_ms);
  range("synth.saccade_duration_range_ms", s.saccade_duration_ms);
  num("synth.gaze_jitter_deg", s.gaze_jitter_deg);
  num("synth.interaction_fraction", s.interaction_fraction);
  num("synth.sample_rate_hz", s.sample_rate_hz);
  num("synth.sphere_fraction", s.sphere_fraction);
  num("synth.revisit_probability", s.revisit_probability);
  str("synth.task_label", s.task_label);
  num("synth.camera_focal_length_px", s.camera.focal_length_px);
  num("synth.camera_cx", s.camera.cx);
  num("synth.camera_cy", s.camera.cy);
  num("synth.camera_width", s.camera.width);
  num("synth.camera_height", s.camera.height);
  num("synth.camera_max_fov_deg", s.camera.max_fov_deg);

  num("detector.velocity_threshold_deg_s", c.detector.velocity_threshold_deg_s);
  num("detector.min_duration_ms", c.detector.min_duration_ms);
  i32("detector.max_gap_samples", c.detector.max_gap_samples);

  num("space.near_max_m", c.space.near_max_m);
  num("space.mid_min_m", c.space.mid_min_m);
  num("space.mid_max_m", c.space.mid_max_m);
  num("space.fixated_max_m", c.space.fixated_max_m);
  num("space.interaction_pad_s", c.space.interaction_pad_s);
  flag("space.fixated_per_frame", c.space.fixated_per_frame);

  str("client.kind", c.client.kind);
  str("client.endpoint_url", c.client.endpoint_url);
  str("client.model_name", c.client.model_name);
  str("client.api_key_env_var_name", c.client.api_key_env_var_name);
  num("client.timeout_s", c.client.timeout_s);
  i32("client.max_in_flight", c.client.max_in_flight);
  i32("client.retries", c.client.retries);
  num("client.backoff_s", c.client.backoff_s);
  u64("client.seed", c.client.seed);
  num("client.mock_unparseable_rate", c.client.mock_unparseable_rate);

  auto& e = c.experiment;
  usz("experiment.n_trials", e.n_trials);
  u64("experiment.seed", e.seed);
  str("experiment.k", e.k_values);
  str("experiment.baselines", e.baselines);
  num("experiment.tolerance_deg", e.tolerance_deg);
  i32("experiment.resamples", e.resamples);
  num("experiment.level", e.level);
  str("experiment.prompt_template", e.prompt_template);
  return f;
}

}  // namespace detail

// Applies `key = value` text on top of cfg. `origin` prefixes error messages.
inline void apply_config_text(std::istream& in, RunConfig& cfg,
                              const std::string& origin = "config") {
  auto fields = detail::config_fields(cfg);
  std::map<std::string, const detail::ConfigField*> by_key;
  for (const auto& f : fields) by_key[f.key] = &f;

  std::string section, line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string where = origin + ":" + std::to_string(n);
    if (const auto c = line.find_first_of("#;"); c != std::string::npos) line.resize(c);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError(where + ": malformed section '" + t + "'");
      section = detail::trim(std::string_view(t).substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    if (section.empty()) throw ConfigError(where + ": key outside a [section]");
    const std::string key = section + "." + detail::trim(std::string_view(t).substr(0, eq));
    const auto it = by_key.find(key);
    if (it == by_key.end()) throw ConfigError(where + ": unknown key '" + key + "'");
    try {
      it->second->set(t.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
}

inline void load_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path);
  apply_config_text(in, cfg, path);
}

// Every effective value, grouped by section.
inline nlohmann::ordered_json config_json(const RunConfig& cfg) {
  RunConfig copy = cfg;
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& f : detail::config_fields(copy)) {
    const auto dot = f.key.find('.');
    out[f.key.substr(0, dot)][f.key.substr(dot + 1)] = f.get();
  }
  return out;
}

}  // namespace gazectx
