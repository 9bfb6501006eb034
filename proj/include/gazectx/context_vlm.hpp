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

// Scanpath-context prompts, constrained answer parsing, baseline strategies
// and the model client abstraction (deterministic mocks live here; the HTTP
// client is in live_client.hpp).

#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "gazectx/error.hpp"
#include "gazectx/geometry.hpp"
#include "gazectx/rng.hpp"

namespace gazectx {

enum class Question { kE1, kE2 };

inline const char* to_string(Question q) { return q == Question::kE1 ? "e1" : "e2"; }

inline Question parse_question(const std::string& s) {
  if (s == "e1" || s == "E1") return Question::kE1;
  if (s == "e2" || s == "E2") return Question::kE2;
  throw UsageError("unknown question '" + s + "' (expected e1 or e2)");
}

struct PriorFixation {
  std::string object_name;
  double duration_ms = 0.0;
  double ended_s_ago = 0.0;
  bool operator==(const PriorFixation&) const = default;
};

// Synthesized stand-in image: visible object names over their outlines.
struct LabelCard {
  std::vector<std::string> names;
  std::vector<std::vector<AngularPoint>> outlines;  // parallel to names
  bool operator==(const LabelCard&) const = default;
};

// Renders a label card as a self-contained SVG: outlines in angular
// coordinates (degrees mapped to pixels) with each name at its outline's
// vertex centroid.
inline std::string render_label_card_svg(const LabelCard& card) {
  constexpr double kHalfSpanDeg = 60.0;
  constexpr double kSizePx = 512.0;
  auto px = [&](double d) { return (d + kHalfSpanDeg) / (2.0 * kHalfSpanDeg) * kSizePx; };
  auto esc = [](const std::string& s) {
    std::string o;
    for (char c : s) {
      switch (c) {
        case '&': o += "&amp;"; break;
        case '<': o += "&lt;"; break;
        case '>': o += "&gt;"; break;
        case '"': o += "&quot;"; break;
        default: o += c;
      }
    }
    return o;
  };
  char buf[96];
  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"512\" height=\"512\" "
      "viewBox=\"0 0 512 512\"><rect width=\"512\" height=\"512\" fill=\"#ffffff\"/>";
  for (std::size_t i = 0; i < card.names.size(); ++i) {
    double cx = kSizePx / 2.0, cy = kSizePx / 2.0;
    if (i < card.outlines.size() && !card.outlines[i].empty()) {
      std::string pts;
      cx = cy = 0.0;
      for (const auto& p : card.outlines[i]) {
        std::snprintf(buf, sizeof buf, "%.1f,%.1f ", px(p.azimuth_deg), px(p.elevation_deg));
        pts += buf;
        cx += px(p.azimuth_deg);
        cy += px(p.elevation_deg);
      }
      cx /= static_cast<double>(card.outlines[i].size());
      cy /= static_cast<double>(card.outlines[i].size());
      pts.pop_back();
      svg += "<polygon points=\"" + pts + "\" fill=\"none\" stroke=\"#444444\"/>";
    }
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" ", cx, cy);
    svg += buf;
    svg += "font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" +
           esc(card.names[i]) + "</text>";
  }
  svg += "</svg>\n";
  return svg;
}

inline constexpr int kMaxContextFixations = 10;

struct QueryPayload {
  std::string image_ref;
  std::optional<LabelCard> label_card;
  std::vector<std::string> visible_objects;
  std::vector<PriorFixation> prior_fixations;  // oldest first
  Question question = Question::kE1;

  int k() const { return static_cast<int>(prior_fixations.size()); }

  void check() const {
    if (visible_objects.empty()) throw PreconditionError("payload: no visible objects");
    std::set<std::string> seen(visible_objects.begin(), visible_objects.end());
    if (seen.size() != visible_objects.size())
      throw PreconditionError("payload: visible object names are not unique");
    if (k() > kMaxContextFixations)
      throw PreconditionError("payload: more than 10 prior fixations");
  }

  bool operator==(const QueryPayload&) const = default;
};

// ---------------------------------------------------------------------------
// Prompt construction.

enum class BlockKind { kSystem, kContext, kImage, kQuestion };

inline const char* to_string(BlockKind k) {
  switch (k) {
    case BlockKind::kSystem: return "system";
    case BlockKind::kContext: return "context";
    case BlockKind::kImage: return "image";
    case BlockKind::kQuestion: return "question";
  }
  return "?";
}

struct MessageBlock {
  BlockKind kind;
  std::string text;  // image blocks carry the image reference
  bool operator==(const MessageBlock&) const = default;
};

// Prompt wording. Placeholders: {objects} (system), {name}, {duration_ms},
// {seconds_ago} (context_line). The version string is echoed into results.
struct PromptTemplate {
  std::string version = "gazectx-prompt-v1";
  std::string system =
      "You are an assistant running on a pair of smart glasses. You see the "
      "wearer's egocentric camera image. The currently visible objects are: "
      "{objects}. Respond only with JSON of the exact form {\"answer\": "
      "\"<name>\"} where <name> is one of the visible objects listed above.";
  std::string context_header = "Recent gaze fixations of the wearer, oldest first:";
  std::string context_line = "looked at {name} for {duration_ms} ms, {seconds_ago} s ago";
  std::string question_e1 = "What am I looking at?";
  std::string question_e2 = "What am I going to interact with?";

  bool operator==(const PromptTemplate&) const = default;
};

namespace detail {

inline std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos;
       pos = s.find(from, pos + to.size()))
    s.replace(pos, from.size(), to);
  return s;
}

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::string fold(std::string_view s) {
  std::string out = trim(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

}  // namespace detail

// Loads a template from `key = value` lines (keys: version, system,
// context_header, context_line, question_e1, question_e2). Missing keys keep
// their defaults. "\n" in a value becomes a newline.
inline PromptTemplate load_prompt_template(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open prompt template " + path);
  PromptTemplate t;
  std::map<std::string, std::string*> fields = {
      {"version", &t.version},          {"system", &t.system},
      {"context_header", &t.context_header}, {"context_line", &t.context_line},
      {"question_e1", &t.question_e1},  {"question_e2", &t.question_e2}};
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto s = detail::trim(line);
    if (s.empty() || s[0] == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(n) + ": expected key = value");
    const auto key = detail::trim(s.substr(0, eq));
    auto it = fields.find(key);
    if (it == fields.end())
      throw ConfigError(path + ":" + std::to_string(n) + ": unknown key '" + key + "'");
    *it->second = detail::replace_all(detail::trim(s.substr(eq + 1)), "\\n", "\n");
  }
  return t;
}

// Blocks in order: system, context (omitted when k = 0), image, question.
inline std::vector<MessageBlock> build_prompt(const QueryPayload& payload,
                                              const PromptTemplate& tmpl = {}) {
  payload.check();
  std::string objects;
  for (std::size_t i = 0; i < payload.visible_objects.size(); ++i) {
    if (i) objects += ", ";
    objects += "\"" + payload.visible_objects[i] + "\"";
  }
  std::vector<MessageBlock> blocks;
  blocks.push_back({BlockKind::kSystem, detail::replace_all(tmpl.system, "{objects}", objects)});
  if (payload.k() > 0) {
    std::string ctx = tmpl.context_header;
    for (const auto& f : payload.prior_fixations) {
      std::string line = detail::replace_all(tmpl.context_line, "{name}", f.object_name);
      line = detail::replace_all(line, "{duration_ms}", detail::format_fixed(f.duration_ms, 0));
      line = detail::replace_all(line, "{seconds_ago}", detail::format_fixed(f.ended_s_ago, 1));
      if (!ctx.empty()) ctx += "\n";
      ctx += line;
    }
    blocks.push_back({BlockKind::kContext, ctx});
  }
  blocks.push_back({BlockKind::kImage, payload.image_ref});
  blocks.push_back({BlockKind::kQuestion, payload.question == Question::kE1
                                              ? tmpl.question_e1
                                              : tmpl.question_e2});
  return blocks;
}

// ---------------------------------------------------------------------------
// Answers.

struct AgentAnswer {
  std::string chosen;
  std::string raw;
  bool operator==(const AgentAnswer&) const = default;
};

struct ParseFailure {
  std::string raw;
  std::string reason;
  bool operator==(const ParseFailure&) const = default;
};

struct TransportError {
  std::string message;
  int attempts = 0;
  bool operator==(const TransportError&) const = default;
};

using ParseResult = std::variant<AgentAnswer, ParseFailure>;
using QueryOutcome = std::variant<AgentAnswer, ParseFailure, TransportError>;

namespace detail {

// End offset (exclusive) of the balanced {...} starting at `open`, honoring
// JSON string escapes; npos when unbalanced.
inline std::size_t match_brace(std::string_view s, std::size_t open) {
  int depth = 0;
  bool in_str = false;
  for (std::size_t i = open; i < s.size(); ++i) {
    const char c = s[i];
    if (in_str) {
      if (c == '\\') ++i;
      else if (c == '"') in_str = false;
      continue;
    }
    if (c == '"') in_str = true;
    else if (c == '{') ++depth;
    else if (c == '}' && --depth == 0) return i + 1;
  }
  return std::string_view::npos;
}

}  // namespace detail

// Takes the first parseable JSON object in the text, requires a string
// "answer", and matches it against the visible names case-insensitively after
// trimming. Anything else is a ParseFailure: the trial is discarded, never
// scored as wrong.
inline ParseResult parse_answer(std::string_view raw,
                                const std::vector<std::string>& visible_objects) {
  const std::string raw_s(raw);
  std::optional<nlohmann::json> obj;
  for (std::size_t open = raw.find('{'); open != std::string_view::npos;
       open = raw.find('{', open + 1)) {
    const auto close = detail::match_brace(raw, open);
    if (close == std::string_view::npos) continue;
    auto parsed = nlohmann::json::parse(raw.substr(open, close - open), nullptr, false);
    if (!parsed.is_discarded() && parsed.is_object()) {
      obj = std::move(parsed);
      break;
    }
  }
  if (!obj) return ParseFailure{raw_s, "no JSON object"};
  const auto it = obj->find("answer");
  if (it == obj->end()) return ParseFailure{raw_s, "missing key 'answer'"};
  if (!it->is_string()) return ParseFailure{raw_s, "'answer' is not a string"};
  const auto want = detail::fold(it->get<std::string>());
  for (const auto& name : visible_objects)
    if (detail::fold(name) == want) return AgentAnswer{name, raw_s};
  return ParseFailure{raw_s, "answer '" + it->get<std::string>() + "' is not visible"};
}

inline std::string serialize_answer(const AgentAnswer& a) {
  return nlohmann::json{{"answer", a.chosen}}.dump();
}

// ---------------------------------------------------------------------------
// Baselines.

enum class BaselineStrategy { kRandomVisible, kRandomPrior, kGreedyMostFixated, kPreviousFixation };

inline const char* to_string(BaselineStrategy s) {
  switch (s) {
    case BaselineStrategy::kRandomVisible: return "random_visible";
    case BaselineStrategy::kRandomPrior: return "random_prior";
    case BaselineStrategy::kGreedyMostFixated: return "greedy_most_fixated";
    case BaselineStrategy::kPreviousFixation: return "previous_fixation";
  }
  return "?";
}

inline BaselineStrategy parse_baseline(const std::string& s) {
  for (auto b : {BaselineStrategy::kRandomVisible, BaselineStrategy::kRandomPrior,
                 BaselineStrategy::kGreedyMostFixated, BaselineStrategy::kPreviousFixation})
    if (s == to_string(b)) return b;
  throw UsageError("unknown baseline '" + s + "'");
}

inline bool needs_prior(BaselineStrategy s) { return s != BaselineStrategy::kRandomVisible; }

// The most frequent name among prior fixations; ties go to the one fixated
// most recently.
inline std::string most_fixated(const std::vector<PriorFixation>& prior) {
  std::map<std::string, std::pair<int, std::size_t>> tally;  // count, last index
  for (std::size_t i = 0; i < prior.size(); ++i) {
    auto& t = tally[prior[i].object_name];
    ++t.first;
    t.second = i;
  }
  const auto best = std::max_element(tally.begin(), tally.end(), [](const auto& a, const auto& b) {
    return a.second < b.second;  // count first, then recency
  });
  return best->first;
}

inline std::string baseline_answer(BaselineStrategy strategy, const QueryPayload& payload,
                                   std::uint64_t seed) {
  if (needs_prior(strategy) && payload.k() == 0)
    throw PreconditionError(std::string(to_string(strategy)) + " needs k >= 1");
  Rng rng(seed);
  switch (strategy) {
    case BaselineStrategy::kRandomVisible:
      return payload.visible_objects[rng.below(payload.visible_objects.size())];
    case BaselineStrategy::kRandomPrior:
      return payload.prior_fixations[rng.below(payload.prior_fixations.size())].object_name;
    case BaselineStrategy::kGreedyMostFixated:
      return most_fixated(payload.prior_fixations);
    case BaselineStrategy::kPreviousFixation:
      return payload.prior_fixations.back().object_name;
  }
  return {};
}

// ---------------------------------------------------------------------------
// Clients.

enum class ClientKind { kMock, kLive };

struct ClientConfig {
  std::string kind = "mock:echo-prev";  // "mock:<strategy>" or "live"
  std::string endpoint_url;
  std::string model_name;
  std::string api_key_env_var_name;
  double timeout_s = 60.0;
  int max_in_flight = 4;
  int retries = 2;
  double backoff_s = 0.5;         // first retry delay, doubled per attempt
  std::uint64_t seed = 0;         // mock clients only
  double mock_unparseable_rate = 0.0;

  void check() const {
    if (max_in_flight < 1) throw ConfigError("client: max_in_flight must be >= 1");
    if (!(timeout_s > 0.0)) throw ConfigError("client: timeout_s must be > 0");
    if (retries < 0) throw ConfigError("client: retries must be >= 0");
    if (!(mock_unparseable_rate >= 0.0 && mock_unparseable_rate <= 1.0))
      throw ConfigError("client: mock_unparseable_rate must be in [0, 1]");
  }
};

// Callers may submit concurrently; implementations must be thread-safe.
class VlmClient {
 public:
  virtual ~VlmClient() = default;
  // trial_seed is pre-assigned per trial so concurrency never changes results.
  virtual QueryOutcome query(const QueryPayload& payload, std::uint64_t trial_seed) = 0;
  virtual std::string name() const = 0;
};

enum class MockStrategy { kEchoPrevious, kUniformRandom, kGreedy };

inline MockStrategy parse_mock_strategy(const std::string& s) {
  if (s == "echo-prev" || s == "echo-previous-fixation") return MockStrategy::kEchoPrevious;
  if (s == "uniform-random") return MockStrategy::kUniformRandom;
  if (s == "greedy") return MockStrategy::kGreedy;
  throw UsageError("unknown mock strategy '" + s +
                   "' (expected echo-prev, uniform-random or greedy)");
}

// Deterministic stand-in model: a pure function of payload, client seed and
// trial seed. It emits raw text that goes through parse_answer like a real
// response. A configurable share of responses is deliberately unparseable.
class MockClient final : public VlmClient {
 public:
  MockClient(MockStrategy strategy, std::string label, std::uint64_t seed,
             double unparseable_rate = 0.0)
      : strategy_(strategy), label_(std::move(label)), seed_(seed),
        unparseable_rate_(unparseable_rate) {}

  QueryOutcome query(const QueryPayload& payload, std::uint64_t trial_seed) override {
    const std::string raw = respond(payload, trial_seed);
    auto parsed = parse_answer(raw, payload.visible_objects);
    if (auto* a = std::get_if<AgentAnswer>(&parsed)) return *a;
    return std::get<ParseFailure>(parsed);
  }

  std::string respond(const QueryPayload& payload, std::uint64_t trial_seed) const {
    // The garbage draw uses its own stream so it never shifts the answer.
    Rng garbage(derive_seed(seed_, trial_seed, 0x6a7bULL));
    if (unparseable_rate_ > 0.0 && garbage.uniform() < unparseable_rate_)
      return "I am not sure which object that is.";
    Rng rng(derive_seed(seed_, trial_seed));
    std::string choice;
    if (strategy_ == MockStrategy::kEchoPrevious && payload.k() > 0)
      choice = payload.prior_fixations.back().object_name;
    else if (strategy_ == MockStrategy::kGreedy && payload.k() > 0)
      choice = most_fixated(payload.prior_fixations);
    else
      choice = payload.visible_objects[rng.below(payload.visible_objects.size())];
    return "Sure. " + nlohmann::json{{"answer", choice}}.dump();
  }

  std::string name() const override { return label_; }

 private:
  MockStrategy strategy_;
  std::string label_;
  std::uint64_t seed_;
  double unparseable_rate_;
};

inline std::unique_ptr<VlmClient> make_mock_client(const ClientConfig& cfg) {
  constexpr std::string_view kPrefix = "mock:";
  if (cfg.kind.rfind(kPrefix, 0) != 0)
    throw UsageError("not a mock client kind: '" + cfg.kind + "'");
  const auto strategy = parse_mock_strategy(cfg.kind.substr(kPrefix.size()));
  return std::make_unique<MockClient>(strategy, cfg.kind, cfg.seed, cfg.mock_unparseable_rate);
}

}  // namespace gazectx
