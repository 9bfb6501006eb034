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

// gazectx command-line tool.
//
// Exit codes: 0 success; 1 validation, domain or input error; 2 usage or
// configuration error; 3 the model endpoint failed every trial at some k.

#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gazectx/gazectx.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace gazectx {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw IoError("sha256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xf];
  }
  return out;
}

// Provenance record written next to every output.
class Meta {
 public:
  Meta(std::string command, const RunConfig& cfg) {
    j_["tool"] = "gazectx";
    j_["version"] = GAZECTX_VERSION;
    j_["command"] = std::move(command);
    j_["config"] = config_json(cfg);
    j_["inputs"] = ordered_json::array();
  }

  void input(const std::string& path, const std::string& bytes) {
    j_["inputs"].push_back({{"path", path}, {"sha256", sha256_hex(bytes)}});
  }
  ordered_json& operator[](const char* key) { return j_[key]; }

  void write(const std::optional<fs::path>& path) const {
    if (path) write_file(*path, j_.dump(2) + "\n");
  }

 private:
  ordered_json j_;
};

std::optional<fs::path> meta_path(const std::string& flag, const fs::path& fallback) {
  if (!flag.empty()) return fs::path(flag);
  if (fallback.empty()) return std::nullopt;
  return fallback;
}

// "out.jsonl" -> "out.<suffix>"
fs::path sibling(const fs::path& file, const std::string& suffix) {
  fs::path p = file;
  p.replace_extension(suffix);
  return p;
}

Recording load_checked(const std::string& path, Meta& meta) {
  const std::string bytes = read_file(path);
  meta.input(path, bytes);
  std::istringstream in(bytes);
  try {
    return load_recording(in);
  } catch (const Error& e) {
    throw InputError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

int cmd_synth(const RunConfig& cfg, const std::string& out, const std::string& meta_flag) {
  const auto scene = generate(cfg.synth);
  const fs::path path(out);
  save_recording(scene.recording, path.string());
  write_file(sibling(path, ".truth.json"), truth_to_json(scene.truth));
  Meta meta("synth", cfg);
  meta["outputs"] = {path.string(), sibling(path, ".truth.json").string()};
  meta.write(meta_path(meta_flag, sibling(path, ".meta.json")));
  std::cout << "wrote " << path.string() << " (" << scene.recording.frames.size()
            << " frames, " << scene.recording.catalog.size() << " objects, "
            << scene.truth.true_fixations.size() << " fixations)\n";
  return 0;
}

int cmd_validate(const RunConfig& cfg, const std::vector<std::string>& files,
                 const std::string& meta_flag) {
  Meta meta("validate", cfg);
  std::size_t total = 0;
  auto results = ordered_json::array();
  for (const auto& path : files) {
    const std::string bytes = read_file(path);
    meta.input(path, bytes);
    std::istringstream in(bytes);
    std::vector<Violation> violations;
    try {
      violations = validate(parse_recording(in));
    } catch (const Error& e) {
      violations.push_back({"PARSE_ERROR", path, e.what()});
    }
    for (const auto& v : violations)
      std::cout << path << ": " << v.code << " at " << v.location << ": " << v.message << "\n";
    std::cout << path << ": " << violations.size() << " violations\n";
    results.push_back({{"path", path}, {"violations", violations.size()}});
    total += violations.size();
  }
  meta["results"] = results;
  meta.write(meta_path(meta_flag, {}));
  return total == 0 ? 0 : 1;
}

std::vector<TrialSource> load_sources(const RunConfig& cfg, const std::vector<std::string>& files,
                                      int jobs, Meta& meta) {
  std::vector<Recording> recs;
  for (const auto& f : files) recs.push_back(load_checked(f, meta));
  std::vector<TrialSource> sources(recs.size());
  parallel_for(recs.size(), jobs, [&](std::size_t i) {
    sources[i].scanpath = build_scanpath(recs[i], cfg.detector, cfg.experiment.tolerance_deg);
    sources[i].recording = std::move(recs[i]);
  });
  return sources;
}

int cmd_sizes(const RunConfig& cfg, const std::vector<std::string>& files,
              const std::string& format, const std::string& out, int jobs,
              const std::string& meta_flag) {
  Meta meta("sizes", cfg);
  parse_report_format(format);
  const auto sources = load_sources(cfg, files, jobs, meta);
  std::vector<SizeCollection> parts(sources.size());
  parallel_for(sources.size(), jobs, [&](std::size_t i) {
    parts[i] = collect_size_samples(sources[i].recording, sources[i].scanpath, cfg.space);
  });
  SizeCollection all;
  for (const auto& p : parts) all.merge(p);
  const auto emitted = emit_report(all, cfg.space, format);
  if (out.empty()) {
    std::cout << emitted.text;
  } else {
    write_file(out, emitted.text);
  }
  meta["samples"] = all.samples.size();
  meta["skipped"] = all.skipped;
  meta.write(meta_path(meta_flag, out.empty() ? fs::path() : sibling(out, ".meta.json")));
  return 0;
}

int cmd_fixations(const RunConfig& cfg, const std::string& file, const std::string& out,
                  const std::string& meta_flag) {
  Meta meta("fixations", cfg);
  const Recording rec = load_checked(file, meta);
  const Scanpath sp = build_scanpath(rec, cfg.detector, cfg.experiment.tolerance_deg);
  const std::string csv = fixations_csv(sp);
  if (out.empty()) {
    std::cout << csv;
  } else {
    write_file(out, csv);
  }
  const auto counts = count_assignments(sp);
  meta["fixations"] = sp.fixations.size();
  meta["assignments"] = {{"hit", counts.hit}, {"tolerance", counts.tolerance},
                         {"none", counts.none}};
  meta.write(meta_path(meta_flag, out.empty() ? fs::path() : sibling(out, ".meta.json")));
  std::cerr << sp.fixations.size() << " fixations: " << counts.hit << " hit, "
            << counts.tolerance << " within tolerance, " << counts.none << " unassigned\n";
  return 0;
}

void print_table(const ResultTable& t) {
  std::printf("%-24s %3s %8s %6s %6s %9s %19s  %s\n", "strategy", "k", "scored", "disc",
              "trans", "accuracy", "95% CI", "status");
  for (const auto& r : t.rows) {
    if (r.accuracy) {
      std::printf("%-24s %3d %8zu %6zu %6zu %9.4f   [%6.4f, %6.4f]  %s\n", r.strategy.c_str(),
                  r.k, r.n_scored, r.n_discarded, r.n_transport, *r.accuracy, *r.ci_low,
                  *r.ci_high, r.status.c_str());
    } else {
      std::printf("%-24s %3d %8zu %6zu %6zu %9s %19s  %s\n", r.strategy.c_str(), r.k,
                  r.n_scored, r.n_discarded, r.n_transport, "-", "-", r.status.c_str());
    }
  }
}

int cmd_experiment(const RunConfig& cfg, const std::string& question,
                   const std::vector<std::string>& files, const std::string& out, int jobs,
                   const std::string& meta_flag) {
  Meta meta("experiment " + question, cfg);
  const Question q = parse_question(question);
  const auto k_values = parse_k_values(cfg.experiment.k_values);
  PromptTemplate tmpl;
  if (!cfg.experiment.prompt_template.empty()) {
    meta.input(cfg.experiment.prompt_template, read_file(cfg.experiment.prompt_template));
    tmpl = load_prompt_template(cfg.experiment.prompt_template);
  }

  std::vector<Agent> agents;
  for (const auto& b : split_list(cfg.experiment.baselines))
    agents.push_back(baseline_agent(parse_baseline(b)));
  std::unique_ptr<VlmClient> client;
  if (cfg.client.kind != "none") {
    client = make_client(cfg.client, tmpl);
    agents.push_back(client_agent(*client));
  }
  if (agents.empty()) throw UsageError("no baselines and no client selected");

  const auto sources = load_sources(cfg, files, jobs, meta);
  const TrialSample sample = q == Question::kE1
                                 ? sample_e1_trials(sources, cfg.experiment.n_trials,
                                                    cfg.experiment.seed)
                                 : sample_e2_trials(sources, cfg.experiment.seed,
                                                    cfg.experiment.n_trials);
  meta["eligible"] = sample.eligible;
  meta["trials"] = sample.trials.size();
  meta["shortfall"] = sample.shortfall;
  meta["template_version"] = tmpl.version;
  if (sample.shortfall > 0)
    std::cerr << "warning: only " << sample.eligible << " eligible trials, "
              << sample.shortfall << " fewer than requested\n";
  if (sample.trials.empty()) {
    meta.write(meta_path(meta_flag, fs::path(out) / "meta.json"));
    throw PreconditionError("no eligible " + question + " trials in the input");
  }

  SweepOptions opt;
  opt.k_values = k_values;
  opt.seed = cfg.experiment.seed;
  opt.jobs = jobs;
  opt.resamples = cfg.experiment.resamples;
  opt.level = cfg.experiment.level;
  opt.template_version = tmpl.version;
  const ResultTable table = run_sweep(sample.trials, sources, agents, opt);
  emit_results(table, out);
  meta.write(meta_path(meta_flag, fs::path(out) / "meta.json"));
  print_table(table);
  return 0;
}

int cmd_report(const RunConfig& cfg, const std::string& file, const std::string& out,
               const std::string& meta_flag) {
  Meta meta("report", cfg);
  const std::string bytes = read_file(file);
  meta.input(file, bytes);
  const auto j = nlohmann::json::parse(bytes, nullptr, false);
  if (j.is_discarded()) throw InputError(file + ": not valid JSON");
  const ResultTable table = results_from_json(j);
  const fs::path dir = out.empty() ? fs::path(file).parent_path() : fs::path(out);
  emit_results(table, dir.empty() ? fs::path(".") : dir);
  meta.write(meta_path(meta_flag, (dir.empty() ? fs::path(".") : dir) / "report.meta.json"));
  print_table(table);
  return 0;
}

int cmd_selftest(const RunConfig& cfg, const std::string& meta_flag) {
  Meta meta("selftest", cfg);
  int failed = 0;
  auto results = ordered_json::array();
  for (const auto& c : run_selftest()) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    failed += !c.passed;
    results.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  meta["checks"] = results;
  meta.write(meta_path(meta_flag, {}));
  std::cout << (failed == 0 ? "all checks passed\n" : std::to_string(failed) + " checks failed\n");
  return failed == 0 ? 0 : 1;
}

// The config file is applied before flags are bound so that flags override it.
std::string prescan_config(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return argv[i + 1];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return {};
}

int run(int argc, char** argv) {
  RunConfig cfg;
  if (const auto path = prescan_config(argc, argv); !path.empty()) load_config_file(path, cfg);

  CLI::App app{"Gaze-context toolkit: visual-size analysis, fixation detection and "
               "VLM context experiments on egocentric recordings."};
  app.set_version_flag("--version", std::string("gazectx ") + GAZECTX_VERSION);
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  std::string config_path, meta_flag;
  int jobs = default_jobs();
  app.add_option("--config", config_path, "key = value config file (flags override it)");
  app.add_option("--meta", meta_flag, "where to write meta.json");
  app.add_option("--jobs", jobs, "worker threads for multi-recording stages")
      ->check(CLI::PositiveNumber);

  auto detector_flags = [&](CLI::App* s) {
    s->add_option("--velocity-threshold", cfg.detector.velocity_threshold_deg_s, "deg/s");
    s->add_option("--min-duration", cfg.detector.min_duration_ms, "ms");
    s->add_option("--max-gap", cfg.detector.max_gap_samples, "samples");
    s->add_option("--tolerance", cfg.experiment.tolerance_deg, "assignment tolerance, deg");
  };

  auto* synth = app.add_subcommand("synth", "generate a synthetic recording and truth sidecar");
  std::string synth_out;
  synth->add_option("--seed", cfg.synth.seed);
  synth->add_option("--objects", cfg.synth.n_objects);
  synth->add_option("--fixations", cfg.synth.n_fixations);
  synth->add_option("--jitter", cfg.synth.gaze_jitter_deg, "gaze jitter sigma, deg");
  synth->add_option("--interaction-fraction", cfg.synth.interaction_fraction);
  synth->add_option("--revisit", cfg.synth.revisit_probability, "chance a target repeats");
  synth->add_option("--sphere-fraction", cfg.synth.sphere_fraction);
  synth->add_option("--sample-rate", cfg.synth.sample_rate_hz, "Hz");
  synth->add_option("-o,--out", synth_out, "output .jsonl")->required();

  auto* validate_cmd = app.add_subcommand("validate", "check recordings against the format");
  std::vector<std::string> validate_files;
  validate_cmd->add_option("files", validate_files)->required()->check(CLI::ExistingFile);

  auto* sizes = app.add_subcommand("sizes", "visual-size distribution per interaction space");
  std::vector<std::string> sizes_files;
  std::string sizes_format = "json", sizes_out;
  sizes->add_option("files", sizes_files)->required()->check(CLI::ExistingFile);
  sizes->add_option("--format", sizes_format, "json or csv");
  sizes->add_option("-o,--out", sizes_out, "output file (default stdout)");
  sizes->add_option("--near-max", cfg.space.near_max_m, "m");
  sizes->add_option("--mid-max", cfg.space.mid_max_m, "m");
  sizes->add_option("--pad", cfg.space.interaction_pad_s, "interaction padding, s");
  sizes->add_flag("--fixated-per-frame", cfg.space.fixated_per_frame);
  detector_flags(sizes);

  auto* fix = app.add_subcommand("fixations", "detect and assign fixations, CSV output");
  std::string fix_file, fix_out;
  fix->add_option("file", fix_file)->required()->check(CLI::ExistingFile);
  fix->add_option("-o,--out", fix_out, "output file (default stdout)");
  detector_flags(fix);

  auto* exp = app.add_subcommand("experiment", "sample trials, sweep k, emit results");
  std::string question, exp_out;
  std::vector<std::string> exp_files;
  exp->add_option("question", question, "e1 or e2")
      ->required()
      ->check(CLI::IsMember({"e1", "e2"}));
  exp->add_option("-i,--input", exp_files, "recordings")->required()->check(CLI::ExistingFile);
  exp->add_option("-o,--out", exp_out, "output directory")->required();
  exp->add_option("--client", cfg.client.kind, "mock:echo-prev|mock:uniform-random|mock:greedy|live|none");
  exp->add_option("--baselines", cfg.experiment.baselines, "comma list, empty for none");
  exp->add_option("--k", cfg.experiment.k_values, "e.g. 0..10 or 1,3,5");
  exp->add_option("--n", cfg.experiment.n_trials, "trials to sample (e2: 0 = all)");
  exp->add_option("--seed", cfg.experiment.seed);
  exp->add_option("--resamples", cfg.experiment.resamples, "bootstrap resamples");
  exp->add_option("--endpoint", cfg.client.endpoint_url);
  exp->add_option("--model", cfg.client.model_name);
  exp->add_option("--api-key-env", cfg.client.api_key_env_var_name,
                  "name of the environment variable holding the API key");
  exp->add_option("--max-in-flight", cfg.client.max_in_flight);
  exp->add_option("--retries", cfg.client.retries);
  exp->add_option("--client-seed", cfg.client.seed);
  exp->add_option("--unparseable-rate", cfg.client.mock_unparseable_rate,
                  "mock clients: share of garbage responses");
  exp->add_option("--prompt-template", cfg.experiment.prompt_template);
  detector_flags(exp);

  auto* report = app.add_subcommand("report", "re-render results.csv and curves.svg");
  std::string report_file, report_out;
  report->add_option("results", report_file, "results.json")->required()->check(CLI::ExistingFile);
  report->add_option("-o,--out", report_out, "output directory (default: next to input)");

  auto* selftest = app.add_subcommand("selftest", "run the built-in reference checks");

  for (auto* s : {synth, validate_cmd, sizes, fix, exp, report, selftest}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (*synth) return cmd_synth(cfg, synth_out, meta_flag);
  if (*validate_cmd) return cmd_validate(cfg, validate_files, meta_flag);
  if (*sizes) return cmd_sizes(cfg, sizes_files, sizes_format, sizes_out, jobs, meta_flag);
  if (*fix) return cmd_fixations(cfg, fix_file, fix_out, meta_flag);
  if (*exp) return cmd_experiment(cfg, question, exp_files, exp_out, jobs, meta_flag);
  if (*report) return cmd_report(cfg, report_file, report_out, meta_flag);
  if (*selftest) return cmd_selftest(cfg, meta_flag);
  std::cerr << app.help();
  return 2;
}

}  // namespace
}  // namespace gazectx

int main(int argc, char** argv) {
  using namespace gazectx;
  try {
    return run(argc, argv);
  } catch (const TransportExhausted& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
