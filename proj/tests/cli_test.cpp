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

// End-to-end checks that drive the built command-line tool.

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string("\"") + GAZECTX_CLI_PATH + "\" " + args + " 2>&1";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(GAZECTX_TEST_TMP) /
           ::testing::UnitTest::GetInstance()->current_test_info()->name();
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

TEST_F(CliTest, SynthIsDeterministic) {
  ASSERT_EQ(run("synth --seed 7 --objects 5 --fixations 40 -o " + path("a.jsonl")).exit_code, 0);
  ASSERT_EQ(run("synth --seed 7 --objects 5 --fixations 40 -o " + path("b.jsonl")).exit_code, 0);
  EXPECT_EQ(slurp(path("a.jsonl")), slurp(path("b.jsonl")));
  EXPECT_EQ(slurp(path("a.truth.json")), slurp(path("b.truth.json")));
  EXPECT_TRUE(fs::exists(path("a.meta.json")));
}

TEST_F(CliTest, ValidateGeneratedFile) {
  ASSERT_EQ(run("synth --seed 7 -o " + path("s.jsonl")).exit_code, 0);
  const auto r = run("validate " + path("s.jsonl"));
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_NE(r.output.find("0 violations"), std::string::npos) << r.output;
}

TEST_F(CliTest, ValidateReportsViolations) {
  ASSERT_EQ(run("synth --seed 7 -o " + path("s.jsonl")).exit_code, 0);
  std::string text = slurp(path("s.jsonl"));
  // Scale the first device quaternion's w component off the unit sphere.
  const auto pos = text.find("\"quat\":[", text.find('\n')) + 8;
  const auto comma = text.find(',', pos);
  text.replace(pos, comma - pos, "1.7");
  std::ofstream(path("bad.jsonl"), std::ios::binary) << text;
  const auto r = run("validate " + path("bad.jsonl"));
  EXPECT_NE(r.exit_code, 0);
  EXPECT_NE(r.output.find("QUAT_NOT_UNIT"), std::string::npos) << r.output;
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(run("frobnicate").exit_code, 2);
  EXPECT_EQ(run("synth").exit_code, 2);  // -o is required
}

TEST_F(CliTest, ExperimentWritesResults) {
  ASSERT_EQ(run("synth --seed 7 --objects 5 --fixations 40 -o " + path("s.jsonl")).exit_code, 0);
  const auto r = run("experiment e1 --client mock:echo-prev --k 0..10 --resamples 200 -i " +
                     path("s.jsonl") + " -o " + path("out"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  for (const char* f : {"results.csv", "results.json", "curves.svg", "meta.json"})
    EXPECT_TRUE(fs::exists(dir_ / "out" / f)) << f;

  const auto meta = nlohmann::json::parse(slurp(dir_ / "out" / "meta.json"));
  EXPECT_EQ(meta["tool"], "gazectx");
  EXPECT_TRUE(meta.contains("version"));
  EXPECT_TRUE(meta["config"].contains("experiment"));
  const std::string dump = meta.dump();
  EXPECT_NE(dump.find("sha256"), std::string::npos) << dump;

  const auto rep = run("report " + (dir_ / "out" / "results.json").string() + " -o " +
                       path("rerender"));
  ASSERT_EQ(rep.exit_code, 0) << rep.output;
  EXPECT_EQ(slurp(dir_ / "rerender" / "results.csv"), slurp(dir_ / "out" / "results.csv"));
  EXPECT_EQ(slurp(dir_ / "rerender" / "curves.svg"), slurp(dir_ / "out" / "curves.svg"));
}

TEST_F(CliTest, LiveClientWithoutKeyIsConfigError) {
  ASSERT_EQ(run("synth --seed 7 -o " + path("s.jsonl")).exit_code, 0);
  const auto r = run("experiment e1 --client live --endpoint http://127.0.0.1:9/v1/chat "
                     "--api-key-env GAZECTX_CLI_TEST_UNSET_KEY --baselines '' -i " +
                     path("s.jsonl") + " -o " + path("out"));
  EXPECT_EQ(r.exit_code, 2) << r.output;
  EXPECT_NE(r.output.find("GAZECTX_CLI_TEST_UNSET_KEY"), std::string::npos) << r.output;
}

TEST_F(CliTest, ConfigFileAndFlagOverride) {
  std::ofstream(path("run.cfg")) << "[synth]\nseed = 3\nn_fixations = 12\n";
  ASSERT_EQ(run("--config " + path("run.cfg") + " synth -o " + path("a.jsonl")).exit_code, 0);
  ASSERT_EQ(run("synth --seed 3 --fixations 12 -o " + path("b.jsonl")).exit_code, 0);
  EXPECT_EQ(slurp(path("a.jsonl")), slurp(path("b.jsonl")));
  ASSERT_EQ(
      run("--config " + path("run.cfg") + " synth --seed 4 -o " + path("c.jsonl")).exit_code, 0);
  EXPECT_NE(slurp(path("a.jsonl")), slurp(path("c.jsonl")));
  std::ofstream(path("bad.cfg")) << "[synth]\nnope = 1\n";
  EXPECT_EQ(run("--config " + path("bad.cfg") + " synth -o " + path("d.jsonl")).exit_code, 2);
}

TEST_F(CliTest, SizesAndFixations) {
  ASSERT_EQ(run("synth --seed 7 --interaction-fraction 0.5 -o " + path("s.jsonl")).exit_code, 0);
  ASSERT_EQ(run("sizes " + path("s.jsonl") + " -o " + path("sizes.json")).exit_code, 0);
  EXPECT_EQ(run("sizes --format xml " + path("s.jsonl")).exit_code, 2);
  const auto j = nlohmann::json::parse(slurp(path("sizes.json")));
  EXPECT_TRUE(j["radius_deg"].contains("near"));
  ASSERT_EQ(run("fixations " + path("s.jsonl") + " -o " + path("fix.csv")).exit_code, 0);
  EXPECT_EQ(slurp(path("fix.csv")).rfind("start_ns,end_ns,duration_ms,object_id,az_deg,el_deg", 0),
            0u);
}

TEST_F(CliTest, Selftest) {
  const auto r = run("selftest");
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_EQ(r.output.find("FAIL"), std::string::npos) << r.output;
}

}  // namespace
