// Copyright 2026 The geocorpus Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "geocorpus/corpus_model.h"
#include "geocorpus/hashing.h"
#include "geocorpus/text_util.h"
#include "test_util.h"

namespace geocorpus {
namespace {

using testing::RunCli;
using testing::SourcePath;
using testing::TempDir;

Json LastErrorLine(const std::string& err) {
  const size_t end = err.find('\n');
  return Json::parse(err.substr(0, end));
}

TEST(Cli, NoSubcommandIsUsageError) {
  auto r = RunCli({});
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(LastErrorLine(r.err)["kind"], "usage");
}

TEST(Cli, UnknownOptionIsUsageError) {
  auto r = RunCli({"ingest", "--manifest", "x", "--bogus"});
  EXPECT_EQ(r.exit_code, 2);
  Json e = LastErrorLine(r.err);
  EXPECT_EQ(e["status"], "error");
  EXPECT_EQ(e["kind"], "usage");
  EXPECT_EQ(e["subcommand"], "ingest");
}

TEST(Cli, HelpExitsZero) {
  auto r = RunCli({"--help"});
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("emit-train-config"), std::string::npos);
}

TEST(Cli, MissingManifestIsRuntimeError) {
  TempDir dir("cli");
  auto r = RunCli({"ingest", "--manifest", dir.File("nope.json"), "--out", dir.path()});
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(LastErrorLine(r.err)["kind"], "runtime");
}

TEST(Cli, SamplingWithoutSeedIsUsageError) {
  TempDir dir("cli");
  ASSERT_EQ(RunCli({"ingest", "--manifest", SourcePath("fixtures/corpus/manifest.json"),
                    "--out", dir.File("corpus")})
                .exit_code,
            0);
  auto r = RunCli({"slice", "--corpus", dir.File("corpus"), "--sample-ratio", "0.5", "--out",
                   dir.File("slice")});
  EXPECT_EQ(r.exit_code, 2);
  Json e = LastErrorLine(r.err);
  EXPECT_EQ(e["kind"], "usage");
  EXPECT_NE(e["message"].get<std::string>().find("--seed"), std::string::npos);
}

TEST(Cli, GenerationNeedsStubOrEndpoint) {
  TempDir dir("cli");
  ASSERT_EQ(RunCli({"ingest", "--manifest", SourcePath("fixtures/corpus/manifest.json"),
                    "--out", dir.File("corpus")})
                .exit_code,
            0);
  auto r = RunCli({"self-instruct", "--corpus", dir.File("corpus"), "--out", dir.File("si")});
  EXPECT_EQ(r.exit_code, 2);
}

TEST(Cli, IngestWritesManifestWithHashes) {
  TempDir dir("cli");
  const std::string manifest = SourcePath("fixtures/corpus/manifest.json");
  auto r = RunCli({"ingest", "--manifest", manifest, "--out", dir.path()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  Json m = Json::parse(ReadFile(dir.File("run_manifest.json")));
  EXPECT_EQ(m["subcommand"], "ingest");
  EXPECT_EQ(m["version"], "0.1.0");
  EXPECT_TRUE(m.contains("seed"));
  ASSERT_FALSE(m["inputs"].empty());
  EXPECT_EQ(m["inputs"][0]["sha256"], Sha256Hex(ReadFile(manifest)));
  std::vector<std::string> outputs;
  for (const auto& o : m["outputs"]) {
    outputs.push_back(o["path"]);
    EXPECT_EQ(o["sha256"], Sha256Hex(ReadFile(dir.File(o["path"]))));
  }
  EXPECT_TRUE(std::is_sorted(outputs.begin(), outputs.end()));
  EXPECT_NE(std::find(outputs.begin(), outputs.end(), "rejects.jsonl"), outputs.end());
}

TEST(Cli, RunEvalScoresFixtureAnswers) {
  TempDir dir("cli");
  auto r = RunCli({"run-eval", "--eval", SourcePath("fixtures/eval_items.jsonl"), "--answers",
                   SourcePath("fixtures/answers.jsonl"), "--out", dir.path()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("geocoder-7b: unweighted 1.000, weighted 1.000"), std::string::npos);
  EXPECT_NE(r.out.find("base-7b: unweighted 0.500, weighted 0.500"), std::string::npos);
}

TEST(Cli, ReportWithMissingReferenceIsScoringError) {
  TempDir dir("cli");
  {
    std::ofstream f(dir.File("s.jsonl"));
    f << R"({"model_id":"a","metric":"X","score":0.5})" << "\n";
  }
  auto r = RunCli({"report", "--scores", dir.File("s.jsonl"), "--reference", "zzz", "--out",
                   dir.path()});
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(LastErrorLine(r.err)["kind"], "scoring");
}

TEST(Cli, ExportBeforeReviewCompleteIsReviewError) {
  TempDir dir("cli");
  ASSERT_EQ(RunCli({"review-serve", "--outputs", SourcePath("fixtures/outputs.jsonl"), "--eval",
                    SourcePath("fixtures/eval_items.jsonl"), "--reviewers", "rev-a", "--seed",
                    "3", "--no-serve", "--out", dir.path()})
                .exit_code,
            0);
  auto r = RunCli({"review-serve", "--setup", dir.File("review_setup.json"), "--export",
                   "--out", dir.path()});
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(LastErrorLine(r.err)["kind"], "review");
}

TEST(Cli, EmitTrainConfigIsByteStable) {
  TempDir a("cli");
  TempDir b("cli");
  ASSERT_EQ(RunCli({"emit-train-config", "--out", a.path()}).exit_code, 0);
  ASSERT_EQ(RunCli({"emit-train-config", "--out", b.path()}).exit_code, 0);
  EXPECT_EQ(testing::HashTree(a.path()), testing::HashTree(b.path()));
  EXPECT_TRUE(std::filesystem::exists(a.File("train_pretrain.conf")));
  EXPECT_TRUE(std::filesystem::exists(a.File("train_finetune.conf")));
}

TEST(Cli, StubPipelineSucceeds) {
  TempDir dir("cli-pipeline");
  auto run = testing::RunStubPipeline(dir.path(), 11);
  ASSERT_TRUE(run.ok) << run.failed_step << ": " << run.last.err;
  EXPECT_TRUE(std::filesystem::exists(dir.File("judge/judgements.jsonl")));
  EXPECT_TRUE(std::filesystem::exists(dir.File("review/review_setup.json")));
}

}  // namespace
}  // namespace geocorpus
