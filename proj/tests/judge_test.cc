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

#include "geocorpus/judge.h"
#include "geocorpus/text_util.h"
#include "test_util.h"

namespace geocorpus {
namespace {

EvalSet SmallSet() {
  EvalSet set;
  set.subjective.push_back({"sum-1", SubjectiveKind::kCodeSummarization, "Summarize this code",
                            "Computes NDVI over Landsat 8 for 2020.",
                            BloomLevel::kComprehensionAndInterpretation, "GEE"});
  set.subjective.push_back({"gen-1", SubjectiveKind::kCodeGeneration,
                            "Load Sentinel-2 for 2021 over Wuhan and export NDVI.",
                            "var s2 = ee.ImageCollection('COPERNICUS/S2');",
                            BloomLevel::kInnovationAndCreation, "GEE"});
  return set;
}

TEST(ConvertJudgeScore, DividesByTen) {
  EXPECT_DOUBLE_EQ(ConvertJudgeScore(9), 0.9);
  EXPECT_DOUBLE_EQ(ConvertJudgeScore(10), 1.0);
  EXPECT_DOUBLE_EQ(ConvertJudgeScore(1), 0.1);
  EXPECT_DOUBLE_EQ(ConvertJudgeScore(8.5), 0.85);
  EXPECT_DOUBLE_EQ(ConvertJudgeScore(23.0 / 3.0), 0.767);
  EXPECT_THROW(ConvertJudgeScore(0), std::invalid_argument);
  EXPECT_THROW(ConvertJudgeScore(11), std::invalid_argument);
}

TEST(Templates, ShippedFilesMatchDefaults) {
  EXPECT_EQ(ReadFile(testing::SourcePath("templates/prompts/judge_summarization.txt")),
            DefaultSummaryJudgeTemplate());
  EXPECT_EQ(ReadFile(testing::SourcePath("templates/prompts/judge_generation.txt")),
            DefaultGenerationJudgeTemplate());
}

TEST(Templates, PlaceholdersSubstitutedVerbatim) {
  // Substituted text containing placeholder syntax and specials is not rescanned.
  const std::string summary = "uses {reference_answer} and $1 \\n \"quotes\"";
  const std::string reference = "ref {code_summary}";
  const std::string p =
      RenderSummaryJudgePrompt(DefaultSummaryJudgeTemplate(), summary, reference);
  EXPECT_NE(p.find("\"" + summary + "\""), std::string::npos);
  EXPECT_NE(p.find("\"" + reference + "\""), std::string::npos);
  const std::string tmpl = DefaultSummaryJudgeTemplate();
  const size_t cs = tmpl.find("{code_summary}");
  const size_t ra = tmpl.find("{reference_answer}");
  ASSERT_LT(cs, ra);
  const std::string expected = tmpl.substr(0, cs) + summary + tmpl.substr(cs + 14, ra - cs - 14) +
                               reference + tmpl.substr(ra + 18);
  EXPECT_EQ(p, expected);

  const std::string g = RenderGenerationJudgePrompt("C={generated_code};T={task_requirements}",
                                                    "x{task_requirements}", "t");
  EXPECT_EQ(g, "C=x{task_requirements};T=t");
  EXPECT_THROW(RenderSummaryJudgePrompt("{code_summary} only", "a", "b"),
               std::invalid_argument);
  EXPECT_THROW(RenderGenerationJudgePrompt("{generated_code} only", "a", "b"),
               std::invalid_argument);
}

TEST(ParseSummaryScores, Formats) {
  auto s = ParseSummaryScores("Completeness: 9\nAccuracy: 10\nReadability: 8");
  ASSERT_TRUE(s);
  EXPECT_EQ(*s, (std::array<int, 3>{9, 10, 8}));
  s = ParseSummaryScores(
      "**Completeness**: 8/10\n(Converted: 0.800)\n**Accuracy**: [7]\nreadability : 9.0");
  ASSERT_TRUE(s);
  EXPECT_EQ(*s, (std::array<int, 3>{8, 7, 9}));
  EXPECT_FALSE(ParseSummaryScores("Completeness: 9\nAccuracy: 10"));
  EXPECT_FALSE(ParseSummaryScores("Completeness: 0\nAccuracy: 10\nReadability: 8"));
  EXPECT_FALSE(ParseSummaryScores("Completeness: 11\nAccuracy: 10\nReadability: 8"));
  EXPECT_FALSE(ParseSummaryScores("Completeness: 8.5\nAccuracy: 10\nReadability: 8"));
  EXPECT_FALSE(ParseSummaryScores("I cannot score this."));
}

TEST(ParseEntityVerdicts, Formats) {
  EntityParse p = ParseEntityVerdicts(
      "Data sources: MATCH\n- Time: **MISMATCH**\nSpace: [NOT_APPLICABLE]\n"
      "Input/output data: match\n");
  ASSERT_TRUE(p.verdicts);
  EXPECT_EQ(p.verdicts->matched(), 2u);
  EXPECT_EQ(p.verdicts->examined(), 3u);
  p = ParseEntityVerdicts("Data sources: MATCH\nTime: MATCH\nSpace: MATCH");
  EXPECT_FALSE(p.verdicts);
  EXPECT_NE(p.error.find("Input/output data"), std::string::npos);
  p = ParseEntityVerdicts("Data sources: yes\nTime: MATCH\nSpace: MATCH\nIO: MATCH");
  EXPECT_FALSE(p.verdicts);
}

TEST(JudgeOutputs, SummaryScoresConvertAndAverage) {
  StubGenerationClient stub([](const GenerationRequest&) {
    return std::string("Completeness: 9\nAccuracy: 10\nReadability: 8\n");
  });
  GenerationService service(stub, nullptr);
  JudgeRun run = JudgeOutputs({{"sum-1", "m", "summary text"}}, SmallSet(), service);
  ASSERT_EQ(run.items.size(), 1u);
  const JudgedItem& item = run.items[0];
  ASSERT_TRUE(item.scored);
  ASSERT_EQ(item.scores.size(), 3u);
  EXPECT_DOUBLE_EQ(item.scores[0].converted, 0.9);
  EXPECT_DOUBLE_EQ(item.scores[1].converted, 1.0);
  EXPECT_DOUBLE_EQ(item.scores[2].converted, 0.8);
  EXPECT_DOUBLE_EQ(item.item_score, 0.9);
  EXPECT_EQ(ToJson(item)["item_score"], "0.900");
}

TEST(JudgeOutputs, UnparseableResponseLeavesItemUnscored) {
  StubGenerationClient stub([](const GenerationRequest& r) {
    if (r.prompt.find("Generated Code") != std::string::npos) {
      return std::string("Data sources: MATCH\nTime: MATCH\nSpace: MISMATCH\nInput/output data: NOT_APPLICABLE");
    }
    return std::string("Looks fine to me.");
  });
  GenerationService service(stub, nullptr);
  JudgeRun run = JudgeOutputs({{"sum-1", "m", "s"}, {"gen-1", "m", "code"}}, SmallSet(), service);
  ASSERT_EQ(run.items.size(), 2u);
  EXPECT_FALSE(run.items[0].scored);
  EXPECT_EQ(run.items[0].skip_reason, "unparseable judge response");
  EXPECT_EQ(ToJson(run.items[0])["skip_reason"], "unparseable judge response");
  ASSERT_TRUE(run.items[1].scored);
  EXPECT_DOUBLE_EQ(run.items[1].item_score, 0.667);

  auto agg = AggregateJudgeRun(run);
  ASSERT_EQ(agg.size(), 2u);
  for (const auto& a : agg) {
    if (a.kind == SubjectiveKind::kCodeSummarization) {
      EXPECT_EQ(a.unscored, 1u);
      ASSERT_EQ(a.metrics.size(), 3u);
      for (const auto& [name, v] : a.metrics) EXPECT_DOUBLE_EQ(v, 0.0) << name;
    } else {
      ASSERT_EQ(a.metrics.size(), 1u);
      EXPECT_EQ(a.metrics[0].first, "EntityAccuracy");
      EXPECT_DOUBLE_EQ(a.metrics[0].second, 0.667);
    }
  }
}

TEST(JudgeOutputs, TransportFailureIsRecorded) {
  StubGenerationClient stub([](const GenerationRequest&) -> std::string {
    throw GenerationError("boom", false);
  });
  GenerationService service(stub, nullptr);
  JudgeRun run = JudgeOutputs({{"gen-1", "m", "c"}}, SmallSet(), service);
  EXPECT_FALSE(run.items[0].scored);
  EXPECT_EQ(run.items[0].skip_reason, "judge failed: boom");
}

TEST(JudgeOutputs, AllNotApplicableIsUnscored) {
  StubGenerationClient stub([](const GenerationRequest&) {
    return std::string("Data sources: NOT_APPLICABLE\nTime: N/A\nSpace: NOT_APPLICABLE\nIO: NOT_APPLICABLE");
  });
  GenerationService service(stub, nullptr);
  JudgeRun run = JudgeOutputs({{"gen-1", "m", "c"}}, SmallSet(), service);
  EXPECT_FALSE(run.items[0].scored);
  EXPECT_EQ(run.items[0].skip_reason, "no applicable entity categories");
}

TEST(JudgeOutputs, RepetitionsAverageRawScores) {
  StubGenerationClient stub([](const GenerationRequest& r) {
    return r.variant == 0 ? std::string("Completeness: 8\nAccuracy: 7\nReadability: 9")
                          : std::string("Completeness: 9\nAccuracy: 7\nReadability: 10");
  });
  GenerationService service(stub, nullptr);
  JudgeConfig config;
  config.repetitions = 2;
  JudgeRun run = JudgeOutputs({{"sum-1", "m", "s"}}, SmallSet(), service, config);
  ASSERT_TRUE(run.items[0].scored);
  EXPECT_DOUBLE_EQ(run.items[0].scores[0].raw, 8.5);
  EXPECT_DOUBLE_EQ(run.items[0].scores[0].converted, 0.85);
  EXPECT_DOUBLE_EQ(run.items[0].scores[2].converted, 0.95);
  EXPECT_EQ(stub.calls(), 2);
}

TEST(JudgeOutputs, UnknownItemThrows) {
  StubGenerationClient stub([](const GenerationRequest&) { return std::string(); });
  GenerationService service(stub, nullptr);
  EXPECT_THROW(JudgeOutputs({{"nope", "m", "c"}}, SmallSet(), service), std::invalid_argument);
}

TEST(AggregateJudgeRun, MeansOverItemsPerModel) {
  JudgeRun run;
  for (int i = 0; i < 3; ++i) {
    JudgedItem item;
    item.item_id = "s" + std::to_string(i);
    item.model_id = "m";
    item.kind = SubjectiveKind::kCodeSummarization;
    item.scored = true;
    const double c = 0.7 + 0.1 * i;
    for (JudgeMetric metric : kSummaryMetrics) {
      item.scores.push_back({item.item_id, "m", metric, c * 10, c});
    }
    run.items.push_back(item);
  }
  auto agg = AggregateJudgeRun(run);
  ASSERT_EQ(agg.size(), 1u);
  EXPECT_EQ(agg[0].items, 3u);
  EXPECT_DOUBLE_EQ(agg[0].metrics[0].second, 0.8);
}

TEST(SubjectiveOutputs, ReadsFixture) {
  auto outs = SubjectiveOutputsFromJsonl(ReadFile(testing::SourcePath("fixtures/outputs.jsonl")));
  EXPECT_EQ(outs.size(), 9u);
  EXPECT_THROW(SubjectiveOutputsFromJsonl(R"({"item_id":"x"})"), std::invalid_argument);
}

}  // namespace
}  // namespace geocorpus
