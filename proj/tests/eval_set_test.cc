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

#include <set>

#include "geocorpus/eval_set.h"
#include "geocorpus/numeric.h"
#include "geocorpus/text_util.h"
#include "test_util.h"

namespace geocorpus {
namespace {

McqItem Item(const std::string& id, Dimension dim = Dimension::kOK) {
  McqItem m;
  m.item_id = id;
  m.dimension = dim;
  m.stem = "Question " + id + "?";
  m.options = {"alpha " + id, "beta " + id, "gamma " + id, "delta " + id};
  m.key = "B";
  return m;
}

SubjectiveTask Task(const std::string& id, SubjectiveKind kind) {
  SubjectiveTask t;
  t.item_id = id;
  t.kind = kind;
  t.prompt = "Prompt " + id;
  t.reference_answer = "Reference " + id;
  return t;
}

TEST(ValidateItem, StructuralChecks) {
  EXPECT_TRUE(ValidateItem(Item("a")).ok());
  McqItem dup = Item("a");
  dup.options[2] = " ALPHA  a ";
  EXPECT_EQ(ValidateItem(dup).violations, std::vector<std::string>{"duplicate options A and C"});
  McqItem bad_key = Item("a");
  bad_key.key = "E";
  EXPECT_EQ(ValidateItem(bad_key).violations, std::vector<std::string>{"key invalid: \"E\""});
  McqItem empty = Item("a");
  empty.options[1] = "";
  EXPECT_FALSE(ValidateItem(empty).ok());
  SubjectiveTask t = Task("s", SubjectiveKind::kCodeGeneration);
  EXPECT_TRUE(ValidateItem(t).ok());
  t.reference_answer = " ";
  EXPECT_FALSE(ValidateItem(t).ok());
}

TEST(ValidateEvalSet, DuplicateIdsAcrossTypes) {
  EvalSet set;
  set.mcq = {Item("x")};
  set.subjective = {Task("x", SubjectiveKind::kCodeSummarization)};
  const auto v = ValidateEvalSet(set);
  ASSERT_EQ(v.violations.size(), 1u);
  EXPECT_NE(v.violations[0].find("duplicate id"), std::string::npos);
}

TEST(EvalSetJsonl, RoundTripsAndAcceptsOptionArrays) {
  EvalSet set;
  set.mcq = {Item("a"), Item("b", Dimension::kER)};
  set.subjective = {Task("s", SubjectiveKind::kCodeSummarization)};
  const EvalSet back = EvalSetFromJsonl(EvalSetToJsonl(set));
  EXPECT_EQ(back.mcq, set.mcq);
  EXPECT_EQ(back.subjective, set.subjective);
  const EvalSet arr = EvalSetFromJsonl(
      R"({"type":"mcq","item_id":"q","dimension":"Dataset Knowledge","stem":"s","options":["a","b","c","d"],"key":"D"})");
  ASSERT_EQ(arr.mcq.size(), 1u);
  EXPECT_EQ(arr.mcq[0].options[3], "d");
  EXPECT_EQ(arr.mcq[0].dimension, Dimension::kDK);
  EXPECT_THROW(EvalSetFromJsonl(R"({"type":"essay"})"), std::exception);
}

TEST(Leakage, NormalizedMatchesAreFlagged) {
  EvalSet set;
  set.mcq = {Item("a")};
  set.subjective = {Task("s", SubjectiveKind::kCodeGeneration),
                    Task("t", SubjectiveKind::kCodeSummarization)};
  const auto exact = MakeTriple(GenerationMethod::kSelfInstruct, TaskKind::kCodeGeneration,
                                "i", "", "Prompt s", {});
  const auto spaced = MakeTriple(GenerationMethod::kSelfInstruct, TaskKind::kCodeGeneration,
                                 "i", "  question   A? ", "o", {});
  const auto disjoint = MakeTriple(GenerationMethod::kSelfInstruct, TaskKind::kCodeGeneration,
                                   "i", "unrelated", "other", {});
  EXPECT_EQ(CheckLeakage(set, {exact}), (std::vector<LeakageHit>{{"s", exact.triple_id}}));
  EXPECT_EQ(CheckLeakage(set, {spaced}), (std::vector<LeakageHit>{{"a", spaced.triple_id}}));
  EXPECT_TRUE(CheckLeakage(set, {disjoint}).empty());
}

// Case and whitespace changes on either side must not change the result.
TEST(Leakage, InvariantToCaseAndWhitespaceOnEitherSide) {
  EvalSet set;
  set.subjective = {Task("s", SubjectiveKind::kCodeGeneration)};
  auto triple = MakeTriple(GenerationMethod::kSelfInstruct, TaskKind::kCodeGeneration, "i",
                           "", "Reference s", {});
  const size_t base = CheckLeakage(set, {triple}).size();
  ASSERT_EQ(base, 1u);
  EvalSet shouty = set;
  shouty.subjective[0].reference_answer = "\tREFERENCE\n\n s ";
  EXPECT_EQ(CheckLeakage(shouty, {triple}).size(), base);
  triple.output = "reference   S";
  EXPECT_EQ(CheckLeakage(set, {triple}).size(), base);
}

TEST(Export, ShuffleKeepsCorrectTextAndIsDeterministic) {
  EvalSet set;
  for (int i = 0; i < 40; ++i) set.mcq.push_back(Item("q" + std::to_string(i)));
  ExportOptions options;
  options.seed = 99;
  const ExportedEvalSet a = ExportEvalSet(set, options);
  const ExportedEvalSet b = ExportEvalSet(set, options);
  EXPECT_EQ(a.items_jsonl, b.items_jsonl);
  EXPECT_EQ(a.counts_jsonl, b.counts_jsonl);
  std::set<std::string> keys;
  for (size_t i = 0; i < set.mcq.size(); ++i) {
    const McqItem& before = set.mcq[i];
    const McqItem& after = a.set.mcq[i];
    ASSERT_EQ(after.options[*after.KeyIndex()], before.options[*before.KeyIndex()]);
    std::multiset<std::string> x(before.options.begin(), before.options.end());
    std::multiset<std::string> y(after.options.begin(), after.options.end());
    EXPECT_EQ(x, y);
    keys.insert(after.key);
  }
  EXPECT_EQ(keys.size(), 4u);
  options.seed = 100;
  EXPECT_NE(ExportEvalSet(set, options).items_jsonl, a.items_jsonl);
}

TEST(Export, CountsAndLeakageExclusion) {
  EvalSet set;
  const Dimension dims[] = {Dimension::kOK, Dimension::kDK, Dimension::kPTK,
                            Dimension::kPTR, Dimension::kPLR, Dimension::kER};
  int n = 0;
  for (Dimension d : dims) set.mcq.push_back(Item("m" + std::to_string(n++), d));
  set.subjective = {Task("s1", SubjectiveKind::kCodeSummarization),
                    Task("g1", SubjectiveKind::kCodeGeneration)};
  ExportOptions options;
  const auto counts = ExportEvalSet(set, options).set.Counts();
  ASSERT_EQ(counts.size(), 8u);
  for (const auto& c : counts) EXPECT_EQ(c.count, 1u);
  EXPECT_EQ(counts[0].type, "Multiple Choice");
  EXPECT_EQ(counts[0].dimension, "Operator Knowledge");
  EXPECT_EQ(counts[7].dimension, "Code Generation");

  options.leakage = {{"m0", "t-1"}, {"g1", "t-2"}};
  const auto exported = ExportEvalSet(set, options);
  EXPECT_EQ(exported.set.size(), set.size() - 2);
  EXPECT_EQ(exported.excluded_item_ids, (std::vector<std::string>{"m0", "g1"}));
  options.include_flagged = true;
  EXPECT_EQ(ExportEvalSet(set, options).set.size(), set.size());
}

TEST(Export, InvalidItemRefused) {
  EvalSet set;
  set.mcq = {Item("a")};
  set.mcq[0].key = "Z";
  EXPECT_THROW(ExportEvalSet(set, {}), std::invalid_argument);
}

TEST(Export, WritesFiles) {
  testing::TempDir dir;
  EvalSet set;
  set.mcq = {Item("a")};
  const auto paths = WriteExport(ExportEvalSet(set, {}), dir.path());
  EXPECT_EQ(paths.size(), 2u);
  EXPECT_EQ(ReadEvalSetJsonl(dir.File("eval_set.jsonl")).mcq.size(), 1u);
}

TEST(ParseMcqBlocks, ReadsFencedBlocksAndDropsInvalid) {
  const std::string text =
      "Here you go:\n```\nSTEM: Which band is NIR on Sentinel-2?\nA: B2\nB: B4\nC: B8\nD: B11\n"
      "KEY: c\n```\n```\nSTEM: Broken\nA: x\nB: x\nC: y\nD: z\nKEY: A\n```\n";
  const auto items = ParseMcqBlocks(text, Dimension::kDK);
  ASSERT_EQ(items.size(), 1u);
  EXPECT_EQ(items[0].key, "C");
  EXPECT_EQ(items[0].options[2], "B8");
  EXPECT_EQ(items[0].dimension, Dimension::kDK);
  EXPECT_FALSE(items[0].distractors_reviewed);
  EXPECT_EQ(items[0].item_id.rfind("mcq-", 0), 0u);
}

TEST(DraftMcqItems, UsesServiceAndRecordsSkips) {
  StubGenerationClient client([](const GenerationRequest& r) -> std::string {
    if (r.prompt.find("NDVI text") != std::string::npos) {
      return "```\nSTEM: NDVI uses which bands?\nA: red and NIR\nB: blue and green\n"
             "C: SWIR only\nD: thermal\nKEY: A\n```";
    }
    return "no idea";
  });
  GenerationService service(client, nullptr);
  std::vector<Document> docs = {EncyclopedicDocument{"NDVI", "NDVI text"},
                                EncyclopedicDocument{"Other", "Other text"}};
  const McqDraftResult r = DraftMcqItems(docs, Item("ex"), service);
  ASSERT_EQ(r.items.size(), 1u);
  ASSERT_EQ(r.skips.size(), 1u);
  EXPECT_EQ(r.skips[0].first, "Other");
  McqItem bad = Item("ex");
  bad.key = "";
  EXPECT_THROW(DraftMcqItems(docs, bad, service), std::invalid_argument);
}

}  // namespace
}  // namespace geocorpus
