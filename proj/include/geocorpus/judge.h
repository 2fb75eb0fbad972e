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

// Model-as-judge scoring for the subjective tasks.
//
// Summaries are scored 1-10 on completeness, accuracy and readability and
// converted as s/10. Generated code is scored by the share of entity
// categories (data sources, time, space, input/output data) whose verdict
// is MATCH among those the judge found applicable.

#ifndef GEOCORPUS_JUDGE_H_
#define GEOCORPUS_JUDGE_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geocorpus/eval_set.h"
#include "geocorpus/generation.h"

namespace geocorpus {

enum class JudgeMetric { kCompleteness, kAccuracy, kReadability, kEntityAccuracy };

std::string_view ToString(JudgeMetric m);

inline constexpr std::array<JudgeMetric, 3> kSummaryMetrics = {
    JudgeMetric::kCompleteness, JudgeMetric::kAccuracy, JudgeMetric::kReadability};

struct JudgeScore {
  std::string item_id;
  std::string model_id;
  JudgeMetric metric = JudgeMetric::kCompleteness;
  // Mean raw judge score over the parsed repetitions: 1-10 for summary
  // metrics, a fraction for entity accuracy.
  double raw = 0.0;
  double converted = 0.0;
};

// raw / 10, rounded. Throws std::invalid_argument outside [1, 10].
double ConvertJudgeScore(double raw);

// Default judge prompts. The summary template is the published rubric
// with {code_summary} and {reference_answer}; the generation template uses
// {generated_code} and {task_requirements}.
std::string DefaultSummaryJudgeTemplate();
std::string DefaultGenerationJudgeTemplate();

// Fills both placeholders. Throws std::invalid_argument when either is
// absent from the template.
std::string RenderSummaryJudgePrompt(const std::string& tmpl, const std::string& summary,
                                     const std::string& reference);
std::string RenderGenerationJudgePrompt(const std::string& tmpl, const std::string& code,
                                        const std::string& requirements);

// Reads "Completeness: 9", "**Accuracy**: 10/10", "Readability: [8]" and
// similar. Returns nullopt unless all three integer scores in 1-10 are
// present.
std::optional<std::array<int, 3>> ParseSummaryScores(std::string_view response);

enum class EntityCategory { kDataSources, kTime, kSpace, kInputOutput };
enum class EntityVerdict { kMatch, kMismatch, kNotApplicable };

inline constexpr std::array<EntityCategory, 4> kEntityCategories = {
    EntityCategory::kDataSources, EntityCategory::kTime, EntityCategory::kSpace,
    EntityCategory::kInputOutput};

std::string_view ToString(EntityCategory c);

struct EntityVerdicts {
  std::array<EntityVerdict, 4> verdicts{};
  size_t matched() const;
  size_t examined() const;  // excludes not-applicable
};

struct EntityParse {
  std::optional<EntityVerdicts> verdicts;
  std::string error;  // set when verdicts is empty
};

// Reads "Data sources: MATCH" style lines. Every category must appear.
EntityParse ParseEntityVerdicts(std::string_view response);

struct JudgeConfig {
  std::string summary_template = DefaultSummaryJudgeTemplate();
  std::string generation_template = DefaultGenerationJudgeTemplate();
  // Judge calls per item; repetitions differ only in the request variant.
  int repetitions = 1;
  int max_output_tokens = 1024;
};

// One model output for one subjective task.
struct SubjectiveOutput {
  std::string item_id;
  std::string model_id;
  std::string text;
};

std::vector<SubjectiveOutput> SubjectiveOutputsFromJsonl(const std::string& text);

struct JudgedItem {
  std::string item_id;
  std::string model_id;
  SubjectiveKind kind = SubjectiveKind::kCodeSummarization;
  bool scored = false;
  std::vector<JudgeScore> scores;
  // Mean of the converted summary scores; the entity score for generation.
  double item_score = 0.0;
  std::string skip_reason;
};

struct JudgeRun {
  std::vector<JudgedItem> items;  // input order
};

// Judges every output against its task. Unparseable or failed judge
// responses leave the item unscored with a reason; the run still completes.
// Throws std::invalid_argument for an output whose item is not a subjective
// task of the set.
JudgeRun JudgeOutputs(const std::vector<SubjectiveOutput>& outputs, const EvalSet& set,
                      GenerationService& judge, const JudgeConfig& config = {});

// Per-model metric means over every judged item of the matching kind.
// Unscored items contribute 0. Columns are named after the metrics:
// "Completeness", "Accuracy", "Readability" for summaries and
// "EntityAccuracy" for generation.
struct JudgeAggregate {
  std::string model_id;
  SubjectiveKind kind = SubjectiveKind::kCodeSummarization;
  std::vector<std::pair<std::string, double>> metrics;
  size_t items = 0;
  size_t unscored = 0;
};

std::vector<JudgeAggregate> AggregateJudgeRun(const JudgeRun& run);

OrderedJson ToJson(const JudgedItem& item);

}  // namespace geocorpus

#endif  // GEOCORPUS_JUDGE_H_
