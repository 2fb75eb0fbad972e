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

// Benchmark scoring: option matching, multiple-choice accuracy, readability
// from expert ranks, executability pass rates and the comparison report.
//
// Every published number is rounded half away from zero to 3 decimals.

#ifndef GEOCORPUS_SCORING_H_
#define GEOCORPUS_SCORING_H_

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "geocorpus/corpus_model.h"
#include "geocorpus/eval_set.h"

namespace geocorpus {

enum class OptionChoice { kA, kB, kC, kD, kUnanswered };

std::string_view ToString(OptionChoice c);
std::optional<OptionChoice> ParseOptionChoice(std::string_view s);

// Maps a model's free-text answer to a choice. Rules, first match wins:
//   1. a standalone letter A-D, any case, optionally wrapped in () or []
//      and followed by "." or ":", either alone or leading the answer
//      ("(b)", "C.", "d: Map.addLayer");
//   2. "answer is X", "answer: X" and close variants;
//   3. the whole answer equals one option's text after normalization.
// Anything else is kUnanswered.
OptionChoice MatchOption(std::string_view raw,
                         const std::array<std::string, 4>* options = nullptr);

// Prompt sent to a candidate model for one item: stem, labeled options and
// an instruction to reply with the letter.
std::string McqPrompt(const McqItem& item);

struct ModelAnswer {
  std::string item_id;
  std::string model_id;
  std::string raw_text;
  OptionChoice parsed_choice = OptionChoice::kUnanswered;
};

// Lines of {"item_id", "model_id", "raw_text"}; "parsed_choice" is ignored
// on input and recomputed by the caller.
std::vector<ModelAnswer> ReadAnswersJsonl(const std::string& path);
std::vector<ModelAnswer> AnswersFromJsonl(const std::string& text);
OrderedJson ToJson(const ModelAnswer& a);

class ScoringError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DimensionAccuracy {
  Dimension dimension = Dimension::kOK;
  size_t correct = 0;
  size_t total = 0;  // items of this dimension in the eval set
  double accuracy = 0.0;
};

struct McqAccuracy {
  std::string model_id;
  // Only dimensions with at least one item, in canonical order.
  std::vector<DimensionAccuracy> dimensions;
  // Mean of the rounded per-dimension accuracies.
  double unweighted_average = 0.0;
  // Item-weighted: all correct over all items.
  double weighted_average = 0.0;
};

// Fills parsed_choice on each answer against its item's options. Throws
// ScoringError for an answer whose item is not a multiple-choice item.
void ParseAnswers(std::vector<ModelAnswer>& answers, const EvalSet& set);

// One entry per model, ordered by model id. Items a model did not answer,
// and Unanswered choices, count as incorrect. Throws ScoringError for an
// unknown item or a second answer to the same (item, model).
std::vector<McqAccuracy> ComputeMcqAccuracy(const std::vector<ModelAnswer>& answers,
                                            const EvalSet& set);

// (M - n) / M for average rank n among M candidates. Throws
// std::invalid_argument unless M >= 2 and 1 <= n <= M.
double ReadabilityScore(double average_rank, int candidate_count);

struct RankSubmission {
  std::string item_id;
  std::string reviewer_id;
  // Model ids, best first.
  std::vector<std::string> ordering;
};

struct ReadabilityAggregate {
  std::string model_id;
  double average_rank = 0.0;
  int candidate_count = 0;
  size_t submissions = 0;
  double score = 0.0;
};

struct RejectedSubmission {
  size_t index = 0;
  std::string reason;
};

struct ReadabilityResult {
  std::vector<ReadabilityAggregate> models;  // sorted by model id
  std::vector<RejectedSubmission> rejected;
};

// Each accepted submission must be a permutation of `models`. When `models`
// is empty the candidate set is taken from the first submission.
ReadabilityResult ReadabilityFromRanks(const std::vector<RankSubmission>& submissions,
                                       std::vector<std::string> models = {});

enum class Verdict { kPass, kFail, kNotRun };

std::string_view ToString(Verdict v);
std::optional<Verdict> ParseVerdict(std::string_view s);

struct ExecutabilityVerdict {
  std::string item_id;
  std::string model_id;
  std::string reviewer_id;
  Verdict verdict = Verdict::kNotRun;
  std::string note;
};

struct ExecutabilityAggregate {
  std::string model_id;
  size_t passed = 0;
  size_t total = 0;
  double score = 0.0;
};

// Rounded passed / total; 0 when total is 0.
double ExecutabilityFraction(size_t passed, size_t total);

enum class TiePolicy { kFail, kPass };

struct ExecutabilityResult {
  std::vector<ExecutabilityAggregate> models;  // sorted by model id
  std::vector<RejectedSubmission> rejected;
};

// Verdicts from several reviewers on one (item, model) merge by majority
// over pass/fail; not_run is ignored and an all-not_run pair leaves the
// denominator. A repeated (item, model, reviewer) is rejected.
ExecutabilityResult ExecutabilityScore(const std::vector<ExecutabilityVerdict>& verdicts,
                                       TiePolicy ties = TiePolicy::kFail);

// Metric values per model. Column order is the order columns were first
// added; row order likewise.
class ScoreTable {
 public:
  void Set(const std::string& model_id, const std::string& column, double value);
  std::optional<double> Get(const std::string& model_id, const std::string& column) const;
  const std::vector<std::string>& models() const { return models_; }
  const std::vector<std::string>& columns() const { return columns_; }

  // Lines of {"model_id", "metric", "score"}.
  static ScoreTable FromJsonl(const std::string& text);
  static ScoreTable ReadJsonl(const std::string& path);
  std::string ToJsonl() const;

 private:
  std::vector<std::string> models_;
  std::vector<std::string> columns_;
  std::map<std::string, std::map<std::string, double>> values_;
};

struct ReportRow {
  std::string model_id;
  std::vector<double> values;
  // reference - model, rounded; empty for the reference row.
  std::vector<double> deltas;
  double overall = 0.0;
  std::optional<double> overall_delta;
};

struct ScoreReport {
  std::string reference_model_id;
  std::vector<std::string> columns;
  // Non-reference models in table order, then the reference row last.
  std::vector<ReportRow> rows;

  const ReportRow* Find(const std::string& model_id) const;
  // Aligned columns: Model, then each metric followed by its delta, then
  // Overall and its delta.
  std::string ToText() const;
  OrderedJson ToJson() const;
};

// Throws ScoringError naming (model, metric) for any missing cell, or when
// the reference model is absent.
ScoreReport BuildReport(const ScoreTable& table, const std::string& reference_model_id);

}  // namespace geocorpus

#endif  // GEOCORPUS_SCORING_H_
