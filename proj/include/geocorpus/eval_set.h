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

// Benchmark items: four-option multiple choice across six knowledge
// dimensions, plus subjective summarization and generation tasks.

#ifndef GEOCORPUS_EVAL_SET_H_
#define GEOCORPUS_EVAL_SET_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geocorpus/corpus_model.h"
#include "geocorpus/generation.h"

namespace geocorpus {

enum class Dimension { kOK, kDK, kPTK, kPTR, kPLR, kER };

enum class BloomLevel {
  kCognitionAndMemory,
  kComprehensionAndInterpretation,
  kInnovationAndCreation,
};

enum class SubjectiveKind { kCodeSummarization, kCodeGeneration };

// "OK", "DK", ...
std::string_view ToString(Dimension d);
// "Operator Knowledge", "Dataset Knowledge", ...
std::string_view DimensionTitle(Dimension d);
std::string_view ToString(BloomLevel b);
std::string_view ToString(SubjectiveKind k);
std::optional<Dimension> ParseDimension(std::string_view s);
std::optional<BloomLevel> ParseBloomLevel(std::string_view s);
std::optional<SubjectiveKind> ParseSubjectiveKind(std::string_view s);

const std::array<Dimension, 6>& AllDimensions();

inline constexpr std::array<char, 4> kOptionLabels = {'A', 'B', 'C', 'D'};

struct McqItem {
  std::string item_id;
  Dimension dimension = Dimension::kOK;
  std::string stem;
  std::array<std::string, 4> options;
  // One of "A".."D" when valid; kept as text so bad keys survive loading.
  std::string key;
  BloomLevel bloom_level = BloomLevel::kCognitionAndMemory;
  // Set by a human reviewer once distractor plausibility was checked.
  bool distractors_reviewed = false;

  // Index of the key into options, or nullopt for an invalid key.
  std::optional<size_t> KeyIndex() const;
  bool operator==(const McqItem&) const = default;
};

struct SubjectiveTask {
  std::string item_id;
  SubjectiveKind kind = SubjectiveKind::kCodeSummarization;
  std::string prompt;
  std::string reference_answer;
  BloomLevel bloom_level = BloomLevel::kComprehensionAndInterpretation;
  std::string target_platform;

  bool operator==(const SubjectiveTask&) const = default;
};

struct EvalCount {
  std::string type;       // "Multiple Choice" or "Subjective"
  std::string dimension;  // dimension or task title
  uint64_t count = 0;
};

struct EvalSet {
  std::vector<McqItem> mcq;
  std::vector<SubjectiveTask> subjective;

  const McqItem* FindMcq(const std::string& item_id) const;
  const SubjectiveTask* FindSubjective(const std::string& item_id) const;
  // One row per dimension / subjective kind, in Table-4 order, including
  // zero rows.
  std::vector<EvalCount> Counts() const;
  size_t size() const { return mcq.size() + subjective.size(); }
};

ValidationResult ValidateItem(const McqItem& item);
ValidationResult ValidateItem(const SubjectiveTask& task);
// Every item's violations (prefixed by item id) plus duplicate ids.
ValidationResult ValidateEvalSet(const EvalSet& set);

OrderedJson ToJson(const McqItem& item);
OrderedJson ToJson(const SubjectiveTask& task);
// Lines carry "type": "mcq" | "subjective".
EvalSet ReadEvalSetJsonl(const std::string& path);
EvalSet EvalSetFromJsonl(const std::string& text);
std::string EvalSetToJsonl(const EvalSet& set);

struct LeakageHit {
  std::string item_id;
  std::string triple_id;

  bool operator==(const LeakageHit&) const = default;
};

// Flags items whose stem/prompt or reference answer equals, after
// normalization, any triple's input or output. One hit per (item, triple).
std::vector<LeakageHit> CheckLeakage(const EvalSet& set,
                                     const std::vector<InstructionTriple>& sft);

struct ExportOptions {
  uint64_t seed = 0;
  std::vector<LeakageHit> leakage;
  // Keeps flagged items in the export.
  bool include_flagged = false;
};

struct ExportedEvalSet {
  EvalSet set;
  std::vector<std::string> excluded_item_ids;
  std::string items_jsonl;
  std::string counts_jsonl;
};

// Validates, drops flagged items, shuffles each item's options with a seed
// derived from (seed, item_id) and relabels the key. Throws
// std::invalid_argument listing violations when any item is invalid.
ExportedEvalSet ExportEvalSet(const EvalSet& set, const ExportOptions& options);

// Writes <dir>/eval_set.jsonl and <dir>/eval_counts.jsonl.
std::vector<std::string> WriteExport(const ExportedEvalSet& exported,
                                     const std::string& dir);

// Model-assisted MCQ drafting. Responses use a fenced block:
//   STEM: ...
//   A: ...  B: ...  C: ...  D: ...
//   KEY: B
std::vector<McqItem> ParseMcqBlocks(const std::string& text, Dimension dimension);

struct McqDraftResult {
  std::vector<McqItem> items;
  std::vector<std::pair<std::string, std::string>> skips;  // (source id, reason)
};

McqDraftResult DraftMcqItems(const std::vector<Document>& docs,
                             const McqItem& exemplar, GenerationService& service,
                             int max_output_tokens = 1024);

}  // namespace geocorpus

#endif  // GEOCORPUS_EVAL_SET_H_
