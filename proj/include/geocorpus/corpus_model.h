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

// Normalized corpus records shared by every pipeline stage.
//
// Four document kinds make up the pretraining corpus (code, operator, dataset
// and encyclopedic documents). Fine-tuning data is a flat list of
// InstructionTriple records. All records are plain values; their canonical
// on-disk form is one JSON object per line with lower_snake_case field names.

#ifndef GEOCORPUS_CORPUS_MODEL_H_
#define GEOCORPUS_CORPUS_MODEL_H_

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace geocorpus {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

enum class Language { kJavaScript, kPython, kR, kMatlab, kNaturalLanguage };

enum class GenerationMethod { kRuleSlice, kRuleMask, kSelfInstruct, kOpenSource };

enum class TaskKind {
  kOperatorKnowledge,
  kDatasetKnowledge,
  kPlatformToolkitKnowledge,
  kPlatformToolkitRecognition,
  kProgrammingLanguageRecognition,
  kCodeCompletion,
  kEntityRecognition,
  kCodeSummarization,
  kCodeGeneration,
  kGeneralLanguage,
};

enum class DocumentKind { kCode, kOperator, kDataset, kEncyclopedic };

std::string_view ToString(Language v);
std::string_view ToString(GenerationMethod v);
std::string_view ToString(TaskKind v);
std::string_view ToString(DocumentKind v);

// Parsers accept the canonical names above plus common aliases ("JS",
// "Natural Lang.", "rule_slice", ...). Return nullopt on unknown input.
std::optional<Language> ParseLanguage(std::string_view s);
std::optional<GenerationMethod> ParseGenerationMethod(std::string_view s);
std::optional<TaskKind> ParseTaskKind(std::string_view s);
std::optional<DocumentKind> ParseDocumentKind(std::string_view s);

const std::vector<TaskKind>& AllTaskKinds();
const std::vector<Language>& AllLanguages();

struct CodeDocument {
  std::string code_id;
  Language language = Language::kJavaScript;
  std::string platform;
  std::string library;
  std::string title;
  std::string description;
  std::string content;

  bool operator==(const CodeDocument&) const = default;
};

struct OperatorDocument {
  std::string operator_id;
  std::string full_name;
  std::string short_name;
  std::string library_name;
  Language language = Language::kJavaScript;
  std::string platform;
  std::string description;
  std::string usage;
  std::string parameters;
  std::string output_type;

  bool operator==(const OperatorDocument&) const = default;
};

struct DatasetDocument {
  std::string dataset_id;
  std::string name;
  std::string provide;
  // Opaque access string (e.g. an asset path); kept verbatim.
  std::string snippet;
  std::vector<std::string> tags;
  std::string description;
  std::string doi;
  std::string website;

  bool operator==(const DatasetDocument&) const = default;
};

struct EncyclopedicDocument {
  std::string name;
  std::string text;

  bool operator==(const EncyclopedicDocument&) const = default;
};

using Document = std::variant<CodeDocument, OperatorDocument, DatasetDocument,
                              EncyclopedicDocument>;

DocumentKind KindOf(const Document& doc);
// The record's unique key within its kind (code_id, operator_id, dataset_id,
// or name for encyclopedic documents).
const std::string& DocumentId(const Document& doc);

struct InstructionTriple {
  std::string triple_id;
  std::string instruct;
  std::string input;
  std::string output;
  GenerationMethod method = GenerationMethod::kRuleSlice;
  TaskKind task_kind = TaskKind::kOperatorKnowledge;
  std::vector<std::string> provenance;

  bool operator==(const InstructionTriple&) const = default;
};

// Stable id over (method, task_kind, instruct, input, output).
std::string ComputeTripleId(const InstructionTriple& t);
// Builds a triple and assigns its content id.
InstructionTriple MakeTriple(GenerationMethod method, TaskKind kind,
                             std::string instruct, std::string input,
                             std::string output,
                             std::vector<std::string> provenance);

// Which task kinds each generation method may produce.
bool IsAllowedCombination(GenerationMethod method, TaskKind kind);

// ---------------------------------------------------------------------------
// Validation. Violations are data, never exceptions.

struct ValidationResult {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Free-string allow-list for platform and library fields. An empty list
// disables the corresponding check.
struct AllowList {
  std::set<std::string> platforms;
  std::set<std::string> libraries;

  // Platform/library names from the pretraining data inventory.
  static AllowList Default();
};

ValidationResult ValidateDocument(const Document& doc,
                                  const AllowList* allow = nullptr);
ValidationResult ValidateTriple(const InstructionTriple& t);

// Per-record results for a batch; adds "duplicate id" for every record whose
// id was already seen earlier in the batch.
std::vector<ValidationResult> ValidateBatch(const std::vector<Document>& docs,
                                            const AllowList* allow = nullptr);

// ---------------------------------------------------------------------------
// Canonical JSON form.

OrderedJson ToJson(const Document& doc);
OrderedJson ToJson(const InstructionTriple& t);

// Throws std::invalid_argument with a message suitable for a reject log
// (e.g. "language invalid: Fortran", "missing field: content").
Document DocumentFromJson(DocumentKind kind, const Json& j);
InstructionTriple TripleFromJson(const Json& j);

// If the document's id field is empty, sets it to a content hash of the
// remaining fields. Encyclopedic documents are keyed by name and untouched.
void AssignMissingId(Document& doc);

std::string ToJsonLine(const Document& doc);
std::string ToJsonLine(const InstructionTriple& t);

std::vector<InstructionTriple> ReadTriplesJsonl(const std::string& path);
void WriteTriplesJsonl(const std::string& path,
                       const std::vector<InstructionTriple>& triples);
std::string TriplesToJsonl(const std::vector<InstructionTriple>& triples);

}  // namespace geocorpus

#endif  // GEOCORPUS_CORPUS_MODEL_H_
