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

// Rule slicing: every (subject, attribute) cell of a table or keyed record
// becomes one instruction triple whose input is the subject and whose output
// is the attribute value.

#ifndef GEOCORPUS_SLICING_H_
#define GEOCORPUS_SLICING_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "geocorpus/corpus_model.h"

namespace geocorpus {

struct SliceTemplate {
  TaskKind task_kind = TaskKind::kOperatorKnowledge;
  std::string attribute_name;
  // May contain {attribute} and {subject_kind}.
  std::string instruct_pattern;
};

std::string RenderInstruct(const SliceTemplate& t, std::string_view subject_kind);

class SliceTemplateSet {
 public:
  void Add(SliceTemplate t);
  const SliceTemplate* Find(const std::string& attribute) const;
  bool empty() const { return by_attribute_.empty(); }
  std::vector<std::string> Attributes() const;

  // Built-in phrasings for operator, dataset and code-document attributes.
  static SliceTemplateSet Defaults();
  // Reads <dir>/<TaskKind>/<attribute>.txt. Trailing newlines are dropped.
  static SliceTemplateSet LoadDirectory(const std::string& dir);
  // Writes the set in the LoadDirectory layout.
  void SaveDirectory(const std::string& dir) const;

 private:
  std::map<std::string, SliceTemplate> by_attribute_;
};

// Subjects are rows, attributes are columns.
struct SliceTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::string subject_column;
  // Column rendered as the triple input; empty means subject_column.
  std::string label_column;
  // Columns never sliced (besides the subject column).
  std::set<std::string> excluded_columns;
  // Substituted for {subject_kind}, e.g. "operator".
  std::string subject_kind;
};

// Slices `attributes` (default: every column except the subject and the
// excluded ones). One triple per non-blank cell. Throws std::invalid_argument
// when the subject column is missing or an attribute has no template.
std::vector<InstructionTriple> SliceTableRows(
    const SliceTable& table, const SliceTemplateSet& templates,
    const std::optional<std::vector<std::string>>& attributes = std::nullopt);

// Canonical text for a record value: strings verbatim, scalar lists joined
// with ", ", numbers/booleans as JSON, nested objects as compact JSON.
// Returns an empty string for null, "", [] and {}.
std::string CanonicalValueText(const Json& value);

struct SliceRecordOptions {
  std::string subject_key = "name";
  std::string subject_kind;
  std::set<std::string> excluded_keys;
  // Record key -> template attribute, for keys whose phrasing differs from
  // the same-named attribute of another subject kind.
  std::map<std::string, std::string> template_for_key;
  // Recorded as provenance; defaults to the subject value.
  std::string provenance_id;
};

// One triple per remaining non-empty key. Throws std::invalid_argument when
// the subject key is missing/blank or a key has no template.
std::vector<InstructionTriple> SliceRecord(const Json& record,
                                           const SliceTemplateSet& templates,
                                           const SliceRecordOptions& options);

// Table views over corpus records.
SliceTable OperatorTable(const std::vector<OperatorDocument>& ops);
SliceTable CodeAttributeTable(const std::vector<CodeDocument>& docs);
SliceRecordOptions DatasetRecordOptions(const DatasetDocument& d);

}  // namespace geocorpus

#endif  // GEOCORPUS_SLICING_H_
