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

#include "geocorpus/slicing.h"

#include <algorithm>
#include <filesystem>
#include <stdexcept>

#include "geocorpus/text_util.h"

namespace geocorpus {
namespace {

namespace fs = std::filesystem;

struct DefaultTemplate {
  TaskKind kind;
  const char* attribute;
  const char* pattern;
};

constexpr DefaultTemplate kDefaults[] = {
    // Operator attributes.
    {TaskKind::kOperatorKnowledge, "full_name",
     "What is the full name of the following {subject_kind}?"},
    {TaskKind::kOperatorKnowledge, "short_name",
     "What is the short name (abbreviation) of the following {subject_kind}?"},
    {TaskKind::kOperatorKnowledge, "library_name",
     "Which library provides the following {subject_kind}?"},
    {TaskKind::kOperatorKnowledge, "language",
     "In which programming language is the following {subject_kind} used?"},
    {TaskKind::kOperatorKnowledge, "platform",
     "On which platform is the following {subject_kind} available?"},
    {TaskKind::kOperatorKnowledge, "description",
     "Describe what the following {subject_kind} does."},
    {TaskKind::kOperatorKnowledge, "usage",
     "Show the usage of the following {subject_kind}."},
    {TaskKind::kOperatorKnowledge, "parameters",
     "List the parameters of the following {subject_kind}."},
    {TaskKind::kOperatorKnowledge, "output_type",
     "What is the output type of the following {subject_kind}?"},
    // Dataset attributes.
    {TaskKind::kDatasetKnowledge, "provide",
     "Who provides the following {subject_kind}?"},
    {TaskKind::kDatasetKnowledge, "snippet",
     "How is the following {subject_kind} accessed in code?"},
    {TaskKind::kDatasetKnowledge, "tags",
     "Which tags describe the following {subject_kind}?"},
    {TaskKind::kDatasetKnowledge, "doi",
     "What is the DOI of the following {subject_kind}?"},
    {TaskKind::kDatasetKnowledge, "website",
     "Where can the documentation of the following {subject_kind} be found?"},
    // Code-document attributes.
    {TaskKind::kPlatformToolkitRecognition, "code_platform",
     "Identify the platform or toolkit used by the following {subject_kind}."},
    {TaskKind::kProgrammingLanguageRecognition, "code_language",
     "Identify the programming language of the following {subject_kind}."},
};

// Dataset "description" shares its column name with operators; datasets use a
// prefixed attribute so both phrasings can live in one set.
constexpr DefaultTemplate kDatasetDescription = {
    TaskKind::kDatasetKnowledge, "dataset_description",
    "Describe the following {subject_kind}."};

}  // namespace

std::string RenderInstruct(const SliceTemplate& t, std::string_view subject_kind) {
  std::string out = ReplaceAll(t.instruct_pattern, "{attribute}",
                               HumanizeName(t.attribute_name));
  return ReplaceAll(std::move(out), "{subject_kind}",
                    subject_kind.empty() ? "item" : subject_kind);
}

void SliceTemplateSet::Add(SliceTemplate t) {
  std::string key = t.attribute_name;
  by_attribute_[key] = std::move(t);
}

const SliceTemplate* SliceTemplateSet::Find(const std::string& attribute) const {
  auto it = by_attribute_.find(attribute);
  return it == by_attribute_.end() ? nullptr : &it->second;
}

std::vector<std::string> SliceTemplateSet::Attributes() const {
  std::vector<std::string> out;
  for (const auto& [name, t] : by_attribute_) out.push_back(name);
  return out;
}

SliceTemplateSet SliceTemplateSet::Defaults() {
  SliceTemplateSet set;
  for (const auto& d : kDefaults) set.Add({d.kind, d.attribute, d.pattern});
  set.Add({kDatasetDescription.kind, kDatasetDescription.attribute,
           kDatasetDescription.pattern});
  return set;
}

SliceTemplateSet SliceTemplateSet::LoadDirectory(const std::string& dir) {
  if (!fs::is_directory(dir)) {
    throw std::runtime_error("template directory not found: " + dir);
  }
  SliceTemplateSet set;
  std::vector<fs::path> files;
  for (const auto& kind_dir : fs::directory_iterator(dir)) {
    if (!kind_dir.is_directory()) continue;
    for (const auto& f : fs::directory_iterator(kind_dir.path())) {
      if (f.is_regular_file() && f.path().extension() == ".txt") files.push_back(f.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const fs::path& f : files) {
    const std::string kind_name = f.parent_path().filename().string();
    auto kind = ParseTaskKind(kind_name);
    if (!kind) throw std::runtime_error("unknown task kind directory: " + kind_name);
    std::string pattern = ReadFile(f.string());
    while (!pattern.empty() && (pattern.back() == '\n' || pattern.back() == '\r')) {
      pattern.pop_back();
    }
    if (Trim(pattern).empty()) {
      throw std::runtime_error("empty template: " + f.string());
    }
    set.Add({*kind, f.stem().string(), pattern});
  }
  return set;
}

void SliceTemplateSet::SaveDirectory(const std::string& dir) const {
  for (const auto& [name, t] : by_attribute_) {
    fs::path p = fs::path(dir) / std::string(ToString(t.task_kind)) / (name + ".txt");
    WriteFile(p.string(), t.instruct_pattern + "\n");
  }
}

std::vector<InstructionTriple> SliceTableRows(
    const SliceTable& table, const SliceTemplateSet& templates,
    const std::optional<std::vector<std::string>>& attributes) {
  auto column_index = [&](const std::string& name) -> std::optional<size_t> {
    auto it = std::find(table.columns.begin(), table.columns.end(), name);
    if (it == table.columns.end()) return std::nullopt;
    return static_cast<size_t>(it - table.columns.begin());
  };
  auto subject = column_index(table.subject_column);
  if (!subject) {
    throw std::invalid_argument("subject column missing: " + table.subject_column);
  }
  size_t label = *subject;
  if (!table.label_column.empty()) {
    auto l = column_index(table.label_column);
    if (!l) throw std::invalid_argument("label column missing: " + table.label_column);
    label = *l;
  }

  std::vector<std::string> sliced;
  if (attributes) {
    sliced = *attributes;
  } else {
    for (const std::string& c : table.columns) {
      if (c != table.subject_column && !table.excluded_columns.count(c)) {
        sliced.push_back(c);
      }
    }
  }
  std::vector<std::pair<size_t, const SliceTemplate*>> plan;
  for (const std::string& attr : sliced) {
    const SliceTemplate* t = templates.Find(attr);
    if (!t) throw std::invalid_argument("no slice template for attribute: " + attr);
    auto idx = column_index(attr);
    if (!idx) throw std::invalid_argument("attribute column missing: " + attr);
    plan.emplace_back(*idx, t);
  }

  std::vector<InstructionTriple> out;
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) {
      throw std::invalid_argument("row width does not match header");
    }
    for (const auto& [col, tmpl] : plan) {
      if (Trim(row[col]).empty()) continue;
      out.push_back(MakeTriple(GenerationMethod::kRuleSlice, tmpl->task_kind,
                               RenderInstruct(*tmpl, table.subject_kind), row[label],
                               row[col], {row[*subject]}));
    }
  }
  return out;
}

std::string CanonicalValueText(const Json& value) {
  if (value.is_null()) return "";
  if (value.is_string()) return value.get<std::string>();
  if (value.is_array()) {
    const bool scalars = std::all_of(value.begin(), value.end(), [](const Json& v) {
      return v.is_primitive();
    });
    if (!scalars) return value.dump();
    std::vector<std::string> parts;
    for (const Json& v : value) {
      std::string s = CanonicalValueText(v);
      if (!Trim(s).empty()) parts.push_back(std::move(s));
    }
    return Join(parts, ", ");
  }
  if (value.is_object()) return value.empty() ? "" : value.dump();
  return value.dump();
}

std::vector<InstructionTriple> SliceRecord(const Json& record,
                                           const SliceTemplateSet& templates,
                                           const SliceRecordOptions& options) {
  if (!record.is_object()) throw std::invalid_argument("record is not an object");
  auto subject_it = record.find(options.subject_key);
  if (subject_it == record.end() || Trim(CanonicalValueText(*subject_it)).empty()) {
    throw std::invalid_argument("subject key missing: " + options.subject_key);
  }
  const std::string subject = CanonicalValueText(*subject_it);
  const std::string provenance =
      options.provenance_id.empty() ? subject : options.provenance_id;

  std::vector<InstructionTriple> out;
  for (const auto& [key, value] : record.items()) {
    if (key == options.subject_key || options.excluded_keys.count(key)) continue;
    std::string text = CanonicalValueText(value);
    if (Trim(text).empty()) continue;
    auto alias = options.template_for_key.find(key);
    const std::string& attr =
        alias == options.template_for_key.end() ? key : alias->second;
    const SliceTemplate* t = templates.Find(attr);
    if (!t) throw std::invalid_argument("no slice template for attribute: " + attr);
    out.push_back(MakeTriple(GenerationMethod::kRuleSlice, t->task_kind,
                             RenderInstruct(*t, options.subject_kind), subject,
                             std::move(text), {provenance}));
  }
  return out;
}

SliceTable OperatorTable(const std::vector<OperatorDocument>& ops) {
  SliceTable t;
  t.columns = {"operator_id", "full_name", "short_name",  "library_name",
               "language",    "platform",  "description", "usage",
               "parameters",  "output_type"};
  t.subject_column = "operator_id";
  t.label_column = "full_name";
  t.subject_kind = "operator";
  for (const auto& o : ops) {
    t.rows.push_back({o.operator_id, o.full_name, o.short_name, o.library_name,
                      std::string(ToString(o.language)), o.platform, o.description,
                      o.usage, o.parameters, o.output_type});
  }
  return t;
}

SliceTable CodeAttributeTable(const std::vector<CodeDocument>& docs) {
  SliceTable t;
  t.columns = {"code_id", "content", "code_platform", "code_language"};
  t.subject_column = "code_id";
  t.label_column = "content";
  t.excluded_columns = {"content"};
  t.subject_kind = "code";
  for (const auto& d : docs) {
    t.rows.push_back({d.code_id, d.content, d.platform, std::string(ToString(d.language))});
  }
  return t;
}

SliceRecordOptions DatasetRecordOptions(const DatasetDocument& d) {
  SliceRecordOptions o;
  o.subject_key = "name";
  o.subject_kind = "dataset";
  o.excluded_keys = {"dataset_id"};
  o.template_for_key = {{"description", "dataset_description"}};
  o.provenance_id = d.dataset_id;
  return o;
}

}  // namespace geocorpus
