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

#include "geocorpus/corpus_model.h"

#include <fstream>
#include <stdexcept>
#include <unordered_set>
#include <utility>

#include "geocorpus/hashing.h"
#include "geocorpus/text_util.h"

namespace geocorpus {
namespace {

struct LanguageName {
  Language value;
  std::string_view name;
};

constexpr LanguageName kLanguages[] = {
    {Language::kJavaScript, "JavaScript"},
    {Language::kPython, "Python"},
    {Language::kR, "R"},
    {Language::kMatlab, "Matlab"},
    {Language::kNaturalLanguage, "NaturalLanguage"},
};

struct TaskKindName {
  TaskKind value;
  std::string_view name;
};

constexpr TaskKindName kTaskKinds[] = {
    {TaskKind::kOperatorKnowledge, "OperatorKnowledge"},
    {TaskKind::kDatasetKnowledge, "DatasetKnowledge"},
    {TaskKind::kPlatformToolkitKnowledge, "PlatformToolkitKnowledge"},
    {TaskKind::kPlatformToolkitRecognition, "PlatformToolkitRecognition"},
    {TaskKind::kProgrammingLanguageRecognition, "ProgrammingLanguageRecognition"},
    {TaskKind::kCodeCompletion, "CodeCompletion"},
    {TaskKind::kEntityRecognition, "EntityRecognition"},
    {TaskKind::kCodeSummarization, "CodeSummarization"},
    {TaskKind::kCodeGeneration, "CodeGeneration"},
    {TaskKind::kGeneralLanguage, "GeneralLanguage"},
};

// Lowercase with separators removed, so "rule_slice", "RuleSlice" and
// "Rule Slice" compare equal.
std::string Squash(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '_' || c == '-' || c == ' ' || c == '.') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

std::string GetString(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return "";
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number() || it->is_boolean()) return it->dump();
  throw std::invalid_argument(std::string("field not a string: ") + key);
}

Language GetLanguage(const Json& j, const char* key) {
  std::string raw = GetString(j, key);
  auto lang = ParseLanguage(raw);
  if (!lang) throw std::invalid_argument("language invalid: " + raw);
  return *lang;
}

std::vector<std::string> GetTags(const Json& j) {
  std::vector<std::string> tags;
  auto it = j.find("tags");
  if (it == j.end() || it->is_null()) return tags;
  if (it->is_array()) {
    for (const auto& t : *it) {
      if (!t.is_string()) throw std::invalid_argument("field not a string: tags");
      tags.push_back(t.get<std::string>());
    }
    return tags;
  }
  if (!it->is_string()) throw std::invalid_argument("field not a string: tags");
  // Tabular sources carry tags as one delimited cell.
  std::string cell = it->get<std::string>();
  std::string current;
  auto flush = [&] {
    std::string_view t = Trim(current);
    if (!t.empty()) tags.emplace_back(t);
    current.clear();
  };
  for (char c : cell) {
    if (c == ',' || c == ';' || c == '|') {
      flush();
    } else {
      current.push_back(c);
    }
  }
  flush();
  return tags;
}

bool Blank(std::string_view s) { return Trim(s).empty(); }

}  // namespace

std::string_view ToString(Language v) {
  for (const auto& l : kLanguages) {
    if (l.value == v) return l.name;
  }
  return "?";
}

std::string_view ToString(GenerationMethod v) {
  switch (v) {
    case GenerationMethod::kRuleSlice: return "RuleSlice";
    case GenerationMethod::kRuleMask: return "RuleMask";
    case GenerationMethod::kSelfInstruct: return "SelfInstruct";
    case GenerationMethod::kOpenSource: return "OpenSource";
  }
  return "?";
}

std::string_view ToString(TaskKind v) {
  for (const auto& k : kTaskKinds) {
    if (k.value == v) return k.name;
  }
  return "?";
}

std::string_view ToString(DocumentKind v) {
  switch (v) {
    case DocumentKind::kCode: return "code";
    case DocumentKind::kOperator: return "operator";
    case DocumentKind::kDataset: return "dataset";
    case DocumentKind::kEncyclopedic: return "encyclopedic";
  }
  return "?";
}

std::optional<Language> ParseLanguage(std::string_view s) {
  const std::string k = Squash(s);
  for (const auto& l : kLanguages) {
    if (Squash(l.name) == k) return l.value;
  }
  if (k == "js") return Language::kJavaScript;
  if (k == "py") return Language::kPython;
  if (k == "naturallang" || k == "natural" || k == "text") {
    return Language::kNaturalLanguage;
  }
  return std::nullopt;
}

std::optional<GenerationMethod> ParseGenerationMethod(std::string_view s) {
  const std::string k = Squash(s);
  for (auto m : {GenerationMethod::kRuleSlice, GenerationMethod::kRuleMask,
                 GenerationMethod::kSelfInstruct, GenerationMethod::kOpenSource}) {
    if (Squash(ToString(m)) == k) return m;
  }
  return std::nullopt;
}

std::optional<TaskKind> ParseTaskKind(std::string_view s) {
  const std::string k = Squash(s);
  for (const auto& t : kTaskKinds) {
    if (Squash(t.name) == k) return t.value;
  }
  return std::nullopt;
}

std::optional<DocumentKind> ParseDocumentKind(std::string_view s) {
  const std::string k = Squash(s);
  if (k == "code" || k == "codedocument" || k == "codedocuments") return DocumentKind::kCode;
  if (k == "operator" || k == "operatordocument" || k == "operatordocuments") {
    return DocumentKind::kOperator;
  }
  if (k == "dataset" || k == "datasetdocument" || k == "datasetdocuments") {
    return DocumentKind::kDataset;
  }
  if (k == "encyclopedic" || k == "encyclopedicdocument" ||
      k == "encyclopedicdocuments") {
    return DocumentKind::kEncyclopedic;
  }
  return std::nullopt;
}

const std::vector<TaskKind>& AllTaskKinds() {
  static const std::vector<TaskKind> kAll = [] {
    std::vector<TaskKind> v;
    for (const auto& t : kTaskKinds) v.push_back(t.value);
    return v;
  }();
  return kAll;
}

const std::vector<Language>& AllLanguages() {
  static const std::vector<Language> kAll = [] {
    std::vector<Language> v;
    for (const auto& l : kLanguages) v.push_back(l.value);
    return v;
  }();
  return kAll;
}

DocumentKind KindOf(const Document& doc) {
  return static_cast<DocumentKind>(doc.index());
}

const std::string& DocumentId(const Document& doc) {
  return std::visit(
      [](const auto& d) -> const std::string& {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, CodeDocument>) return d.code_id;
        if constexpr (std::is_same_v<T, OperatorDocument>) return d.operator_id;
        if constexpr (std::is_same_v<T, DatasetDocument>) return d.dataset_id;
        if constexpr (std::is_same_v<T, EncyclopedicDocument>) return d.name;
      },
      doc);
}

std::string ComputeTripleId(const InstructionTriple& t) {
  OrderedJson j = {{"method", ToString(t.method)},
                   {"task_kind", ToString(t.task_kind)},
                   {"instruct", t.instruct},
                   {"input", t.input},
                   {"output", t.output}};
  return ContentId("t", j.dump());
}

InstructionTriple MakeTriple(GenerationMethod method, TaskKind kind,
                             std::string instruct, std::string input,
                             std::string output,
                             std::vector<std::string> provenance) {
  InstructionTriple t;
  t.instruct = std::move(instruct);
  t.input = std::move(input);
  t.output = std::move(output);
  t.method = method;
  t.task_kind = kind;
  t.provenance = std::move(provenance);
  t.triple_id = ComputeTripleId(t);
  return t;
}

bool IsAllowedCombination(GenerationMethod method, TaskKind kind) {
  switch (method) {
    case GenerationMethod::kRuleMask:
      return kind == TaskKind::kCodeCompletion;
    case GenerationMethod::kOpenSource:
      return kind == TaskKind::kGeneralLanguage;
    case GenerationMethod::kRuleSlice:
      return kind == TaskKind::kOperatorKnowledge ||
             kind == TaskKind::kDatasetKnowledge ||
             kind == TaskKind::kPlatformToolkitKnowledge ||
             kind == TaskKind::kPlatformToolkitRecognition ||
             kind == TaskKind::kProgrammingLanguageRecognition ||
             kind == TaskKind::kEntityRecognition;
    case GenerationMethod::kSelfInstruct:
      return kind != TaskKind::kCodeCompletion &&
             kind != TaskKind::kGeneralLanguage;
  }
  return false;
}

AllowList AllowList::Default() {
  AllowList a;
  a.platforms = {"Google Earth Engine", "GEE", "PIE Engine", "ArcGIS", "ArcPy",
                 "Matlab", "Mapping Toolbox", "Python", "R", "RStudio", "GDAL",
                 "rasterio", "cartopy", "GeoPandas", "sf", "terra", "gstat",
                 "Wikipedia", "Built-in Platform Docs"};
  a.libraries = {"ArcPy", "Mapping Toolbox", "GDAL", "rasterio", "cartopy",
                 "GeoPandas", "sf", "terra", "gstat", "ee", "earthengine-api",
                 "geemap"};
  return a;
}

ValidationResult ValidateDocument(const Document& doc, const AllowList* allow) {
  ValidationResult r;
  auto check_platform = [&](const std::string& platform) {
    if (allow && !allow->platforms.empty() && !platform.empty() &&
        !allow->platforms.count(platform)) {
      r.violations.push_back("platform not allowed: " + platform);
    }
  };
  auto check_library = [&](const std::string& library) {
    if (allow && !allow->libraries.empty() && !library.empty() &&
        !allow->libraries.count(library)) {
      r.violations.push_back("library not allowed: " + library);
    }
  };
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, CodeDocument>) {
          if (Blank(d.code_id)) r.violations.push_back("code_id empty");
          if (Blank(d.content)) r.violations.push_back("content empty");
          check_platform(d.platform);
          check_library(d.library);
        } else if constexpr (std::is_same_v<T, OperatorDocument>) {
          if (Blank(d.operator_id)) r.violations.push_back("operator_id empty");
          if (Blank(d.full_name)) r.violations.push_back("full_name empty");
          check_platform(d.platform);
          check_library(d.library_name);
        } else if constexpr (std::is_same_v<T, DatasetDocument>) {
          if (Blank(d.dataset_id)) r.violations.push_back("dataset_id empty");
          if (Blank(d.name)) r.violations.push_back("name empty");
        } else {
          if (Blank(d.name)) r.violations.push_back("name empty");
          if (Blank(d.text)) r.violations.push_back("text empty");
        }
      },
      doc);
  return r;
}

ValidationResult ValidateTriple(const InstructionTriple& t) {
  ValidationResult r;
  if (Blank(t.triple_id)) r.violations.push_back("triple_id empty");
  if (Blank(t.instruct)) r.violations.push_back("instruct empty");
  if (Blank(t.output)) r.violations.push_back("output empty");
  if (!IsAllowedCombination(t.method, t.task_kind)) {
    r.violations.push_back("task_kind " + std::string(ToString(t.task_kind)) +
                           " not producible by " + std::string(ToString(t.method)));
  }
  return r;
}

std::vector<ValidationResult> ValidateBatch(const std::vector<Document>& docs,
                                            const AllowList* allow) {
  std::vector<ValidationResult> out;
  out.reserve(docs.size());
  std::set<std::pair<int, std::string>> seen;
  for (const Document& doc : docs) {
    ValidationResult r = ValidateDocument(doc, allow);
    const std::string& id = DocumentId(doc);
    if (!id.empty() && !seen.emplace(static_cast<int>(doc.index()), id).second) {
      r.violations.push_back("duplicate id");
    }
    out.push_back(std::move(r));
  }
  return out;
}

OrderedJson ToJson(const Document& doc) {
  return std::visit(
      [](const auto& d) -> OrderedJson {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, CodeDocument>) {
          return {{"code_id", d.code_id},       {"language", ToString(d.language)},
                  {"platform", d.platform},     {"library", d.library},
                  {"title", d.title},           {"description", d.description},
                  {"content", d.content}};
        } else if constexpr (std::is_same_v<T, OperatorDocument>) {
          return {{"operator_id", d.operator_id},
                  {"full_name", d.full_name},
                  {"short_name", d.short_name},
                  {"library_name", d.library_name},
                  {"language", ToString(d.language)},
                  {"platform", d.platform},
                  {"description", d.description},
                  {"usage", d.usage},
                  {"parameters", d.parameters},
                  {"output_type", d.output_type}};
        } else if constexpr (std::is_same_v<T, DatasetDocument>) {
          return {{"dataset_id", d.dataset_id}, {"name", d.name},
                  {"provide", d.provide},       {"snippet", d.snippet},
                  {"tags", d.tags},             {"description", d.description},
                  {"doi", d.doi},               {"website", d.website}};
        } else {
          return {{"name", d.name}, {"text", d.text}};
        }
      },
      doc);
}

OrderedJson ToJson(const InstructionTriple& t) {
  return {{"triple_id", t.triple_id},
          {"instruct", t.instruct},
          {"input", t.input},
          {"output", t.output},
          {"method", ToString(t.method)},
          {"task_kind", ToString(t.task_kind)},
          {"provenance", t.provenance}};
}

Document DocumentFromJson(DocumentKind kind, const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("record not an object");
  switch (kind) {
    case DocumentKind::kCode: {
      CodeDocument d;
      d.code_id = GetString(j, "code_id");
      d.language = GetLanguage(j, "language");
      d.platform = GetString(j, "platform");
      d.library = GetString(j, "library");
      d.title = GetString(j, "title");
      d.description = GetString(j, "description");
      d.content = GetString(j, "content");
      return d;
    }
    case DocumentKind::kOperator: {
      OperatorDocument d;
      d.operator_id = GetString(j, "operator_id");
      d.full_name = GetString(j, "full_name");
      d.short_name = GetString(j, "short_name");
      d.library_name = GetString(j, "library_name");
      d.language = GetLanguage(j, "language");
      d.platform = GetString(j, "platform");
      d.description = GetString(j, "description");
      d.usage = GetString(j, "usage");
      d.parameters = GetString(j, "parameters");
      d.output_type = GetString(j, "output_type");
      return d;
    }
    case DocumentKind::kDataset: {
      DatasetDocument d;
      d.dataset_id = GetString(j, "dataset_id");
      d.name = GetString(j, "name");
      d.provide = GetString(j, "provide");
      d.snippet = GetString(j, "snippet");
      d.tags = GetTags(j);
      d.description = GetString(j, "description");
      d.doi = GetString(j, "doi");
      d.website = GetString(j, "website");
      return d;
    }
    case DocumentKind::kEncyclopedic: {
      EncyclopedicDocument d;
      d.name = GetString(j, "name");
      d.text = GetString(j, "text");
      return d;
    }
  }
  throw std::invalid_argument("unknown document kind");
}

InstructionTriple TripleFromJson(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("record not an object");
  InstructionTriple t;
  t.triple_id = GetString(j, "triple_id");
  t.instruct = GetString(j, "instruct");
  t.input = GetString(j, "input");
  t.output = GetString(j, "output");
  const std::string method = GetString(j, "method");
  auto m = ParseGenerationMethod(method);
  if (!m) throw std::invalid_argument("method invalid: " + method);
  t.method = *m;
  const std::string kind = GetString(j, "task_kind");
  auto k = ParseTaskKind(kind);
  if (!k) throw std::invalid_argument("task_kind invalid: " + kind);
  t.task_kind = *k;
  if (auto it = j.find("provenance"); it != j.end() && !it->is_null()) {
    if (it->is_string()) {
      t.provenance.push_back(it->get<std::string>());
    } else {
      t.provenance = it->get<std::vector<std::string>>();
    }
  }
  if (t.triple_id.empty()) t.triple_id = ComputeTripleId(t);
  return t;
}

void AssignMissingId(Document& doc) {
  std::visit(
      [&](auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, EncyclopedicDocument>) {
          return;
        } else {
          std::string* id = nullptr;
          std::string_view prefix;
          if constexpr (std::is_same_v<T, CodeDocument>) {
            id = &d.code_id;
            prefix = "code";
          } else if constexpr (std::is_same_v<T, OperatorDocument>) {
            id = &d.operator_id;
            prefix = "op";
          } else {
            id = &d.dataset_id;
            prefix = "ds";
          }
          if (!Trim(*id).empty()) return;
          id->clear();
          *id = ContentId(prefix, ToJson(Document(d)).dump());
        }
      },
      doc);
}

std::string ToJsonLine(const Document& doc) { return ToJson(doc).dump(); }

std::string ToJsonLine(const InstructionTriple& t) { return ToJson(t).dump(); }

std::vector<InstructionTriple> ReadTriplesJsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::vector<InstructionTriple> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    try {
      out.push_back(TripleFromJson(Json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::string TriplesToJsonl(const std::vector<InstructionTriple>& triples) {
  std::string out;
  for (const auto& t : triples) {
    out += ToJsonLine(t);
    out += '\n';
  }
  return out;
}

void WriteTriplesJsonl(const std::string& path,
                       const std::vector<InstructionTriple>& triples) {
  WriteFile(path, TriplesToJsonl(triples));
}

}  // namespace geocorpus
