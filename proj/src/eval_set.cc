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

#include "geocorpus/eval_set.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "geocorpus/hashing.h"
#include "geocorpus/numeric.h"
#include "geocorpus/self_instruct.h"
#include "geocorpus/text_util.h"

namespace geocorpus {
namespace {

struct DimensionInfo {
  Dimension value;
  std::string_view code;
  std::string_view title;
};

constexpr DimensionInfo kDimensions[] = {
    {Dimension::kOK, "OK", "Operator Knowledge"},
    {Dimension::kDK, "DK", "Dataset Knowledge"},
    {Dimension::kPTK, "PTK", "Platform or Toolkit Knowledge"},
    {Dimension::kPTR, "PTR", "Platform or Toolkit Recognition"},
    {Dimension::kPLR, "PLR", "Programming Language Recognition"},
    {Dimension::kER, "ER", "Entity Recognition"},
};

std::string Squash(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == ' ' || c == '_' || c == '-') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

std::string Str(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return "";
  if (!it->is_string()) throw std::invalid_argument(std::string("field not a string: ") + key);
  return it->get<std::string>();
}

McqItem McqFromJson(const Json& j) {
  McqItem item;
  item.item_id = Str(j, "item_id");
  const std::string dim = Str(j, "dimension");
  auto d = ParseDimension(dim);
  if (!d) throw std::invalid_argument("dimension invalid: " + dim);
  item.dimension = *d;
  item.stem = Str(j, "stem");
  const Json& options = j.at("options");
  if (options.is_object()) {
    for (size_t i = 0; i < 4; ++i) {
      item.options[i] = Str(options, std::string(1, kOptionLabels[i]).c_str());
    }
    if (options.size() != 4) throw std::invalid_argument("options must have labels A-D");
  } else if (options.is_array()) {
    if (options.size() != 4) throw std::invalid_argument("exactly 4 options required");
    for (size_t i = 0; i < 4; ++i) item.options[i] = options[i].get<std::string>();
  } else {
    throw std::invalid_argument("options must be an object or array");
  }
  item.key = Str(j, "key");
  if (auto b = j.find("bloom_level"); b != j.end()) {
    auto level = ParseBloomLevel(b->get<std::string>());
    if (!level) throw std::invalid_argument("bloom_level invalid");
    item.bloom_level = *level;
  }
  item.distractors_reviewed = j.value("distractors_reviewed", false);
  return item;
}

SubjectiveTask SubjectiveFromJson(const Json& j) {
  SubjectiveTask t;
  t.item_id = Str(j, "item_id");
  const std::string kind = Str(j, "kind");
  auto k = ParseSubjectiveKind(kind);
  if (!k) throw std::invalid_argument("kind invalid: " + kind);
  t.kind = *k;
  t.prompt = Str(j, "prompt");
  t.reference_answer = Str(j, "reference_answer");
  t.bloom_level = t.kind == SubjectiveKind::kCodeSummarization
                      ? BloomLevel::kComprehensionAndInterpretation
                      : BloomLevel::kInnovationAndCreation;
  if (auto b = j.find("bloom_level"); b != j.end()) {
    auto level = ParseBloomLevel(b->get<std::string>());
    if (!level) throw std::invalid_argument("bloom_level invalid");
    t.bloom_level = *level;
  }
  t.target_platform = Str(j, "target_platform");
  return t;
}

}  // namespace

std::string_view ToString(Dimension d) {
  for (const auto& info : kDimensions) {
    if (info.value == d) return info.code;
  }
  return "?";
}

std::string_view DimensionTitle(Dimension d) {
  for (const auto& info : kDimensions) {
    if (info.value == d) return info.title;
  }
  return "?";
}

std::string_view ToString(BloomLevel b) {
  switch (b) {
    case BloomLevel::kCognitionAndMemory: return "CognitionAndMemory";
    case BloomLevel::kComprehensionAndInterpretation: return "ComprehensionAndInterpretation";
    case BloomLevel::kInnovationAndCreation: return "InnovationAndCreation";
  }
  return "?";
}

std::string_view ToString(SubjectiveKind k) {
  return k == SubjectiveKind::kCodeSummarization ? "CodeSummarization" : "CodeGeneration";
}

std::optional<Dimension> ParseDimension(std::string_view s) {
  const std::string k = Squash(s);
  for (const auto& info : kDimensions) {
    if (Squash(info.code) == k || Squash(info.title) == k) return info.value;
  }
  return std::nullopt;
}

std::optional<BloomLevel> ParseBloomLevel(std::string_view s) {
  const std::string k = Squash(s);
  for (auto b : {BloomLevel::kCognitionAndMemory, BloomLevel::kComprehensionAndInterpretation,
                 BloomLevel::kInnovationAndCreation}) {
    if (Squash(ToString(b)) == k) return b;
  }
  return std::nullopt;
}

std::optional<SubjectiveKind> ParseSubjectiveKind(std::string_view s) {
  const std::string k = Squash(s);
  if (k == "codesummarization" || k == "summarization") return SubjectiveKind::kCodeSummarization;
  if (k == "codegeneration" || k == "generation") return SubjectiveKind::kCodeGeneration;
  return std::nullopt;
}

const std::array<Dimension, 6>& AllDimensions() {
  static const std::array<Dimension, 6> kAll = {Dimension::kOK,  Dimension::kDK,
                                                Dimension::kPTK, Dimension::kPTR,
                                                Dimension::kPLR, Dimension::kER};
  return kAll;
}

std::optional<size_t> McqItem::KeyIndex() const {
  if (key.size() != 1) return std::nullopt;
  for (size_t i = 0; i < kOptionLabels.size(); ++i) {
    if (key[0] == kOptionLabels[i]) return i;
  }
  return std::nullopt;
}

const McqItem* EvalSet::FindMcq(const std::string& item_id) const {
  for (const McqItem& m : mcq) {
    if (m.item_id == item_id) return &m;
  }
  return nullptr;
}

const SubjectiveTask* EvalSet::FindSubjective(const std::string& item_id) const {
  for (const SubjectiveTask& t : subjective) {
    if (t.item_id == item_id) return &t;
  }
  return nullptr;
}

std::vector<EvalCount> EvalSet::Counts() const {
  std::vector<EvalCount> out;
  for (Dimension d : AllDimensions()) {
    uint64_t n = 0;
    for (const McqItem& m : mcq) n += m.dimension == d ? 1 : 0;
    out.push_back({"Multiple Choice", std::string(DimensionTitle(d)), n});
  }
  for (SubjectiveKind k : {SubjectiveKind::kCodeSummarization, SubjectiveKind::kCodeGeneration}) {
    uint64_t n = 0;
    for (const SubjectiveTask& t : subjective) n += t.kind == k ? 1 : 0;
    out.push_back({"Subjective",
                   k == SubjectiveKind::kCodeSummarization ? "Code Summarization"
                                                           : "Code Generation",
                   n});
  }
  return out;
}

ValidationResult ValidateItem(const McqItem& item) {
  ValidationResult r;
  if (Trim(item.item_id).empty()) r.violations.push_back("item_id empty");
  if (Trim(item.stem).empty()) r.violations.push_back("stem empty");
  const auto key = item.KeyIndex();
  if (!key) {
    r.violations.push_back("key invalid: \"" + item.key + "\"");
  } else if (Trim(item.options[*key]).empty()) {
    r.violations.push_back("key option empty");
  }
  std::map<std::string, char> seen;
  for (size_t i = 0; i < 4; ++i) {
    const std::string norm = NormalizeText(item.options[i]);
    if (norm.empty()) {
      if (!key || *key != i) {
        r.violations.push_back(std::string("option ") + kOptionLabels[i] + " empty");
      }
      continue;
    }
    auto [it, inserted] = seen.emplace(norm, kOptionLabels[i]);
    if (!inserted) {
      r.violations.push_back(std::string("duplicate options ") + it->second + " and " +
                             kOptionLabels[i]);
    }
  }
  return r;
}

ValidationResult ValidateItem(const SubjectiveTask& task) {
  ValidationResult r;
  if (Trim(task.item_id).empty()) r.violations.push_back("item_id empty");
  if (Trim(task.prompt).empty()) r.violations.push_back("prompt empty");
  if (Trim(task.reference_answer).empty()) r.violations.push_back("reference_answer empty");
  return r;
}

ValidationResult ValidateEvalSet(const EvalSet& set) {
  ValidationResult r;
  std::set<std::string> ids;
  auto add = [&](const std::string& id, const ValidationResult& v) {
    for (const std::string& s : v.violations) r.violations.push_back(id + ": " + s);
    if (!id.empty() && !ids.insert(id).second) r.violations.push_back(id + ": duplicate id");
  };
  for (const McqItem& m : set.mcq) add(m.item_id, ValidateItem(m));
  for (const SubjectiveTask& t : set.subjective) add(t.item_id, ValidateItem(t));
  return r;
}

OrderedJson ToJson(const McqItem& item) {
  OrderedJson options = OrderedJson::object();
  for (size_t i = 0; i < 4; ++i) options[std::string(1, kOptionLabels[i])] = item.options[i];
  return {{"type", "mcq"},
          {"item_id", item.item_id},
          {"dimension", ToString(item.dimension)},
          {"stem", item.stem},
          {"options", options},
          {"key", item.key},
          {"bloom_level", ToString(item.bloom_level)},
          {"distractors_reviewed", item.distractors_reviewed}};
}

OrderedJson ToJson(const SubjectiveTask& task) {
  return {{"type", "subjective"},
          {"item_id", task.item_id},
          {"kind", ToString(task.kind)},
          {"prompt", task.prompt},
          {"reference_answer", task.reference_answer},
          {"bloom_level", ToString(task.bloom_level)},
          {"target_platform", task.target_platform}};
}

EvalSet EvalSetFromJsonl(const std::string& text) {
  EvalSet set;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    try {
      Json j = Json::parse(line);
      const std::string type = j.value("type", "");
      if (type == "mcq") {
        set.mcq.push_back(McqFromJson(j));
      } else if (type == "subjective") {
        set.subjective.push_back(SubjectiveFromJson(j));
      } else {
        throw std::invalid_argument("unknown item type: " + type);
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("eval set line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return set;
}

EvalSet ReadEvalSetJsonl(const std::string& path) {
  return EvalSetFromJsonl(ReadFile(path));
}

std::string EvalSetToJsonl(const EvalSet& set) {
  std::string out;
  for (const McqItem& m : set.mcq) out += ToJson(m).dump() + "\n";
  for (const SubjectiveTask& t : set.subjective) out += ToJson(t).dump() + "\n";
  return out;
}

std::vector<LeakageHit> CheckLeakage(const EvalSet& set,
                                     const std::vector<InstructionTriple>& sft) {
  std::unordered_map<std::string, std::vector<const InstructionTriple*>> index;
  for (const InstructionTriple& t : sft) {
    for (const std::string* field : {&t.input, &t.output}) {
      std::string norm = NormalizeText(*field);
      if (norm.empty()) continue;
      auto& v = index[norm];
      if (v.empty() || v.back() != &t) v.push_back(&t);
    }
  }
  std::vector<LeakageHit> hits;
  auto probe = [&](const std::string& item_id, std::vector<const std::string*> texts) {
    std::set<std::string> flagged;
    for (const std::string* text : texts) {
      auto it = index.find(NormalizeText(*text));
      if (it == index.end()) continue;
      for (const InstructionTriple* t : it->second) {
        if (flagged.insert(t->triple_id).second) hits.push_back({item_id, t->triple_id});
      }
    }
  };
  for (const McqItem& m : set.mcq) probe(m.item_id, {&m.stem});
  for (const SubjectiveTask& t : set.subjective) {
    probe(t.item_id, {&t.prompt, &t.reference_answer});
  }
  return hits;
}

ExportedEvalSet ExportEvalSet(const EvalSet& set, const ExportOptions& options) {
  const ValidationResult v = ValidateEvalSet(set);
  if (!v.ok()) {
    throw std::invalid_argument("eval set has invalid items: " + Join(v.violations, "; "));
  }
  std::set<std::string> flagged;
  if (!options.include_flagged) {
    for (const LeakageHit& h : options.leakage) flagged.insert(h.item_id);
  }
  ExportedEvalSet out;
  for (const McqItem& item : set.mcq) {
    if (flagged.count(item.item_id)) {
      out.excluded_item_ids.push_back(item.item_id);
      continue;
    }
    std::vector<size_t> order = {0, 1, 2, 3};
    DeterministicRng rng(MixSeed(options.seed, item.item_id));
    DeterministicShuffle(order, rng);
    McqItem shuffled = item;
    const size_t old_key = *item.KeyIndex();
    for (size_t pos = 0; pos < 4; ++pos) {
      shuffled.options[pos] = item.options[order[pos]];
      if (order[pos] == old_key) shuffled.key = std::string(1, kOptionLabels[pos]);
    }
    out.set.mcq.push_back(std::move(shuffled));
  }
  for (const SubjectiveTask& t : set.subjective) {
    if (flagged.count(t.item_id)) {
      out.excluded_item_ids.push_back(t.item_id);
      continue;
    }
    out.set.subjective.push_back(t);
  }
  out.items_jsonl = EvalSetToJsonl(out.set);
  for (const EvalCount& c : out.set.Counts()) {
    out.counts_jsonl +=
        OrderedJson{{"type", c.type}, {"dimension", c.dimension}, {"count", c.count}}.dump() +
        "\n";
  }
  return out;
}

std::vector<std::string> WriteExport(const ExportedEvalSet& exported,
                                     const std::string& dir) {
  namespace fs = std::filesystem;
  const std::string items = (fs::path(dir) / "eval_set.jsonl").string();
  const std::string counts = (fs::path(dir) / "eval_counts.jsonl").string();
  WriteFile(items, exported.items_jsonl);
  WriteFile(counts, exported.counts_jsonl);
  return {items, counts};
}

std::vector<McqItem> ParseMcqBlocks(const std::string& text, Dimension dimension) {
  std::vector<McqItem> out;
  bool in_block = false;
  McqItem item;
  std::string* target = nullptr;
  auto finish = [&] {
    item.stem = std::string(Trim(item.stem));
    for (auto& o : item.options) o = std::string(Trim(o));
    item.key = std::string(Trim(item.key));
    if (!item.key.empty()) item.key = std::string(1, static_cast<char>(std::toupper(
                                                         static_cast<unsigned char>(item.key[0]))));
    item.dimension = dimension;
    item.item_id = ContentId("mcq", item.stem + "\x1f" + Join({item.options.begin(),
                                                               item.options.end()},
                                                              "\x1f"));
    if (ValidateItem(item).ok()) out.push_back(item);
    item = McqItem{};
    target = nullptr;
  };
  for (std::string_view raw : SplitLinesKeepEnds(text)) {
    std::string_view line = raw;
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.remove_suffix(1);
    const std::string_view t = Trim(line);
    if (t.substr(0, 3) == "```") {
      if (in_block) finish();
      in_block = !in_block;
      continue;
    }
    if (!in_block) continue;
    const size_t colon = t.find(':');
    if (colon != std::string_view::npos) {
      const std::string label = ToLower(Trim(t.substr(0, colon)));
      std::string* next = nullptr;
      if (label == "stem" || label == "question") next = &item.stem;
      if (label.size() == 1 && label[0] >= 'a' && label[0] <= 'd') {
        next = &item.options[static_cast<size_t>(label[0] - 'a')];
      }
      if (label == "key" || label == "answer") next = &item.key;
      if (next != nullptr) {
        target = next;
        target->assign(Trim(t.substr(colon + 1)));
        continue;
      }
    }
    if (target != nullptr) {
      target->push_back('\n');
      target->append(line);
    }
  }
  return out;
}

McqDraftResult DraftMcqItems(const std::vector<Document>& docs, const McqItem& exemplar,
                             GenerationService& service, int max_output_tokens) {
  if (!ValidateItem(exemplar).ok()) {
    throw std::invalid_argument("exemplar is not a valid multiple-choice item");
  }
  std::string block = "```\nSTEM: " + exemplar.stem + "\n";
  for (size_t i = 0; i < 4; ++i) {
    block += std::string(1, kOptionLabels[i]) + ": " + exemplar.options[i] + "\n";
  }
  block += "KEY: " + exemplar.key + "\n```";
  std::vector<GenerationRequest> requests;
  for (const Document& d : docs) {
    std::string prompt =
        "You write multiple-choice questions about geospatial programming.\n"
        "Dimension: " + std::string(DimensionTitle(exemplar.dimension)) +
        ".\n\nHere is a worked example:\n" + block +
        "\n\nWrite new questions grounded only in the document below. Each question "
        "needs four distinct options and exactly one correct answer. Use the same "
        "fenced format.\n\nDocument:\n" + DocumentPromptText(d) + "\n";
    requests.push_back({std::move(prompt), max_output_tokens, 0.0, 0});
  }
  const auto outcomes = service.GenerateAll(requests);
  McqDraftResult result;
  for (size_t i = 0; i < docs.size(); ++i) {
    const std::string& id = DocumentId(docs[i]);
    if (!outcomes[i].ok) {
      result.skips.emplace_back(id, "generation failed: " + outcomes[i].error);
      continue;
    }
    auto items = ParseMcqBlocks(outcomes[i].text, exemplar.dimension);
    if (items.empty()) {
      result.skips.emplace_back(id, "unparseable generation");
      continue;
    }
    for (McqItem& m : items) result.items.push_back(std::move(m));
  }
  return result;
}

}  // namespace geocorpus
