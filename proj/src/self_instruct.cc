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

#include "geocorpus/self_instruct.h"

#include <algorithm>
#include <filesystem>
#include <unordered_set>

#include "geocorpus/masking.h"
#include "geocorpus/numeric.h"
#include "geocorpus/text_util.h"

namespace geocorpus {
namespace {

namespace fs = std::filesystem;

std::string StripTrailingNewlines(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

void CheckFailureRate(size_t failures, size_t attempted, double max_rate) {
  if (attempted == 0) return;
  const double rate = static_cast<double>(failures) / static_cast<double>(attempted);
  if (rate > max_rate) {
    throw SelfInstructError("generation failure rate " + FormatFixed3(rate) +
                            " exceeds maximum " + FormatFixed3(max_rate) + " (" +
                            std::to_string(failures) + " of " +
                            std::to_string(attempted) + " documents)");
  }
}

void SortByProvenance(SelfInstructResult& r) {
  std::stable_sort(r.triples.begin(), r.triples.end(),
                   [](const InstructionTriple& a, const InstructionTriple& b) {
                     return a.provenance < b.provenance;
                   });
  std::stable_sort(r.skips.begin(), r.skips.end(),
                   [](const SkipRecord& a, const SkipRecord& b) {
                     return a.source_id < b.source_id;
                   });
}

enum class Label { kNone, kInstruct, kInput, kOutput };

// Recognizes "INSTRUCT:", "**Input:**", "output :" and similar.
Label MatchLabel(std::string_view line, std::string_view* rest) {
  std::string_view t = Trim(line);
  while (!t.empty() && (t.front() == '*' || t.front() == '#')) t.remove_prefix(1);
  const size_t colon = t.find(':');
  if (colon == std::string_view::npos) return Label::kNone;
  std::string name = ToLower(Trim(t.substr(0, colon)));
  Label label = Label::kNone;
  if (name == "instruct" || name == "instruction") label = Label::kInstruct;
  if (name == "input") label = Label::kInput;
  if (name == "output") label = Label::kOutput;
  if (label == Label::kNone) return label;
  std::string_view value = t.substr(colon + 1);
  while (!value.empty() && value.front() == '*') value.remove_prefix(1);
  *rest = value;
  return label;
}

}  // namespace

SummaryPromptTemplates SummaryPromptTemplates::LoadDirectory(const std::string& dir) {
  SummaryPromptTemplates t;
  auto load = [&](const char* name, std::string& field) {
    const fs::path p = fs::path(dir) / name;
    if (fs::exists(p)) field = ReadFile(p.string());
  };
  load("summary_prompt.txt", t.summary_prompt);
  load("summarize_instruct.txt", t.summarize_instruct);
  load("generate_instruct.txt", t.generate_instruct);
  t.summarize_instruct = StripTrailingNewlines(t.summarize_instruct);
  t.generate_instruct = StripTrailingNewlines(t.generate_instruct);
  return t;
}

bool IsHighQualityCode(const CodeDocument& doc, const CodeSelection& selection) {
  size_t statements = 0;
  bool has_comment = false;
  for (std::string_view line : SplitLinesKeepEnds(doc.content)) {
    if (IsStatementLine(line, doc.language)) ++statements;
    if (IsCommentLine(line, doc.language)) has_comment = true;
  }
  return statements >= selection.min_statements &&
         (!selection.require_comment || has_comment);
}

SelfInstructResult GenerateSummaryPairs(const std::vector<CodeDocument>& docs,
                                        GenerationService& service,
                                        const SummaryPairsConfig& config) {
  SelfInstructResult result;
  std::vector<const CodeDocument*> selected;
  for (const CodeDocument& d : docs) {
    if (IsHighQualityCode(d, config.selection)) {
      selected.push_back(&d);
    } else {
      result.skips.push_back({d.code_id, "not selected"});
    }
  }
  if (config.max_documents > 0 && selected.size() > config.max_documents) {
    DeterministicRng rng(MixSeed(config.seed, "summary-pairs"));
    DeterministicShuffle(selected, rng);
    for (size_t i = config.max_documents; i < selected.size(); ++i) {
      result.skips.push_back({selected[i]->code_id, "not sampled"});
    }
    selected.resize(config.max_documents);
  }

  std::vector<GenerationRequest> requests;
  requests.reserve(selected.size());
  for (const CodeDocument* d : selected) {
    std::string prompt = ReplaceAll(config.templates.summary_prompt, "{language}",
                                    ToString(d->language));
    prompt = ReplaceAll(std::move(prompt), "{platform}", d->platform);
    prompt = ReplaceAll(std::move(prompt), "{code}", d->content);
    requests.push_back({std::move(prompt), config.max_output_tokens, config.temperature, 0});
  }
  const std::vector<GenerationOutcome> outcomes = service.GenerateAll(requests);

  size_t failures = 0;
  for (size_t i = 0; i < selected.size(); ++i) {
    const CodeDocument& d = *selected[i];
    const GenerationOutcome& o = outcomes[i];
    if (!o.ok) {
      ++failures;
      result.skips.push_back({d.code_id, "generation failed: " + o.error});
      continue;
    }
    const std::string summary(Trim(o.text));
    if (summary.empty()) {
      result.skips.push_back({d.code_id, "empty generation"});
      continue;
    }
    std::string gen_instruct = ReplaceAll(config.templates.generate_instruct,
                                          "{language}", ToString(d.language));
    gen_instruct = ReplaceAll(std::move(gen_instruct), "{platform}", d.platform);
    result.triples.push_back(MakeTriple(GenerationMethod::kSelfInstruct,
                                        TaskKind::kCodeSummarization,
                                        config.templates.summarize_instruct, d.content,
                                        summary, {d.code_id}));
    result.triples.push_back(MakeTriple(GenerationMethod::kSelfInstruct,
                                        TaskKind::kCodeGeneration, std::move(gen_instruct),
                                        summary, d.content, {d.code_id}));
  }
  CheckFailureRate(failures, selected.size(), config.max_failure_rate);
  SortByProvenance(result);
  return result;
}

OneShotConfig OneShotConfig::LoadFile(const std::string& path) {
  OneShotConfig c;
  c.prompt_template = ReadFile(path);
  return c;
}

std::string DocumentPromptText(const Document& doc) {
  return std::visit(
      [](const auto& d) -> std::string {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, EncyclopedicDocument>) {
          return d.name + "\n\n" + d.text;
        } else if constexpr (std::is_same_v<T, CodeDocument>) {
          return d.content;
        } else {
          return ToJson(Document(d)).dump(2);
        }
      },
      doc);
}

std::string FormatTripleBlock(const InstructionTriple& t) {
  return "```\nINSTRUCT: " + t.instruct + "\nINPUT: " + t.input + "\nOUTPUT: " +
         t.output + "\n```";
}

std::vector<ParsedTriple> ParseTripleBlocks(const std::string& text) {
  std::vector<ParsedTriple> out;
  bool in_block = false;
  Label current = Label::kNone;
  ParsedTriple block;
  std::string* target = nullptr;

  auto finish = [&] {
    ParsedTriple t{std::string(Trim(block.instruct)), std::string(Trim(block.input)),
                   std::string(Trim(block.output))};
    if (!t.instruct.empty() && !t.output.empty()) out.push_back(std::move(t));
    block = ParsedTriple{};
    target = nullptr;
    current = Label::kNone;
  };

  for (std::string_view raw : SplitLinesKeepEnds(text)) {
    std::string_view line = raw;
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) {
      line.remove_suffix(1);
    }
    if (Trim(line).substr(0, 3) == "```") {
      if (in_block) finish();
      in_block = !in_block;
      continue;
    }
    if (!in_block) continue;
    std::string_view rest;
    const Label label = MatchLabel(line, &rest);
    if (label != Label::kNone) {
      current = label;
      target = label == Label::kInstruct ? &block.instruct
               : label == Label::kInput  ? &block.input
                                         : &block.output;
      target->assign(Trim(rest));
      continue;
    }
    if (target != nullptr && current != Label::kNone) {
      if (!target->empty()) target->push_back('\n');
      target->append(line);
    }
  }
  return out;
}

SelfInstructResult GenerateOneShotInstructions(const std::vector<Document>& docs,
                                               const InstructionTriple& exemplar,
                                               TaskKind kind,
                                               GenerationService& service,
                                               const OneShotConfig& config) {
  if (!IsAllowedCombination(GenerationMethod::kSelfInstruct, kind)) {
    throw std::invalid_argument(std::string(ToString(kind)) +
                                " triples are not produced by self-instruct");
  }
  if (exemplar.task_kind != kind || Trim(exemplar.instruct).empty() ||
      Trim(exemplar.output).empty()) {
    throw std::invalid_argument("exemplar is not a valid " + std::string(ToString(kind)) +
                                " triple");
  }
  std::vector<GenerationRequest> requests;
  for (const Document& d : docs) {
    std::string prompt = ReplaceAll(config.prompt_template, "{task_kind}", ToString(kind));
    prompt = ReplaceAll(std::move(prompt), "{exemplar}", FormatTripleBlock(exemplar));
    prompt = ReplaceAll(std::move(prompt), "{document}", DocumentPromptText(d));
    requests.push_back({std::move(prompt), config.max_output_tokens, config.temperature, 0});
  }
  const std::vector<GenerationOutcome> outcomes = service.GenerateAll(requests);

  SelfInstructResult result;
  size_t failures = 0;
  for (size_t i = 0; i < docs.size(); ++i) {
    const std::string& id = DocumentId(docs[i]);
    if (!outcomes[i].ok) {
      ++failures;
      result.skips.push_back({id, "generation failed: " + outcomes[i].error});
      continue;
    }
    const std::vector<ParsedTriple> parsed = ParseTripleBlocks(outcomes[i].text);
    if (parsed.empty()) {
      result.skips.push_back({id, "unparseable generation"});
      continue;
    }
    for (const ParsedTriple& p : parsed) {
      result.triples.push_back(MakeTriple(GenerationMethod::kSelfInstruct, kind,
                                          p.instruct, p.input, p.output, {id}));
    }
  }
  CheckFailureRate(failures, docs.size(), config.max_failure_rate);
  SortByProvenance(result);
  result.triples = DedupTriples(std::move(result.triples));
  return result;
}

std::string DedupKey(const InstructionTriple& t) {
  return NormalizeText(t.instruct) + '\x1f' + NormalizeText(t.input);
}

std::vector<InstructionTriple> DedupTriples(std::vector<InstructionTriple> triples) {
  std::unordered_set<std::string> seen;
  std::vector<InstructionTriple> out;
  out.reserve(triples.size());
  for (InstructionTriple& t : triples) {
    if (seen.insert(DedupKey(t)).second) out.push_back(std::move(t));
  }
  return out;
}

}  // namespace geocorpus
