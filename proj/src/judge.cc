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

#include "geocorpus/judge.h"

#include <cctype>
#include <map>
#include <regex>
#include <sstream>
#include <stdexcept>

#include "geocorpus/numeric.h"
#include "geocorpus/text_util.h"

namespace geocorpus {
namespace {

// Kept identical to templates/prompts/judge_summarization.txt.
constexpr const char kSummaryTemplate[] =
R"tmpl(Role

You are a **code review expert** with extensive experience in **geospatial code programming**, focused on **analyzing and evaluating code summaries**. Your task is to assess these summaries based on three criteria: **completeness, accuracy, and readability**. Please provide a score from 1 to 10 for each criterion, convert it to a 0-1 scale, round to three decimal places, and calculate the final average score similarly.

Criteria

Completeness
Completeness requires the summary to cover **six key dimensions**: code overview, data used, spatial scope, temporal scope, input/output data types, and process of functionality implementation.

Accuracy
Accuracy requires that, although the **expression may vary**, the **meaning must be precise**.

Readability
Readability requires **clear logic, smooth sentences, and concise expression**.

Formate

Completeness: [Score 1-10]
(Converted to 0-1 scale: [0.x rounded to three decimal places])

Accuracy: [Score 1-10]
(Converted to 0-1 scale: [0.x rounded to three decimal places])

Readability: [Score 1-10]
(Converted to 0-1 scale: [0.x rounded to three decimal places])

Input & Reference

Code Summary for Evaluation:
"{code_summary}"

Reference Standard Answer:
"{reference_answer}"
)tmpl";

// Kept identical to templates/prompts/judge_generation.txt.
constexpr const char kGenerationTemplate[] =
R"tmpl(Role

You are a **code review expert** with extensive experience in **geospatial code programming**, focused on **checking generated code against task requirements**. Your task is to extract the key entities from the task requirements and from the generated code and compare them in four categories: **data sources, time, space, and input/output data**.

Criteria

Data sources
The datasets, collections, files or services the code reads must be the ones the task requires.

Time
The temporal scope (dates, periods, time filters) must match the task.

Space
The spatial scope (regions, geometries, coordinate systems, resolution) must match the task.

Input/output data
The input and output data types, formats and destinations must match the task.

Format

For each category answer MATCH if the code agrees with the requirements, MISMATCH if it does not, and NOT_APPLICABLE if the requirements do not mention that category.

Data sources: [MATCH | MISMATCH | NOT_APPLICABLE]
Time: [MATCH | MISMATCH | NOT_APPLICABLE]
Space: [MATCH | MISMATCH | NOT_APPLICABLE]
Input/output data: [MATCH | MISMATCH | NOT_APPLICABLE]

Input & Reference

Generated Code for Evaluation:
"{generated_code}"

Task Requirements:
"{task_requirements}"
)tmpl";

// Single left-to-right pass, so substituted text is never rescanned.
std::string FillPlaceholders(
    const std::string& tmpl,
    const std::vector<std::pair<std::string_view, std::string_view>>& values) {
  std::string out;
  size_t i = 0;
  while (i < tmpl.size()) {
    bool replaced = false;
    if (tmpl[i] == '{') {
      for (const auto& [key, value] : values) {
        if (tmpl.compare(i, key.size(), key) == 0) {
          out.append(value);
          i += key.size();
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out.push_back(tmpl[i++]);
  }
  return out;
}

std::string Alnum(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

std::optional<int> FindScore(const std::string& text, const char* label) {
  const std::regex pattern(std::string(label) +
                               R"([*_\s]*[:：][*_\s]*\[?\s*(\d+)(\.\d+)?)",
                           std::regex::icase | std::regex::ECMAScript);
  std::smatch m;
  if (!std::regex_search(text, m, pattern)) return std::nullopt;
  if (m[2].matched && std::stod(m[2].str()) != 0.0) return std::nullopt;
  if (m[1].length() > 2) return std::nullopt;
  const int value = std::stoi(m[1].str());
  if (value < 1 || value > 10) return std::nullopt;
  return value;
}

std::optional<EntityCategory> CategoryFromLabel(std::string_view label) {
  const std::string k = Alnum(label);
  if (k == "datasources" || k == "datasource" || k == "data") return EntityCategory::kDataSources;
  if (k == "time" || k == "temporal" || k == "temporalscope") return EntityCategory::kTime;
  if (k == "space" || k == "spatial" || k == "spatialscope") return EntityCategory::kSpace;
  if (k == "inputoutputdata" || k == "inputoutput" || k == "io" || k == "iodata") {
    return EntityCategory::kInputOutput;
  }
  return std::nullopt;
}

std::optional<EntityVerdict> VerdictFromText(std::string_view value) {
  std::string_view t = Trim(value);
  while (!t.empty() && (t.front() == '*' || t.front() == '[')) t.remove_prefix(1);
  size_t end = 0;
  while (end < t.size() && (std::isalpha(static_cast<unsigned char>(t[end])) ||
                            t[end] == '_' || t[end] == '/' || t[end] == ' ')) {
    ++end;
  }
  const std::string k = Alnum(t.substr(0, end));
  if (k == "match" || k == "matched") return EntityVerdict::kMatch;
  if (k == "mismatch" || k == "mismatched") return EntityVerdict::kMismatch;
  if (k == "notapplicable" || k == "na") return EntityVerdict::kNotApplicable;
  return std::nullopt;
}

std::string Str(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw std::invalid_argument(std::string("missing string field: ") + key);
  }
  return it->get<std::string>();
}

}  // namespace

std::string_view ToString(JudgeMetric m) {
  switch (m) {
    case JudgeMetric::kCompleteness: return "Completeness";
    case JudgeMetric::kAccuracy: return "Accuracy";
    case JudgeMetric::kReadability: return "Readability";
    case JudgeMetric::kEntityAccuracy: return "EntityAccuracy";
  }
  return "?";
}

std::string_view ToString(EntityCategory c) {
  switch (c) {
    case EntityCategory::kDataSources: return "Data sources";
    case EntityCategory::kTime: return "Time";
    case EntityCategory::kSpace: return "Space";
    case EntityCategory::kInputOutput: return "Input/output data";
  }
  return "?";
}

double ConvertJudgeScore(double raw) {
  if (raw < 1.0 || raw > 10.0) throw std::invalid_argument("judge score outside 1-10");
  return RoundHalfAway(raw / 10.0);
}

std::string DefaultSummaryJudgeTemplate() { return kSummaryTemplate; }
std::string DefaultGenerationJudgeTemplate() { return kGenerationTemplate; }

std::string RenderSummaryJudgePrompt(const std::string& tmpl, const std::string& summary,
                                     const std::string& reference) {
  if (tmpl.find("{code_summary}") == std::string::npos ||
      tmpl.find("{reference_answer}") == std::string::npos) {
    throw std::invalid_argument(
        "summary judge template needs {code_summary} and {reference_answer}");
  }
  return FillPlaceholders(tmpl, {{"{code_summary}", summary}, {"{reference_answer}", reference}});
}

std::string RenderGenerationJudgePrompt(const std::string& tmpl, const std::string& code,
                                        const std::string& requirements) {
  if (tmpl.find("{generated_code}") == std::string::npos ||
      tmpl.find("{task_requirements}") == std::string::npos) {
    throw std::invalid_argument(
        "generation judge template needs {generated_code} and {task_requirements}");
  }
  return FillPlaceholders(tmpl,
                          {{"{generated_code}", code}, {"{task_requirements}", requirements}});
}

std::optional<std::array<int, 3>> ParseSummaryScores(std::string_view response) {
  const std::string text(response);
  std::array<int, 3> out{};
  const char* labels[] = {"completeness", "accuracy", "readability"};
  for (size_t i = 0; i < 3; ++i) {
    auto v = FindScore(text, labels[i]);
    if (!v) return std::nullopt;
    out[i] = *v;
  }
  return out;
}

size_t EntityVerdicts::matched() const {
  size_t n = 0;
  for (EntityVerdict v : verdicts) n += v == EntityVerdict::kMatch ? 1 : 0;
  return n;
}

size_t EntityVerdicts::examined() const {
  size_t n = 0;
  for (EntityVerdict v : verdicts) n += v != EntityVerdict::kNotApplicable ? 1 : 0;
  return n;
}

EntityParse ParseEntityVerdicts(std::string_view response) {
  std::array<std::optional<EntityVerdict>, 4> found;
  for (std::string_view raw : SplitLinesKeepEnds(response)) {
    std::string_view line = Trim(raw);
    while (!line.empty() && (line.front() == '-' || line.front() == '*' ||
                             line.front() == '#' || line.front() == ' ')) {
      line.remove_prefix(1);
    }
    const size_t colon = line.find(':');
    if (colon == std::string_view::npos) continue;
    auto category = CategoryFromLabel(line.substr(0, colon));
    if (!category) continue;
    auto verdict = VerdictFromText(line.substr(colon + 1));
    if (!verdict) continue;
    auto& slot = found[static_cast<size_t>(*category)];
    if (!slot) slot = verdict;
  }
  EntityParse out;
  EntityVerdicts v;
  for (size_t i = 0; i < 4; ++i) {
    if (!found[i]) {
      out.error = "verdict missing category: " + std::string(ToString(kEntityCategories[i]));
      return out;
    }
    v.verdicts[i] = *found[i];
  }
  out.verdicts = v;
  return out;
}

std::vector<SubjectiveOutput> SubjectiveOutputsFromJsonl(const std::string& text) {
  std::vector<SubjectiveOutput> out;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    try {
      Json j = Json::parse(line);
      out.push_back({Str(j, "item_id"), Str(j, "model_id"), Str(j, "raw_text")});
    } catch (const std::exception& e) {
      throw std::invalid_argument("outputs line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

JudgeRun JudgeOutputs(const std::vector<SubjectiveOutput>& outputs, const EvalSet& set,
                      GenerationService& judge, const JudgeConfig& config) {
  const int reps = std::max(1, config.repetitions);
  std::vector<const SubjectiveTask*> tasks;
  std::vector<GenerationRequest> requests;
  for (const SubjectiveOutput& o : outputs) {
    const SubjectiveTask* task = set.FindSubjective(o.item_id);
    if (task == nullptr) {
      throw std::invalid_argument("output references unknown subjective item: " + o.item_id);
    }
    tasks.push_back(task);
    const std::string prompt =
        task->kind == SubjectiveKind::kCodeSummarization
            ? RenderSummaryJudgePrompt(config.summary_template, o.text, task->reference_answer)
            : RenderGenerationJudgePrompt(config.generation_template, o.text, task->prompt);
    for (int r = 0; r < reps; ++r) {
      requests.push_back({prompt, config.max_output_tokens, 0.0, r});
    }
  }
  const std::vector<GenerationOutcome> outcomes = judge.GenerateAll(requests);

  JudgeRun run;
  for (size_t i = 0; i < outputs.size(); ++i) {
    JudgedItem item;
    item.item_id = outputs[i].item_id;
    item.model_id = outputs[i].model_id;
    item.kind = tasks[i]->kind;
    std::string failure;
    if (item.kind == SubjectiveKind::kCodeSummarization) {
      std::array<double, 3> sums{};
      int parsed = 0;
      for (int r = 0; r < reps; ++r) {
        const GenerationOutcome& o = outcomes[i * static_cast<size_t>(reps) + r];
        if (!o.ok) {
          failure = "judge failed: " + o.error;
          continue;
        }
        auto scores = ParseSummaryScores(o.text);
        if (!scores) {
          failure = "unparseable judge response";
          continue;
        }
        for (size_t k = 0; k < 3; ++k) sums[k] += (*scores)[k];
        ++parsed;
      }
      if (parsed > 0) {
        item.scored = true;
        double total = 0.0;
        for (size_t k = 0; k < 3; ++k) {
          const double raw = sums[k] / parsed;
          const double converted = ConvertJudgeScore(raw);
          item.scores.push_back({item.item_id, item.model_id, kSummaryMetrics[k], raw, converted});
          total += converted;
        }
        item.item_score = RoundHalfAway(total / 3.0);
      }
    } else {
      double sum = 0.0;
      int parsed = 0;
      for (int r = 0; r < reps; ++r) {
        const GenerationOutcome& o = outcomes[i * static_cast<size_t>(reps) + r];
        if (!o.ok) {
          failure = "judge failed: " + o.error;
          continue;
        }
        EntityParse p = ParseEntityVerdicts(o.text);
        if (!p.verdicts) {
          failure = p.error;
          continue;
        }
        if (p.verdicts->examined() == 0) {
          failure = "no applicable entity categories";
          continue;
        }
        sum += static_cast<double>(p.verdicts->matched()) /
               static_cast<double>(p.verdicts->examined());
        ++parsed;
      }
      if (parsed > 0) {
        item.scored = true;
        const double raw = sum / parsed;
        item.item_score = RoundHalfAway(raw);
        item.scores.push_back(
            {item.item_id, item.model_id, JudgeMetric::kEntityAccuracy, raw, item.item_score});
      }
    }
    if (!item.scored) item.skip_reason = failure;
    run.items.push_back(std::move(item));
  }
  return run;
}

std::vector<JudgeAggregate> AggregateJudgeRun(const JudgeRun& run) {
  struct Acc {
    std::map<JudgeMetric, double> sums;
    size_t items = 0;
    size_t unscored = 0;
  };
  std::map<std::pair<std::string, SubjectiveKind>, Acc> groups;
  for (const JudgedItem& item : run.items) {
    Acc& acc = groups[{item.model_id, item.kind}];
    ++acc.items;
    if (!item.scored) ++acc.unscored;
    for (const JudgeScore& s : item.scores) acc.sums[s.metric] += s.converted;
  }
  std::vector<JudgeAggregate> out;
  for (const auto& [key, acc] : groups) {
    JudgeAggregate agg;
    agg.model_id = key.first;
    agg.kind = key.second;
    agg.items = acc.items;
    agg.unscored = acc.unscored;
    auto add = [&](JudgeMetric m) {
      auto it = acc.sums.find(m);
      const double sum = it == acc.sums.end() ? 0.0 : it->second;
      agg.metrics.emplace_back(std::string(ToString(m)),
                               RoundHalfAway(sum / static_cast<double>(acc.items)));
    };
    if (key.second == SubjectiveKind::kCodeSummarization) {
      for (JudgeMetric m : kSummaryMetrics) add(m);
    } else {
      add(JudgeMetric::kEntityAccuracy);
    }
    out.push_back(std::move(agg));
  }
  return out;
}

OrderedJson ToJson(const JudgedItem& item) {
  OrderedJson scores = OrderedJson::object();
  for (const JudgeScore& s : item.scores) {
    scores[std::string(ToString(s.metric))] = {{"raw", s.raw},
                                               {"converted", FormatFixed3(s.converted)}};
  }
  OrderedJson j = {{"item_id", item.item_id},
                   {"model_id", item.model_id},
                   {"kind", ToString(item.kind)},
                   {"scored", item.scored},
                   {"scores", scores}};
  if (item.scored) {
    j["item_score"] = FormatFixed3(item.item_score);
  } else {
    j["skip_reason"] = item.skip_reason;
  }
  return j;
}

}  // namespace geocorpus
