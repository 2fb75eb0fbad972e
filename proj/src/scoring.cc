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

#include "geocorpus/scoring.h"

#include <algorithm>
#include <cctype>
#include <iomanip>
#include <regex>
#include <set>
#include <sstream>
#include <tuple>

#include "geocorpus/numeric.h"
#include "geocorpus/text_util.h"

namespace geocorpus {
namespace {

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool IsAlpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

std::optional<OptionChoice> LetterChoice(char c) {
  switch (std::toupper(static_cast<unsigned char>(c))) {
    case 'A': return OptionChoice::kA;
    case 'B': return OptionChoice::kB;
    case 'C': return OptionChoice::kC;
    case 'D': return OptionChoice::kD;
    default: return std::nullopt;
  }
}

std::string_view StripDecoration(std::string_view t) {
  t = Trim(t);
  while (!t.empty() && (t.front() == '*' || t.front() == '`')) t.remove_prefix(1);
  while (!t.empty() && (t.back() == '*' || t.back() == '`')) t.remove_suffix(1);
  return Trim(t);
}

// Rule 1.
std::optional<OptionChoice> StandaloneLetter(std::string_view raw) {
  std::string_view t = StripDecoration(raw);
  size_t i = 0;
  char open = 0;
  if (i < t.size() && (t[i] == '(' || t[i] == '[')) open = t[i++];
  if (i >= t.size()) return std::nullopt;
  auto choice = LetterChoice(t[i]);
  if (!choice) return std::nullopt;
  ++i;
  bool delimited = false;
  if (i < t.size() && (t[i] == ')' || t[i] == ']')) {
    if (open != 0 && t[i] != (open == '(' ? ')' : ']')) return std::nullopt;
    ++i;
    delimited = true;
  } else if (open != 0) {
    return std::nullopt;
  }
  if (i < t.size() && (t[i] == '.' || t[i] == ':')) {
    ++i;
    delimited = true;
  }
  std::string_view rest = StripDecoration(t.substr(i));
  if (rest.empty()) return choice;
  if (!delimited || !IsSpace(t[i])) return std::nullopt;
  return choice;
}

// Rule 2.
std::optional<OptionChoice> AnswerPhrase(std::string_view raw) {
  static const std::regex kPattern(
      R"((?:answer|option|choice)\s*(?:is|would be|should be|:|-|=)\s*:?\s*)"
      R"((?:\*\*)?(?:option\s+|choice\s+)?([\(\[]?)([abcd])([\)\]]?))",
      std::regex::icase | std::regex::ECMAScript);
  const std::string text(raw);
  for (auto it = std::sregex_iterator(text.begin(), text.end(), kPattern);
       it != std::sregex_iterator(); ++it) {
    const std::smatch& m = *it;
    const bool wrapped = m[1].length() > 0 && m[3].length() > 0;
    if (m[1].length() > 0 && m[3].length() == 0) continue;
    const size_t after = static_cast<size_t>(m.position(0) + m.length(0));
    const char letter = m[2].str()[0];
    if (after < text.size() && IsAlpha(text[after])) continue;
    if (!wrapped && std::islower(static_cast<unsigned char>(letter))) {
      // "the answer is a raster" names no option.
      size_t j = after;
      while (j < text.size() && IsSpace(text[j])) ++j;
      if (j > after && j < text.size() && IsAlpha(text[j])) continue;
    }
    return LetterChoice(letter);
  }
  return std::nullopt;
}

std::string NormalizeOptionText(std::string_view s) {
  std::string n = NormalizeText(StripDecoration(s));
  while (!n.empty() && (n.back() == '.' || n.back() == ' ')) n.pop_back();
  if (n.size() >= 2 && (n.front() == '"' || n.front() == '\'') && n.back() == n.front()) {
    n = n.substr(1, n.size() - 2);
  }
  return n;
}

std::string Str(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw std::invalid_argument(std::string("missing string field: ") + key);
  }
  return it->get<std::string>();
}

template <typename Fn>
void ForEachJsonLine(const std::string& text, const char* what, Fn fn) {
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    try {
      fn(Json::parse(line));
    } catch (const std::exception& e) {
      throw ScoringError(std::string(what) + " line " + std::to_string(lineno) + ": " +
                         e.what());
    }
  }
}

}  // namespace

std::string_view ToString(OptionChoice c) {
  switch (c) {
    case OptionChoice::kA: return "A";
    case OptionChoice::kB: return "B";
    case OptionChoice::kC: return "C";
    case OptionChoice::kD: return "D";
    case OptionChoice::kUnanswered: return "Unanswered";
  }
  return "Unanswered";
}

std::optional<OptionChoice> ParseOptionChoice(std::string_view s) {
  if (s == "Unanswered") return OptionChoice::kUnanswered;
  if (s.size() == 1) return LetterChoice(s[0]);
  return std::nullopt;
}

OptionChoice MatchOption(std::string_view raw, const std::array<std::string, 4>* options) {
  if (auto c = StandaloneLetter(raw)) return *c;
  if (auto c = AnswerPhrase(raw)) return *c;
  if (options != nullptr) {
    const std::string norm = NormalizeOptionText(raw);
    if (!norm.empty()) {
      for (size_t i = 0; i < 4; ++i) {
        if (NormalizeOptionText((*options)[i]) == norm) return static_cast<OptionChoice>(i);
      }
    }
  }
  return OptionChoice::kUnanswered;
}

std::string McqPrompt(const McqItem& item) {
  std::string out =
      "Answer the following multiple-choice question about geospatial programming. "
      "Exactly one option is correct. Reply with the letter of that option.\n\n"
      "Question: " + item.stem + "\n";
  for (size_t i = 0; i < 4; ++i) {
    out += std::string(1, kOptionLabels[i]) + ". " + item.options[i] + "\n";
  }
  return out;
}

std::vector<ModelAnswer> AnswersFromJsonl(const std::string& text) {
  std::vector<ModelAnswer> out;
  ForEachJsonLine(text, "answers", [&](const Json& j) {
    out.push_back({Str(j, "item_id"), Str(j, "model_id"), Str(j, "raw_text"),
                   OptionChoice::kUnanswered});
  });
  return out;
}

std::vector<ModelAnswer> ReadAnswersJsonl(const std::string& path) {
  return AnswersFromJsonl(ReadFile(path));
}

OrderedJson ToJson(const ModelAnswer& a) {
  return {{"item_id", a.item_id},
          {"model_id", a.model_id},
          {"raw_text", a.raw_text},
          {"parsed_choice", ToString(a.parsed_choice)}};
}

void ParseAnswers(std::vector<ModelAnswer>& answers, const EvalSet& set) {
  for (ModelAnswer& a : answers) {
    const McqItem* item = set.FindMcq(a.item_id);
    if (item == nullptr) throw ScoringError("answer references unknown item: " + a.item_id);
    a.parsed_choice = MatchOption(a.raw_text, &item->options);
  }
}

std::vector<McqAccuracy> ComputeMcqAccuracy(const std::vector<ModelAnswer>& answers,
                                            const EvalSet& set) {
  std::map<Dimension, size_t> totals;
  for (const McqItem& m : set.mcq) ++totals[m.dimension];

  std::map<std::string, std::map<Dimension, size_t>> correct;
  std::set<std::pair<std::string, std::string>> seen;
  for (const ModelAnswer& a : answers) {
    const McqItem* item = set.FindMcq(a.item_id);
    if (item == nullptr) throw ScoringError("answer references unknown item: " + a.item_id);
    if (!seen.emplace(a.item_id, a.model_id).second) {
      throw ScoringError("duplicate answer for item " + a.item_id + " from model " +
                         a.model_id);
    }
    auto& row = correct[a.model_id];
    const auto key = item->KeyIndex();
    if (key && a.parsed_choice == static_cast<OptionChoice>(*key)) ++row[item->dimension];
  }

  std::vector<McqAccuracy> out;
  for (const auto& [model, row] : correct) {
    McqAccuracy acc;
    acc.model_id = model;
    size_t all_correct = 0;
    size_t all_total = 0;
    double sum = 0.0;
    for (Dimension d : AllDimensions()) {
      auto t = totals.find(d);
      if (t == totals.end()) continue;
      DimensionAccuracy da;
      da.dimension = d;
      da.total = t->second;
      auto c = row.find(d);
      da.correct = c == row.end() ? 0 : c->second;
      da.accuracy = RoundHalfAway(static_cast<double>(da.correct) / static_cast<double>(da.total));
      sum += da.accuracy;
      all_correct += da.correct;
      all_total += da.total;
      acc.dimensions.push_back(da);
    }
    if (!acc.dimensions.empty()) {
      acc.unweighted_average = RoundHalfAway(sum / static_cast<double>(acc.dimensions.size()));
      acc.weighted_average =
          RoundHalfAway(static_cast<double>(all_correct) / static_cast<double>(all_total));
    }
    out.push_back(std::move(acc));
  }
  return out;
}

double ReadabilityScore(double average_rank, int candidate_count) {
  if (candidate_count < 2) throw std::invalid_argument("candidate count must be at least 2");
  const double m = static_cast<double>(candidate_count);
  if (average_rank < 1.0 || average_rank > m) {
    throw std::invalid_argument("average rank outside [1, M]");
  }
  return RoundHalfAway((m - average_rank) / m);
}

ReadabilityResult ReadabilityFromRanks(const std::vector<RankSubmission>& submissions,
                                       std::vector<std::string> models) {
  ReadabilityResult result;
  std::set<std::string> candidates(models.begin(), models.end());
  std::map<std::string, std::pair<double, size_t>> sums;
  for (size_t i = 0; i < submissions.size(); ++i) {
    const RankSubmission& s = submissions[i];
    std::set<std::string> ordering(s.ordering.begin(), s.ordering.end());
    if (ordering.size() != s.ordering.size()) {
      result.rejected.push_back({i, "not a permutation: duplicate model"});
      continue;
    }
    if (candidates.empty()) candidates = ordering;
    if (ordering != candidates) {
      result.rejected.push_back({i, "not a permutation of the candidate models"});
      continue;
    }
    for (size_t rank = 0; rank < s.ordering.size(); ++rank) {
      auto& [sum, n] = sums[s.ordering[rank]];
      sum += static_cast<double>(rank + 1);
      ++n;
    }
  }
  const int m = static_cast<int>(candidates.size());
  for (const auto& [model, acc] : sums) {
    ReadabilityAggregate agg;
    agg.model_id = model;
    agg.candidate_count = m;
    agg.submissions = acc.second;
    agg.average_rank = acc.first / static_cast<double>(acc.second);
    agg.score = ReadabilityScore(agg.average_rank, m);
    result.models.push_back(agg);
  }
  return result;
}

std::string_view ToString(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "pass";
    case Verdict::kFail: return "fail";
    case Verdict::kNotRun: return "not_run";
  }
  return "not_run";
}

std::optional<Verdict> ParseVerdict(std::string_view s) {
  const std::string k = ToLower(Trim(s));
  if (k == "pass") return Verdict::kPass;
  if (k == "fail") return Verdict::kFail;
  if (k == "not_run" || k == "notrun" || k == "not run") return Verdict::kNotRun;
  return std::nullopt;
}

double ExecutabilityFraction(size_t passed, size_t total) {
  if (total == 0) return 0.0;
  return RoundHalfAway(static_cast<double>(passed) / static_cast<double>(total));
}

ExecutabilityResult ExecutabilityScore(const std::vector<ExecutabilityVerdict>& verdicts,
                                       TiePolicy ties) {
  ExecutabilityResult result;
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  // (model, item) -> (pass votes, fail votes)
  std::map<std::pair<std::string, std::string>, std::pair<size_t, size_t>> votes;
  std::set<std::string> models;
  for (size_t i = 0; i < verdicts.size(); ++i) {
    const ExecutabilityVerdict& v = verdicts[i];
    if (!seen.emplace(v.item_id, v.model_id, v.reviewer_id).second) {
      result.rejected.push_back({i, "duplicate verdict for item " + v.item_id + ", model " +
                                        v.model_id + ", reviewer " + v.reviewer_id});
      continue;
    }
    models.insert(v.model_id);
    if (v.verdict == Verdict::kNotRun) continue;
    auto& [pass, fail] = votes[{v.model_id, v.item_id}];
    (v.verdict == Verdict::kPass ? pass : fail) += 1;
  }
  std::map<std::string, ExecutabilityAggregate> agg;
  for (const std::string& m : models) agg[m].model_id = m;
  for (const auto& [key, count] : votes) {
    ExecutabilityAggregate& a = agg[key.first];
    ++a.total;
    const bool pass = count.first > count.second ||
                      (count.first == count.second && ties == TiePolicy::kPass);
    if (pass) ++a.passed;
  }
  for (auto& [model, a] : agg) {
    a.score = ExecutabilityFraction(a.passed, a.total);
    result.models.push_back(a);
  }
  return result;
}

void ScoreTable::Set(const std::string& model_id, const std::string& column, double value) {
  if (std::find(models_.begin(), models_.end(), model_id) == models_.end()) {
    models_.push_back(model_id);
  }
  if (std::find(columns_.begin(), columns_.end(), column) == columns_.end()) {
    columns_.push_back(column);
  }
  values_[model_id][column] = value;
}

std::optional<double> ScoreTable::Get(const std::string& model_id,
                                      const std::string& column) const {
  auto m = values_.find(model_id);
  if (m == values_.end()) return std::nullopt;
  auto c = m->second.find(column);
  if (c == m->second.end()) return std::nullopt;
  return c->second;
}

ScoreTable ScoreTable::FromJsonl(const std::string& text) {
  ScoreTable t;
  ForEachJsonLine(text, "scores", [&](const Json& j) {
    const Json& score = j.at("score");
    if (!score.is_number()) throw std::invalid_argument("score must be a number");
    t.Set(Str(j, "model_id"), Str(j, "metric"), score.get<double>());
  });
  return t;
}

ScoreTable ScoreTable::ReadJsonl(const std::string& path) { return FromJsonl(ReadFile(path)); }

std::string ScoreTable::ToJsonl() const {
  std::string out;
  for (const std::string& m : models_) {
    for (const std::string& c : columns_) {
      auto v = Get(m, c);
      if (!v) continue;
      out += OrderedJson{{"model_id", m}, {"metric", c}, {"score", *v}}.dump() + "\n";
    }
  }
  return out;
}

const ReportRow* ScoreReport::Find(const std::string& model_id) const {
  for (const ReportRow& r : rows) {
    if (r.model_id == model_id) return &r;
  }
  return nullptr;
}

std::string ScoreReport::ToText() const {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header = {"Model"};
  for (const std::string& c : columns) {
    header.push_back(c);
    header.push_back("");
  }
  header.push_back("Overall");
  header.push_back("");
  cells.push_back(header);
  for (const ReportRow& r : rows) {
    std::vector<std::string> line = {r.model_id};
    for (size_t i = 0; i < columns.size(); ++i) {
      line.push_back(FormatFixed3(r.values[i]));
      line.push_back(r.deltas.empty() ? "" : FormatSigned3(r.deltas[i]));
    }
    line.push_back(FormatFixed3(r.overall));
    line.push_back(r.overall_delta ? FormatSigned3(*r.overall_delta) : "");
    cells.push_back(line);
  }
  std::vector<size_t> widths(header.size(), 0);
  for (const auto& line : cells) {
    for (size_t i = 0; i < line.size(); ++i) widths[i] = std::max(widths[i], line[i].size());
  }
  std::string out;
  for (const auto& line : cells) {
    std::string text;
    for (size_t i = 0; i < line.size(); ++i) {
      if (i > 0) text += "  ";
      if (i == 0) {
        text += line[i] + std::string(widths[i] - line[i].size(), ' ');
      } else {
        text += std::string(widths[i] - line[i].size(), ' ') + line[i];
      }
    }
    while (!text.empty() && text.back() == ' ') text.pop_back();
    out += text + "\n";
  }
  return out;
}

OrderedJson ScoreReport::ToJson() const {
  OrderedJson rows_json = OrderedJson::array();
  for (const ReportRow& r : rows) {
    OrderedJson metrics = OrderedJson::object();
    for (size_t i = 0; i < columns.size(); ++i) {
      OrderedJson cell = {{"score", FormatFixed3(r.values[i])}};
      if (!r.deltas.empty()) cell["delta"] = FormatSigned3(r.deltas[i]);
      metrics[columns[i]] = cell;
    }
    OrderedJson overall = {{"score", FormatFixed3(r.overall)}};
    if (r.overall_delta) overall["delta"] = FormatSigned3(*r.overall_delta);
    rows_json.push_back({{"model_id", r.model_id},
                         {"reference", r.model_id == reference_model_id},
                         {"metrics", metrics},
                         {"overall", overall}});
  }
  return {{"reference_model_id", reference_model_id},
          {"columns", columns},
          {"rows", rows_json}};
}

ScoreReport BuildReport(const ScoreTable& table, const std::string& reference_model_id) {
  const auto& models = table.models();
  if (std::find(models.begin(), models.end(), reference_model_id) == models.end()) {
    throw ScoringError("reference model not in scores: " + reference_model_id);
  }
  ScoreReport report;
  report.reference_model_id = reference_model_id;
  report.columns = table.columns();
  auto row_for = [&](const std::string& model) {
    ReportRow row;
    row.model_id = model;
    double sum = 0.0;
    for (const std::string& c : report.columns) {
      auto v = table.Get(model, c);
      if (!v) throw ScoringError("missing metric for model " + model + ": " + c);
      row.values.push_back(*v);
      sum += *v;
    }
    if (!report.columns.empty()) {
      row.overall = RoundHalfAway(sum / static_cast<double>(report.columns.size()));
    }
    return row;
  };
  const ReportRow reference = row_for(reference_model_id);
  for (const std::string& model : models) {
    if (model == reference_model_id) continue;
    ReportRow row = row_for(model);
    for (size_t i = 0; i < report.columns.size(); ++i) {
      row.deltas.push_back(RoundHalfAway(reference.values[i] - row.values[i]));
    }
    row.overall_delta = RoundHalfAway(reference.overall - row.overall);
    report.rows.push_back(std::move(row));
  }
  report.rows.push_back(reference);
  return report;
}

}  // namespace geocorpus
