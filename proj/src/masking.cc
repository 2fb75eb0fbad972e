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

#include "geocorpus/masking.h"

#include <filesystem>

#include "geocorpus/numeric.h"
#include "geocorpus/text_util.h"

namespace geocorpus {
namespace {

std::string_view CommentLeader(Language language) {
  switch (language) {
    case Language::kJavaScript: return "//";
    case Language::kPython: return "#";
    case Language::kR: return "#";
    case Language::kMatlab: return "%";
    case Language::kNaturalLanguage: return "";
  }
  return "";
}

}  // namespace

std::string_view ToString(MaskPart p) {
  switch (p) {
    case MaskPart::kPrefix: return "prefix";
    case MaskPart::kMiddle: return "middle";
    case MaskPart::kSuffix: return "suffix";
  }
  return "?";
}

bool IsCommentLine(std::string_view line, Language language) {
  const std::string_view leader = CommentLeader(language);
  const std::string_view t = Trim(line);
  return !leader.empty() && t.substr(0, leader.size()) == leader;
}

bool IsStatementLine(std::string_view line, Language language) {
  return !Trim(line).empty() && !IsCommentLine(line, language);
}

size_t CountStatements(std::string_view content, Language language) {
  size_t n = 0;
  for (std::string_view line : SplitLinesKeepEnds(content)) {
    if (IsStatementLine(line, language)) ++n;
  }
  return n;
}

std::array<size_t, 3> SegmentSizes(size_t statements) {
  const size_t base = statements / 3;
  const size_t rem = statements % 3;
  return {base + (rem > 0 ? 1 : 0), base + (rem > 1 ? 1 : 0), base};
}

std::optional<MaskSplit> SplitForMasking(std::string_view content, Language language) {
  const std::vector<std::string_view> lines = SplitLinesKeepEnds(content);
  std::vector<size_t> statement_lines;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (IsStatementLine(lines[i], language)) statement_lines.push_back(i);
  }
  if (statement_lines.size() < 3) return std::nullopt;

  const auto sizes = SegmentSizes(statement_lines.size());
  // A segment starts on the line after the previous segment's last statement,
  // so leading blank/comment lines travel with the statement that follows.
  const size_t middle_first_line = statement_lines[sizes[0] - 1] + 1;
  const size_t suffix_first_line = statement_lines[sizes[0] + sizes[1] - 1] + 1;

  auto offset_of_line = [&](size_t line_index) {
    size_t off = 0;
    for (size_t i = 0; i < line_index && i < lines.size(); ++i) off += lines[i].size();
    return off;
  };
  const size_t middle_off = offset_of_line(middle_first_line);
  const size_t suffix_off = offset_of_line(suffix_first_line);

  MaskSplit split;
  split.prefix = std::string(content.substr(0, middle_off));
  split.middle = std::string(content.substr(middle_off, suffix_off - middle_off));
  split.suffix = std::string(content.substr(suffix_off));
  split.statement_counts = sizes;
  return split;
}

MaskTemplates MaskTemplates::LoadDirectory(const std::string& dir) {
  namespace fs = std::filesystem;
  MaskTemplates t;
  auto strip = [](std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
  };
  t.instruct_pattern = strip(ReadFile((fs::path(dir) / "mask_instruct.txt").string()));
  const fs::path marker = fs::path(dir) / "mask_marker.txt";
  if (fs::exists(marker)) t.middle_marker = strip(ReadFile(marker.string())) + "\n";
  return t;
}

MaskResult MaskCode(const CodeDocument& doc, const MaskTemplates& templates,
                    const MaskOptions& options) {
  MaskResult result;
  result.split = SplitForMasking(doc.content, doc.language);
  if (!result.split) {
    result.reject_reason = "too short";
    return result;
  }
  const MaskSplit& s = *result.split;
  for (MaskPart part : {MaskPart::kPrefix, MaskPart::kMiddle, MaskPart::kSuffix}) {
    if (options.sample_ratio < 1.0) {
      DeterministicRng rng(
          MixSeed(options.seed, doc.code_id + "/" + std::string(ToString(part))));
      if (rng.Unit() >= options.sample_ratio) continue;
    }
    std::string instruct = ReplaceAll(templates.instruct_pattern, "{part}", ToString(part));
    instruct = ReplaceAll(std::move(instruct), "{language}", ToString(doc.language));
    std::string input;
    std::string output;
    switch (part) {
      case MaskPart::kPrefix:
        input = s.middle + s.suffix;
        output = s.prefix;
        break;
      case MaskPart::kMiddle:
        input = s.prefix + templates.middle_marker + s.suffix;
        output = s.middle;
        break;
      case MaskPart::kSuffix:
        input = s.prefix + s.middle;
        output = s.suffix;
        break;
    }
    result.triples.push_back(MakeTriple(GenerationMethod::kRuleMask,
                                        TaskKind::kCodeCompletion, std::move(instruct),
                                        std::move(input), std::move(output),
                                        {doc.code_id}));
  }
  return result;
}

}  // namespace geocorpus
