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

// Rule masking: split code into prefix/middle/suffix by statement count and
// build one completion triple per hidden segment.
//
// A statement is a physical line that is neither blank nor comment-only.
// Blank and comment lines belong to the segment of the next statement;
// trailing ones after the last statement belong to the suffix.

#ifndef GEOCORPUS_MASKING_H_
#define GEOCORPUS_MASKING_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geocorpus/corpus_model.h"

namespace geocorpus {

enum class BoundaryRule { kRemainderToEarlierSegments };

enum class MaskPart { kPrefix, kMiddle, kSuffix };

std::string_view ToString(MaskPart p);

struct MaskSplit {
  std::string prefix;
  std::string middle;
  std::string suffix;
  BoundaryRule boundary_rule = BoundaryRule::kRemainderToEarlierSegments;
  std::array<size_t, 3> statement_counts{};

  std::string Reassemble() const { return prefix + middle + suffix; }
};

bool IsCommentLine(std::string_view line, Language language);
bool IsStatementLine(std::string_view line, Language language);
size_t CountStatements(std::string_view content, Language language);

// Segment sizes for n statements: 9 -> 3/3/3, 10 -> 4/3/3, 11 -> 4/4/3.
std::array<size_t, 3> SegmentSizes(size_t statements);

// nullopt when the content has fewer than 3 statements.
std::optional<MaskSplit> SplitForMasking(std::string_view content, Language language);

struct MaskTemplates {
  // {part} is replaced by "prefix", "middle" or "suffix"; {language} by the
  // document language.
  std::string instruct_pattern =
      "Complete the missing {part} of the following {language} code.";
  // Placed where the middle segment was removed.
  std::string middle_marker = "<MASK>\n";

  // Reads <dir>/mask_instruct.txt and optionally <dir>/mask_marker.txt.
  static MaskTemplates LoadDirectory(const std::string& dir);
};

struct MaskOptions {
  // Probability of keeping each masked variant; 1 keeps all three.
  double sample_ratio = 1.0;
  uint64_t seed = 0;
};

struct MaskResult {
  std::vector<InstructionTriple> triples;
  std::optional<MaskSplit> split;
  // "too short" when the document was skipped.
  std::string reject_reason;
};

MaskResult MaskCode(const CodeDocument& doc, const MaskTemplates& templates = {},
                    const MaskOptions& options = {});

}  // namespace geocorpus

#endif  // GEOCORPUS_MASKING_H_
