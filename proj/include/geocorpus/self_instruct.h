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

// Model-assisted instruction synthesis.
//
// Two routes: code -> summary through an intermediate generation, paired in
// both directions; and one-shot extraction, where a worked example plus a
// source document prompts the model to emit labeled triple blocks:
//
//   ```
//   INSTRUCT: <task description>
//   INPUT: <input, may be empty>
//   OUTPUT: <answer>
//   ```

#ifndef GEOCORPUS_SELF_INSTRUCT_H_
#define GEOCORPUS_SELF_INSTRUCT_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "geocorpus/corpus_model.h"
#include "geocorpus/generation.h"

namespace geocorpus {

struct SkipRecord {
  std::string source_id;
  std::string reason;

  bool operator==(const SkipRecord&) const = default;
};

struct SelfInstructResult {
  std::vector<InstructionTriple> triples;
  std::vector<SkipRecord> skips;
};

class SelfInstructError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SummaryPromptTemplates {
  // Placeholders: {language}, {platform}, {code}.
  std::string summary_prompt =
      "You are an expert in geospatial programming. Summarize what the following "
      "{language} code for {platform} does. Cover the datasets used, the spatial "
      "and temporal scope, the input and output data, and the processing steps. "
      "Reply with the summary only.\n\n```\n{code}\n```\n";
  std::string summarize_instruct =
      "Summarize the functionality of the following geospatial code.";
  // Placeholders: {language}, {platform}.
  std::string generate_instruct =
      "Write {language} code for {platform} that implements the following "
      "description.";

  // Reads summary_prompt.txt, summarize_instruct.txt and
  // generate_instruct.txt from `dir`; missing files keep the defaults.
  static SummaryPromptTemplates LoadDirectory(const std::string& dir);
};

// Candidate filter for summary generation.
struct CodeSelection {
  size_t min_statements = 3;
  bool require_comment = true;
};

struct SummaryPairsConfig {
  SummaryPromptTemplates templates;
  CodeSelection selection;
  int max_output_tokens = 512;
  double temperature = 0.0;
  // Fraction of selected documents whose generation failed in transport.
  double max_failure_rate = 0.5;
  // 0 keeps every selected document; otherwise a seeded sample of this size.
  size_t max_documents = 0;
  uint64_t seed = 0;
};

bool IsHighQualityCode(const CodeDocument& doc, const CodeSelection& selection);

// Two triples per successful summary: CodeSummarization (code -> summary)
// and CodeGeneration (summary -> code). Output sorted by provenance id.
// Throws SelfInstructError when the transport failure rate exceeds the
// configured maximum.
SelfInstructResult GenerateSummaryPairs(const std::vector<CodeDocument>& docs,
                                        GenerationService& service,
                                        const SummaryPairsConfig& config = {});

struct OneShotConfig {
  // Placeholders: {task_kind}, {exemplar}, {document}.
  std::string prompt_template =
      "You create instruction data for geospatial programming assistants.\n"
      "Task type: {task_kind}.\n\n"
      "Here is a worked example:\n{exemplar}\n\n"
      "Now read the document below and write one or more new instructions of "
      "the same type, grounded only in the document. Write every instruction "
      "as a fenced block with INSTRUCT:, INPUT: and OUTPUT: lines, exactly like "
      "the example.\n\nDocument:\n{document}\n";
  int max_output_tokens = 1024;
  double temperature = 0.0;
  double max_failure_rate = 0.5;

  static OneShotConfig LoadFile(const std::string& path);
};

// The text a document contributes to a one-shot prompt.
std::string DocumentPromptText(const Document& doc);

// Renders a triple as a labeled fenced block.
std::string FormatTripleBlock(const InstructionTriple& t);

struct ParsedTriple {
  std::string instruct;
  std::string input;
  std::string output;
};

// Parses every fenced block that carries non-empty INSTRUCT and OUTPUT.
// Label values continue across lines until the next label or fence.
std::vector<ParsedTriple> ParseTripleBlocks(const std::string& text);

// Throws std::invalid_argument when the exemplar is not a valid triple of
// `kind`.
SelfInstructResult GenerateOneShotInstructions(const std::vector<Document>& docs,
                                               const InstructionTriple& exemplar,
                                               TaskKind kind,
                                               GenerationService& service,
                                               const OneShotConfig& config = {});

// Normalized (instruct, input) key: lowercase, whitespace collapsed.
std::string DedupKey(const InstructionTriple& t);
// Keeps the first triple for each key, preserving order.
std::vector<InstructionTriple> DedupTriples(std::vector<InstructionTriple> triples);

}  // namespace geocorpus

#endif  // GEOCORPUS_SELF_INSTRUCT_H_
