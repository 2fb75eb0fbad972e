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

#ifndef GEOCORPUS_TESTS_TEST_UTIL_H_
#define GEOCORPUS_TESTS_TEST_UTIL_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "geocorpus/corpus_model.h"
#include "geocorpus/numeric.h"

namespace geocorpus::testing {

// Fresh empty directory under the system temp dir, removed by the destructor.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "geocorpus");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::string& path() const { return path_; }
  std::string File(const std::string& name) const;

 private:
  std::string path_;
};

std::string SourcePath(const std::string& relative);

struct CommandResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Random source text in `language`. Lines are statements, comment-only
// lines or blank lines; the generator records which is which so tests do not
// rely on the library's own line classifier.
struct GeneratedCode {
  std::string content;
  // Content of each statement line, without terminator, in order.
  std::vector<std::string> statements;
};
GeneratedCode RandomCode(DeterministicRng& rng, Language language, size_t statements);

// Runs the CLI with `args` (no shell interpretation of the arguments).
CommandResult RunCli(const std::vector<std::string>& args);

// Runs every subcommand offline against the shipped fixtures and the stub
// generation client, writing one subdirectory per step under `dir`. Returns
// the first failing step's result, or the last result when all succeed.
struct PipelineRun {
  bool ok = false;
  std::string failed_step;
  CommandResult last;
};
PipelineRun RunStubPipeline(const std::string& dir, uint64_t seed);

// path (relative to `dir`) -> SHA-256 of every regular file below `dir`,
// skipping run manifests.
std::map<std::string, std::string> HashTree(const std::string& dir);

}  // namespace geocorpus::testing

#endif  // GEOCORPUS_TESTS_TEST_UTIL_H_
