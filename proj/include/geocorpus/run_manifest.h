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

// Provenance record written next to every command's outputs. It holds no
// timestamps or host details, so identical runs produce identical files.

#ifndef GEOCORPUS_RUN_MANIFEST_H_
#define GEOCORPUS_RUN_MANIFEST_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geocorpus/corpus_model.h"

namespace geocorpus {

inline constexpr const char kGeocorpusVersion[] = "0.1.0";

struct FileDigest {
  std::string path;
  std::string sha256;
};

class RunManifest {
 public:
  RunManifest(std::string subcommand, std::string out_dir);

  void SetSeed(uint64_t seed) { seed_ = seed; }
  void SetOption(const std::string& name, const std::string& value);
  // Hashes the file now. Directories are expanded to their regular files.
  void AddInput(const std::string& path);
  // Records outputs relative to the output directory.
  void AddOutput(const std::string& path);

  OrderedJson ToJson() const;
  // Writes <out_dir>/run_manifest.json and returns its path.
  std::string Write() const;

 private:
  std::string subcommand_;
  std::string out_dir_;
  std::optional<uint64_t> seed_;
  std::map<std::string, std::string> options_;
  std::vector<FileDigest> inputs_;
  std::vector<FileDigest> outputs_;
};

}  // namespace geocorpus

#endif  // GEOCORPUS_RUN_MANIFEST_H_
