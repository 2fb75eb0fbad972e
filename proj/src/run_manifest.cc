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

#include "geocorpus/run_manifest.h"

#include <algorithm>
#include <filesystem>

#include "geocorpus/hashing.h"
#include "geocorpus/text_util.h"

namespace geocorpus {
namespace {

namespace fs = std::filesystem;

std::vector<std::string> RegularFiles(const std::string& path) {
  if (!fs::is_directory(path)) return {path};
  std::vector<std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(path)) {
    if (e.is_regular_file()) files.push_back(e.path().generic_string());
  }
  std::sort(files.begin(), files.end());
  return files;
}

OrderedJson Digests(const std::vector<FileDigest>& files) {
  OrderedJson out = OrderedJson::array();
  for (const FileDigest& f : files) out.push_back({{"path", f.path}, {"sha256", f.sha256}});
  return out;
}

}  // namespace

RunManifest::RunManifest(std::string subcommand, std::string out_dir)
    : subcommand_(std::move(subcommand)), out_dir_(std::move(out_dir)) {}

void RunManifest::SetOption(const std::string& name, const std::string& value) {
  options_[name] = value;
}

void RunManifest::AddInput(const std::string& path) {
  for (const std::string& f : RegularFiles(path)) inputs_.push_back({f, Sha256File(f)});
}

void RunManifest::AddOutput(const std::string& path) {
  for (const std::string& f : RegularFiles(path)) {
    std::string rel = fs::path(f).lexically_relative(out_dir_).generic_string();
    if (rel.empty() || rel.rfind("..", 0) == 0) rel = fs::path(f).generic_string();
    auto it = std::find_if(outputs_.begin(), outputs_.end(),
                           [&](const FileDigest& d) { return d.path == rel; });
    if (it != outputs_.end()) {
      it->sha256 = Sha256File(f);
    } else {
      outputs_.push_back({rel, Sha256File(f)});
    }
  }
}

OrderedJson RunManifest::ToJson() const {
  OrderedJson j = {{"subcommand", subcommand_}, {"version", kGeocorpusVersion}};
  j["seed"] = seed_ ? OrderedJson(*seed_) : OrderedJson(nullptr);
  OrderedJson options = OrderedJson::object();
  for (const auto& [k, v] : options_) options[k] = v;
  j["options"] = options;
  j["inputs"] = Digests(inputs_);
  std::vector<FileDigest> outputs = outputs_;
  std::sort(outputs.begin(), outputs.end(),
            [](const FileDigest& a, const FileDigest& b) { return a.path < b.path; });
  j["outputs"] = Digests(outputs);
  return j;
}

std::string RunManifest::Write() const {
  const std::string path = (fs::path(out_dir_) / "run_manifest.json").string();
  WriteFile(path, ToJson().dump(2) + "\n");
  return path;
}

}  // namespace geocorpus
