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

// Source ingestion: manifest-driven reading of JSONL/CSV sources into
// validated corpus records, an inventory report, and fine-tuning corpus
// mixing.

#ifndef GEOCORPUS_INGEST_H_
#define GEOCORPUS_INGEST_H_

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "geocorpus/corpus_model.h"

namespace geocorpus {

enum class SourceFormat { kJsonl, kCsv };

std::string_view ToString(SourceFormat f);

struct ManifestEntry {
  std::string path;  // resolved against the manifest's directory
  DocumentKind kind = DocumentKind::kCode;
  SourceFormat format = SourceFormat::kJsonl;
  // Defaults applied to records that leave these fields empty.
  std::string platform;
  std::string library;
  std::string language;
  // Source column/key -> canonical field name. Unlisted columns keep their
  // own names.
  std::map<std::string, std::string> columns;
};

struct CorpusManifest {
  std::vector<ManifestEntry> entries;
  uint64_t seed = 0;
  // Empty disables the allow-list check.
  std::optional<AllowList> allow;
};

// Throws std::runtime_error naming the problem (unreadable file, duplicate
// entry path, unknown kind/format).
CorpusManifest LoadManifest(const std::string& path);
CorpusManifest ManifestFromJson(const Json& j, const std::string& base_dir);

struct InventoryRow {
  DocumentKind kind;
  std::string platform;
  std::string library;
  std::string language;
  SourceFormat format;
  uint64_t count = 0;
  uint64_t bytes = 0;

  auto Key() const {
    return std::tie(kind, platform, library, language, format);
  }
  bool operator==(const InventoryRow&) const = default;
};

struct KindTotal {
  uint64_t count = 0;
  uint64_t bytes = 0;
};

// Merge is associative and commutative; rows are kept sorted by key.
class InventoryReport {
 public:
  void Add(DocumentKind kind, const std::string& platform,
           const std::string& library, const std::string& language,
           SourceFormat format, uint64_t bytes);
  void Merge(const InventoryReport& other);

  const std::vector<InventoryRow>& rows() const { return rows_; }
  std::map<DocumentKind, KindTotal> Totals() const;
  bool empty() const { return rows_.empty(); }

  // Aligned text table; each kind's rows followed by an "Overall" row.
  std::string ToTable() const;
  OrderedJson ToJson() const;

  bool operator==(const InventoryReport&) const = default;

 private:
  std::vector<InventoryRow> rows_;
};

struct Reject {
  std::string path;
  size_t line = 0;
  std::string violation;

  bool operator==(const Reject&) const = default;
};

struct FileStats {
  std::string path;
  uint64_t records_read = 0;
  uint64_t accepted = 0;
  uint64_t rejected = 0;
};

struct Corpus {
  std::vector<CodeDocument> code;
  std::vector<OperatorDocument> operators;
  std::vector<DatasetDocument> datasets;
  std::vector<EncyclopedicDocument> encyclopedic;

  size_t size() const {
    return code.size() + operators.size() + datasets.size() + encyclopedic.size();
  }
  bool operator==(const Corpus&) const = default;
};

struct IngestResult {
  Corpus corpus;
  InventoryReport report;
  std::vector<Reject> rejects;
  std::vector<FileStats> files;
};

// Fatal file-level problem: unreadable path or malformed CSV header.
class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Files are parsed in parallel (up to `jobs` workers); validation and id
// uniqueness are then applied in manifest order so results do not depend on
// scheduling.
IngestResult IngestSources(const CorpusManifest& manifest, int jobs = 1);

// Writes <dir>/{code,operator,dataset,encyclopedic}.jsonl, inventory.txt,
// inventory.json and rejects.jsonl. Returns the written paths.
std::vector<std::string> WriteIngestOutputs(const IngestResult& result,
                                            const std::string& dir);

std::vector<Document> ReadCorpusJsonl(const std::string& path, DocumentKind kind);

// One source of triples for the fine-tuning mix.
struct SftPart {
  std::string name;
  std::vector<InstructionTriple> triples;
  // nullopt takes everything.
  std::optional<size_t> take;
};

// Samples `take` triples from each part (seeded per part name), concatenates
// in part order, drops (instruct, input) duplicates keeping the first, then
// shuffles the result with `seed`. Throws std::invalid_argument naming the
// part when a take exceeds its size.
std::vector<InstructionTriple> AssembleSftCorpus(const std::vector<SftPart>& parts,
                                                 uint64_t seed);

}  // namespace geocorpus

#endif  // GEOCORPUS_INGEST_H_
