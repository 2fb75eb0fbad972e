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

#include "geocorpus/ingest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "geocorpus/csv.h"
#include "geocorpus/numeric.h"
#include "geocorpus/parallel.h"
#include "geocorpus/self_instruct.h"
#include "geocorpus/text_util.h"

namespace geocorpus {
namespace {

namespace fs = std::filesystem;

// Fields that must be present as CSV columns for each kind.
std::vector<std::string> RequiredColumns(DocumentKind kind) {
  switch (kind) {
    case DocumentKind::kCode: return {"content"};
    case DocumentKind::kOperator: return {"full_name"};
    case DocumentKind::kDataset: return {"name"};
    case DocumentKind::kEncyclopedic: return {"name", "text"};
  }
  return {};
}

struct RawRecord {
  size_t line = 0;
  Json value;  // object with canonical field names, or null on parse failure
  std::string parse_error;
};

struct ParsedFile {
  std::vector<RawRecord> records;
};

Json ApplyColumnMap(const Json& in, const std::map<std::string, std::string>& columns) {
  if (columns.empty() || !in.is_object()) return in;
  Json out = Json::object();
  for (const auto& [key, value] : in.items()) {
    auto it = columns.find(key);
    out[it == columns.end() ? key : it->second] = value;
  }
  return out;
}

void ApplyDefaults(Json& record, const ManifestEntry& entry) {
  if (!record.is_object()) return;
  auto fill = [&](const char* key, const std::string& value) {
    if (value.empty()) return;
    auto it = record.find(key);
    if (it == record.end() || it->is_null() ||
        (it->is_string() && Trim(it->get<std::string>()).empty())) {
      record[key] = value;
    }
  };
  if (entry.kind == DocumentKind::kCode || entry.kind == DocumentKind::kOperator) {
    fill("platform", entry.platform);
    fill("language", entry.language);
    fill(entry.kind == DocumentKind::kCode ? "library" : "library_name",
         entry.library);
  }
  if (entry.kind == DocumentKind::kDataset) fill("provide", entry.platform);
}

ParsedFile ParseJsonl(const ManifestEntry& entry, const std::string& text) {
  ParsedFile out;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    RawRecord rec;
    rec.line = lineno;
    try {
      rec.value = ApplyColumnMap(Json::parse(line), entry.columns);
    } catch (const Json::parse_error&) {
      rec.parse_error = "malformed json";
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

ParsedFile ParseCsvFile(const ManifestEntry& entry, const std::string& text) {
  std::vector<CsvRow> rows;
  try {
    rows = ParseCsv(text);
  } catch (const std::invalid_argument& e) {
    throw IngestError(entry.path + ": " + e.what());
  }
  ParsedFile out;
  if (rows.empty()) return out;
  std::vector<std::string> header;
  for (const std::string& h : rows.front().cells) {
    std::string name(Trim(h));
    auto it = entry.columns.find(name);
    header.push_back(it == entry.columns.end() ? name : it->second);
  }
  std::vector<std::string> missing;
  for (const std::string& required : RequiredColumns(entry.kind)) {
    if (std::find(header.begin(), header.end(), required) == header.end()) {
      missing.push_back(required);
    }
  }
  if (!missing.empty()) {
    throw IngestError("malformed CSV header in " + entry.path +
                      ": missing columns: " + Join(missing, ", "));
  }
  for (size_t r = 1; r < rows.size(); ++r) {
    RawRecord rec;
    rec.line = rows[r].line;
    if (rows[r].cells.size() != header.size()) {
      rec.parse_error = "expected " + std::to_string(header.size()) +
                        " cells, found " + std::to_string(rows[r].cells.size());
    } else {
      rec.value = Json::object();
      for (size_t c = 0; c < header.size(); ++c) {
        rec.value[header[c]] = rows[r].cells[c];
      }
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

ParsedFile ParseSource(const ManifestEntry& entry) {
  std::string text;
  try {
    text = ReadFile(entry.path);
  } catch (const std::exception&) {
    throw IngestError("unreadable source: " + entry.path);
  }
  return entry.format == SourceFormat::kCsv ? ParseCsvFile(entry, text)
                                             : ParseJsonl(entry, text);
}

std::string PlatformOf(const Document& doc) {
  return std::visit(
      [](const auto& d) -> std::string {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, CodeDocument> ||
                      std::is_same_v<T, OperatorDocument>) {
          return d.platform;
        } else if constexpr (std::is_same_v<T, DatasetDocument>) {
          return d.provide;
        } else {
          return "";
        }
      },
      doc);
}

std::string LibraryOf(const Document& doc) {
  if (const auto* c = std::get_if<CodeDocument>(&doc)) return c->library;
  if (const auto* o = std::get_if<OperatorDocument>(&doc)) return o->library_name;
  return "";
}

std::string LanguageOf(const Document& doc) {
  if (const auto* c = std::get_if<CodeDocument>(&doc)) {
    return std::string(ToString(c->language));
  }
  if (const auto* o = std::get_if<OperatorDocument>(&doc)) {
    return std::string(ToString(o->language));
  }
  if (std::holds_alternative<EncyclopedicDocument>(doc)) {
    return std::string(ToString(Language::kNaturalLanguage));
  }
  return "";
}

void AddToCorpus(Corpus& corpus, Document doc) {
  std::visit(
      [&](auto&& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, CodeDocument>) corpus.code.push_back(std::move(d));
        if constexpr (std::is_same_v<T, OperatorDocument>) {
          corpus.operators.push_back(std::move(d));
        }
        if constexpr (std::is_same_v<T, DatasetDocument>) {
          corpus.datasets.push_back(std::move(d));
        }
        if constexpr (std::is_same_v<T, EncyclopedicDocument>) {
          corpus.encyclopedic.push_back(std::move(d));
        }
      },
      std::move(doc));
}

std::string PadRight(const std::string& s, size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

std::string_view ToString(SourceFormat f) {
  return f == SourceFormat::kCsv ? "csv" : "jsonl";
}

CorpusManifest ManifestFromJson(const Json& j, const std::string& base_dir) {
  CorpusManifest m;
  m.seed = j.value("seed", uint64_t{0});
  if (j.value("allow_list", true)) {
    m.allow = AllowList::Default();
    if (auto it = j.find("platforms"); it != j.end()) {
      for (const auto& p : *it) m.allow->platforms.insert(p.get<std::string>());
    }
    if (auto it = j.find("libraries"); it != j.end()) {
      for (const auto& l : *it) m.allow->libraries.insert(l.get<std::string>());
    }
  }
  std::set<std::string> seen;
  for (const auto& e : j.value("entries", Json::array())) {
    ManifestEntry entry;
    const std::string raw_path = e.at("path").get<std::string>();
    fs::path p(raw_path);
    entry.path = (p.is_absolute() || base_dir.empty())
                     ? p.lexically_normal().string()
                     : (fs::path(base_dir) / p).lexically_normal().string();
    if (!seen.insert(entry.path).second) {
      throw std::runtime_error("duplicate manifest entry path: " + raw_path);
    }
    const std::string kind = e.at("kind").get<std::string>();
    auto k = ParseDocumentKind(kind);
    if (!k) throw std::runtime_error("unknown document kind in manifest: " + kind);
    entry.kind = *k;
    std::string format = ToLower(e.value("format", ""));
    if (format.empty()) {
      format = p.extension() == ".csv" ? "csv" : "jsonl";
    }
    if (format == "csv") {
      entry.format = SourceFormat::kCsv;
    } else if (format == "jsonl" || format == "json" || format == "ndjson") {
      entry.format = SourceFormat::kJsonl;
    } else {
      throw std::runtime_error("unknown source format in manifest: " + format);
    }
    entry.platform = e.value("platform", "");
    entry.library = e.value("library", "");
    entry.language = e.value("language", "");
    if (auto it = e.find("columns"); it != e.end()) {
      entry.columns = it->get<std::map<std::string, std::string>>();
    }
    m.entries.push_back(std::move(entry));
  }
  return m;
}

CorpusManifest LoadManifest(const std::string& path) {
  std::string text;
  try {
    text = ReadFile(path);
  } catch (const std::exception&) {
    throw IngestError("unreadable manifest: " + path);
  }
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw std::runtime_error("malformed manifest " + path + ": " + e.what());
  }
  return ManifestFromJson(j, fs::path(path).parent_path().string());
}

void InventoryReport::Add(DocumentKind kind, const std::string& platform,
                          const std::string& library, const std::string& language,
                          SourceFormat format, uint64_t bytes) {
  InventoryRow probe{kind, platform, library, language, format, 1, bytes};
  auto it = std::lower_bound(rows_.begin(), rows_.end(), probe,
                             [](const InventoryRow& a, const InventoryRow& b) {
                               return a.Key() < b.Key();
                             });
  if (it != rows_.end() && it->Key() == probe.Key()) {
    it->count += 1;
    it->bytes += bytes;
  } else {
    rows_.insert(it, probe);
  }
}

void InventoryReport::Merge(const InventoryReport& other) {
  for (const InventoryRow& row : other.rows_) {
    auto it = std::lower_bound(rows_.begin(), rows_.end(), row,
                               [](const InventoryRow& a, const InventoryRow& b) {
                                 return a.Key() < b.Key();
                               });
    if (it != rows_.end() && it->Key() == row.Key()) {
      it->count += row.count;
      it->bytes += row.bytes;
    } else {
      rows_.insert(it, row);
    }
  }
}

std::map<DocumentKind, KindTotal> InventoryReport::Totals() const {
  std::map<DocumentKind, KindTotal> totals;
  for (const InventoryRow& row : rows_) {
    totals[row.kind].count += row.count;
    totals[row.kind].bytes += row.bytes;
  }
  return totals;
}

std::string InventoryReport::ToTable() const {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"Kind", "Platform", "Library", "Language", "Format", "Quantity",
                   "Bytes"});
  const auto totals = Totals();
  for (size_t i = 0; i < rows_.size(); ++i) {
    const InventoryRow& r = rows_[i];
    cells.push_back({std::string(geocorpus::ToString(r.kind)), r.platform,
                     r.library.empty() ? "/" : r.library,
                     r.language.empty() ? "/" : r.language,
                     std::string(geocorpus::ToString(r.format)),
                     std::to_string(r.count), std::to_string(r.bytes)});
    if (i + 1 == rows_.size() || rows_[i + 1].kind != r.kind) {
      const KindTotal& t = totals.at(r.kind);
      cells.push_back({std::string(geocorpus::ToString(r.kind)), "Overall", "", "", "",
                       std::to_string(t.count), std::to_string(t.bytes)});
    }
  }
  std::vector<size_t> widths(cells.front().size(), 0);
  for (const auto& row : cells) {
    for (size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  }
  std::string out;
  for (const auto& row : cells) {
    std::string line;
    for (size_t c = 0; c < row.size(); ++c) {
      line += PadRight(row[c], widths[c]);
      if (c + 1 < row.size()) line += "  ";
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

OrderedJson InventoryReport::ToJson() const {
  OrderedJson rows = OrderedJson::array();
  for (const InventoryRow& r : rows_) {
    rows.push_back({{"kind", geocorpus::ToString(r.kind)},
                    {"platform", r.platform},
                    {"library", r.library},
                    {"language", r.language},
                    {"format", geocorpus::ToString(r.format)},
                    {"count", r.count},
                    {"bytes", r.bytes}});
  }
  OrderedJson totals = OrderedJson::object();
  for (const auto& [kind, t] : Totals()) {
    totals[std::string(geocorpus::ToString(kind))] = {{"count", t.count},
                                                      {"bytes", t.bytes}};
  }
  return {{"rows", rows}, {"totals", totals}};
}

IngestResult IngestSources(const CorpusManifest& manifest, int jobs) {
  std::vector<ParsedFile> parsed(manifest.entries.size());
  ParallelFor(manifest.entries.size(), jobs,
              [&](size_t i) { parsed[i] = ParseSource(manifest.entries[i]); });

  IngestResult result;
  const AllowList* allow = manifest.allow ? &*manifest.allow : nullptr;
  std::set<std::pair<DocumentKind, std::string>> seen_ids;
  for (size_t i = 0; i < manifest.entries.size(); ++i) {
    const ManifestEntry& entry = manifest.entries[i];
    FileStats stats;
    stats.path = entry.path;
    for (RawRecord& rec : parsed[i].records) {
      ++stats.records_read;
      auto reject = [&](const std::string& why) {
        ++stats.rejected;
        result.rejects.push_back({entry.path, rec.line, why});
      };
      if (!rec.parse_error.empty()) {
        reject(rec.parse_error);
        continue;
      }
      ApplyDefaults(rec.value, entry);
      Document doc;
      try {
        doc = DocumentFromJson(entry.kind, rec.value);
      } catch (const std::exception& e) {
        reject(e.what());
        continue;
      }
      AssignMissingId(doc);
      ValidationResult v = ValidateDocument(doc, allow);
      if (v.ok() && !seen_ids.emplace(entry.kind, DocumentId(doc)).second) {
        v.violations.push_back("duplicate id");
      }
      if (!v.ok()) {
        reject(Join(v.violations, "; "));
        continue;
      }
      ++stats.accepted;
      result.report.Add(entry.kind, PlatformOf(doc), LibraryOf(doc), LanguageOf(doc),
                        entry.format, ToJsonLine(doc).size() + 1);
      AddToCorpus(result.corpus, std::move(doc));
    }
    result.files.push_back(std::move(stats));
  }
  return result;
}

std::vector<std::string> WriteIngestOutputs(const IngestResult& result,
                                            const std::string& dir) {
  fs::create_directories(dir);
  std::vector<std::string> written;
  auto write_docs = [&](const std::string& name, const auto& docs) {
    std::string text;
    for (const auto& d : docs) text += ToJsonLine(Document(d)) + "\n";
    const std::string path = (fs::path(dir) / name).string();
    WriteFile(path, text);
    written.push_back(path);
  };
  write_docs("code.jsonl", result.corpus.code);
  write_docs("operator.jsonl", result.corpus.operators);
  write_docs("dataset.jsonl", result.corpus.datasets);
  write_docs("encyclopedic.jsonl", result.corpus.encyclopedic);

  std::string rejects;
  for (const Reject& r : result.rejects) {
    rejects += OrderedJson{{"path", r.path}, {"line", r.line}, {"violation", r.violation}}
                   .dump() +
               "\n";
  }
  const std::string paths[] = {(fs::path(dir) / "inventory.txt").string(),
                               (fs::path(dir) / "inventory.json").string(),
                               (fs::path(dir) / "rejects.jsonl").string()};
  WriteFile(paths[0], result.report.ToTable());
  WriteFile(paths[1], result.report.ToJson().dump(2) + "\n");
  WriteFile(paths[2], rejects);
  written.insert(written.end(), std::begin(paths), std::end(paths));
  return written;
}

std::vector<Document> ReadCorpusJsonl(const std::string& path, DocumentKind kind) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::vector<Document> docs;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    try {
      docs.push_back(DocumentFromJson(kind, Json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return docs;
}

std::vector<InstructionTriple> AssembleSftCorpus(const std::vector<SftPart>& parts,
                                                 uint64_t seed) {
  std::vector<InstructionTriple> mixed;
  for (const SftPart& part : parts) {
    if (!part.take || *part.take == part.triples.size()) {
      mixed.insert(mixed.end(), part.triples.begin(), part.triples.end());
      continue;
    }
    if (*part.take > part.triples.size()) {
      throw std::invalid_argument("part '" + part.name + "': take " +
                                  std::to_string(*part.take) + " exceeds size " +
                                  std::to_string(part.triples.size()));
    }
    // Sample by shuffling indices so the kept subset keeps source order.
    std::vector<size_t> idx(part.triples.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    DeterministicRng rng(MixSeed(seed, part.name));
    DeterministicShuffle(idx, rng);
    idx.resize(*part.take);
    std::sort(idx.begin(), idx.end());
    for (size_t i : idx) mixed.push_back(part.triples[i]);
  }
  mixed = DedupTriples(std::move(mixed));
  DeterministicRng rng(MixSeed(seed, "assemble"));
  DeterministicShuffle(mixed, rng);
  return mixed;
}

}  // namespace geocorpus
