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

#include <gtest/gtest.h>

#include <filesystem>
#include <set>

#include "geocorpus/ingest.h"
#include "geocorpus/numeric.h"
#include "geocorpus/text_util.h"
#include "test_util.h"

namespace geocorpus {
namespace {

using testing::SourcePath;
using testing::TempDir;

TEST(Ingest, FixtureCorpusCountsAndRejects) {
  const CorpusManifest m = LoadManifest(SourcePath("fixtures/corpus/manifest.json"));
  ASSERT_EQ(m.entries.size(), 4u);
  EXPECT_EQ(m.seed, 7u);
  const IngestResult r = IngestSources(m, 4);
  EXPECT_EQ(r.corpus.code.size(), 5u);
  EXPECT_EQ(r.corpus.operators.size(), 4u);
  EXPECT_EQ(r.corpus.datasets.size(), 2u);
  EXPECT_EQ(r.corpus.encyclopedic.size(), 2u);
  ASSERT_EQ(r.rejects.size(), 1u);
  EXPECT_EQ(r.rejects[0].violation, "full_name empty");
  EXPECT_EQ(r.rejects[0].line, 6u);
  const auto totals = r.report.Totals();
  EXPECT_EQ(totals.at(DocumentKind::kCode).count, 5u);
  EXPECT_EQ(totals.at(DocumentKind::kOperator).count, 4u);
}

TEST(Ingest, ResultDoesNotDependOnJobs) {
  const CorpusManifest m = LoadManifest(SourcePath("fixtures/corpus/manifest.json"));
  const IngestResult one = IngestSources(m, 1);
  const IngestResult many = IngestSources(m, 8);
  EXPECT_EQ(one.corpus, many.corpus);
  EXPECT_EQ(one.report, many.report);
  EXPECT_EQ(one.rejects, many.rejects);
}

TEST(Ingest, CsvColumnMappingDefaultsAndBadRows) {
  TempDir dir;
  WriteFile(dir.File("code.csv"),
            "id,lang,body\n"
            "a1,Python,\"import gdal\nx = 1\"\n"
            "a2,Fortran,print *\n"
            "a1,Python,duplicate\n"
            ",R,x <- 1\n");
  WriteFile(dir.File("m.json"), R"({"allow_list": false, "entries": [
    {"path": "code.csv", "kind": "code", "platform": "GDAL", "library": "GDAL",
     "columns": {"id": "code_id", "lang": "language", "body": "content"}}]})");
  const IngestResult r = IngestSources(LoadManifest(dir.File("m.json")));
  ASSERT_EQ(r.corpus.code.size(), 2u);
  EXPECT_EQ(r.corpus.code[0].content, "import gdal\nx = 1");
  EXPECT_EQ(r.corpus.code[0].platform, "GDAL");
  // Row without an id receives a content hash.
  EXPECT_FALSE(r.corpus.code[1].code_id.empty());
  ASSERT_EQ(r.rejects.size(), 2u);
  EXPECT_NE(r.rejects[0].violation.find("Fortran"), std::string::npos);
  EXPECT_EQ(r.rejects[1].violation, "duplicate id");
}

TEST(Ingest, MalformedJsonLineIsRejectedNotFatal) {
  TempDir dir;
  WriteFile(dir.File("enc.jsonl"),
            "{\"name\": \"A\", \"text\": \"alpha\"}\n{not json\n{\"name\": \"B\", \"text\": \"\"}\n");
  WriteFile(dir.File("m.json"), R"({"entries": [{"path": "enc.jsonl", "kind": "encyclopedic"}]})");
  const IngestResult r = IngestSources(LoadManifest(dir.File("m.json")));
  EXPECT_EQ(r.corpus.encyclopedic.size(), 1u);
  EXPECT_EQ(r.rejects.size(), 2u);
}

TEST(Ingest, ManifestErrors) {
  TempDir dir;
  EXPECT_THROW(LoadManifest(dir.File("missing.json")), IngestError);
  WriteFile(dir.File("dup.json"),
            R"({"entries": [{"path": "a.jsonl", "kind": "code"}, {"path": "a.jsonl", "kind": "code"}]})");
  EXPECT_THROW(LoadManifest(dir.File("dup.json")), std::runtime_error);
  WriteFile(dir.File("kind.json"), R"({"entries": [{"path": "a.jsonl", "kind": "poem"}]})");
  EXPECT_THROW(LoadManifest(dir.File("kind.json")), std::runtime_error);
  WriteFile(dir.File("m.json"), R"({"entries": [{"path": "nope.jsonl", "kind": "code"}]})");
  EXPECT_THROW(IngestSources(LoadManifest(dir.File("m.json"))), IngestError);
}

TEST(Ingest, WritesOutputsThatReadBack) {
  TempDir dir;
  const IngestResult r = IngestSources(LoadManifest(SourcePath("fixtures/corpus/manifest.json")));
  const auto paths = WriteIngestOutputs(r, dir.path());
  EXPECT_EQ(paths.size(), 7u);
  const auto code = ReadCorpusJsonl(dir.File("code.jsonl"), DocumentKind::kCode);
  ASSERT_EQ(code.size(), r.corpus.code.size());
  EXPECT_EQ(std::get<CodeDocument>(code[0]), r.corpus.code[0]);
}

// Merge must be associative and commutative so per-file partial reports can
// be combined in any order.
TEST(InventoryReport, MergeIsAssociativeAndCommutative) {
  DeterministicRng rng(5);
  const char* platforms[] = {"GEE", "ArcGIS", "R"};
  for (int trial = 0; trial < 100; ++trial) {
    InventoryReport parts[3];
    for (auto& p : parts) {
      const int n = static_cast<int>(rng.Below(6));
      for (int i = 0; i < n; ++i) {
        p.Add(static_cast<DocumentKind>(rng.Below(4)), platforms[rng.Below(3)], "lib", "JS",
              SourceFormat::kJsonl, rng.Below(1000));
      }
    }
    InventoryReport ab = parts[0];
    ab.Merge(parts[1]);
    InventoryReport ab_c = ab;
    ab_c.Merge(parts[2]);
    InventoryReport bc = parts[1];
    bc.Merge(parts[2]);
    InventoryReport a_bc = parts[0];
    a_bc.Merge(bc);
    InventoryReport cba = parts[2];
    cba.Merge(parts[1]);
    cba.Merge(parts[0]);
    ASSERT_EQ(ab_c, a_bc);
    ASSERT_EQ(ab_c, cba);
  }
}

std::vector<InstructionTriple> Numbered(const std::string& prefix, int n) {
  std::vector<InstructionTriple> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(MakeTriple(GenerationMethod::kRuleSlice, TaskKind::kOperatorKnowledge,
                             prefix + " question", std::to_string(i), "answer", {prefix}));
  }
  return out;
}

TEST(AssembleSft, SamplesDedupsAndShufflesDeterministically) {
  std::vector<SftPart> parts = {{"a", Numbered("a", 10), 4}, {"b", Numbered("b", 3), std::nullopt}};
  parts[1].triples.push_back(parts[1].triples[0]);
  const auto first = AssembleSftCorpus(parts, 17);
  const auto second = AssembleSftCorpus(parts, 17);
  EXPECT_EQ(first, second);
  EXPECT_EQ(first.size(), 7u);
  std::set<std::string> ids;
  for (const auto& t : first) ids.insert(t.triple_id);
  EXPECT_EQ(ids.size(), first.size());
  EXPECT_NE(AssembleSftCorpus(parts, 18), first);
}

TEST(AssembleSft, TakeLargerThanPartThrows) {
  std::vector<SftPart> parts = {{"small", Numbered("s", 2), 5}};
  EXPECT_THROW(AssembleSftCorpus(parts, 1), std::invalid_argument);
}

}  // namespace
}  // namespace geocorpus
