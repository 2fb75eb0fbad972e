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

#include "geocorpus/numeric.h"
#include "geocorpus/slicing.h"
#include "test_util.h"

namespace geocorpus {
namespace {

OperatorDocument Op(const std::string& id, const std::string& name) {
  OperatorDocument o;
  o.operator_id = id;
  o.full_name = name;
  o.short_name = name.substr(name.rfind('.') + 1);
  o.library_name = "ee";
  o.language = Language::kJavaScript;
  o.platform = "Google Earth Engine";
  o.description = "Description of " + name;
  o.usage = name + "(x)";
  o.parameters = "x: Image";
  o.output_type = "Image";
  return o;
}

TEST(SliceTable, SingleCellBecomesOneTriple) {
  SliceTable t;
  t.columns = {"full_name", "description"};
  t.subject_column = "full_name";
  t.subject_kind = "operator";
  t.rows = {{"ee.Image.normalizedDifference", "Computes the normalized difference..."}};
  const auto out = SliceTableRows(t, SliceTemplateSet::Defaults());
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].input, "ee.Image.normalizedDifference");
  EXPECT_EQ(out[0].output, "Computes the normalized difference...");
  EXPECT_EQ(out[0].instruct, "Describe what the following operator does.");
  EXPECT_EQ(out[0].method, GenerationMethod::kRuleSlice);
  EXPECT_EQ(out[0].task_kind, TaskKind::kOperatorKnowledge);
}

TEST(SliceTable, EmptyCellsProduceNoTriple) {
  SliceTable t;
  t.columns = {"full_name", "description", "usage", "output_type"};
  t.subject_column = "full_name";
  t.rows = {{"a", "d", "u", "o"}, {"b", "d2", " ", "o2"}};
  EXPECT_EQ(SliceTableRows(t, SliceTemplateSet::Defaults()).size(), 5u);
}

// Oracle: enumerate (operator, attribute) pairs from the document fields
// directly, without going through the table view.
TEST(SliceTable, OperatorFixtureMatchesPairEnumeration) {
  std::vector<OperatorDocument> ops = {Op("o1", "ee.Image.clip"), Op("o2", "ee.Image.select"),
                                       Op("o3", "ee.Image.mask"), Op("o4", "ee.Image.add")};
  std::set<std::pair<std::string, std::string>> expected;
  for (const auto& o : ops) {
    const std::string values[] = {o.full_name,   o.short_name, o.library_name,
                                  "JavaScript",  o.platform,   o.description,
                                  o.usage,       o.parameters, o.output_type};
    for (const auto& v : values) {
      if (!v.empty()) expected.insert({o.operator_id, v});
    }
  }
  const auto out = SliceTableRows(OperatorTable(ops), SliceTemplateSet::Defaults());
  EXPECT_EQ(out.size(), 36u);
  std::set<std::pair<std::string, std::string>> got;
  for (const auto& t : out) {
    got.insert({t.provenance.at(0), t.output});
    EXPECT_EQ(t.input, ops[std::stoi(t.provenance[0].substr(1)) - 1].full_name);
  }
  EXPECT_EQ(got, expected);
}

TEST(SliceTable, MissingTemplateNamesAttribute) {
  SliceTable t;
  t.columns = {"full_name", "colour"};
  t.subject_column = "full_name";
  t.rows = {{"a", "red"}};
  try {
    SliceTableRows(t, SliceTemplateSet::Defaults());
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("colour"), std::string::npos);
  }
  t.subject_column = "name";
  EXPECT_THROW(SliceTableRows(t, SliceTemplateSet::Defaults()), std::invalid_argument);
}

TEST(SliceTable, PureFunction) {
  const auto table = OperatorTable({Op("o1", "ee.Image.clip")});
  EXPECT_EQ(SliceTableRows(table, SliceTemplateSet::Defaults()),
            SliceTableRows(table, SliceTemplateSet::Defaults()));
}

DatasetDocument Dataset() {
  DatasetDocument d;
  d.dataset_id = "ds-1";
  d.name = "JRC Global Surface Water";
  d.provide = "Google Earth Engine";
  d.tags = {"water", "jrc", "surface"};
  d.description = "Surface water occurrence.";
  return d;
}

TEST(SliceRecord, EmptyValuesSkippedAndTagsJoined) {
  const DatasetDocument d = Dataset();
  const auto out = SliceRecord(Json::parse(ToJson(Document(d)).dump()),
                               SliceTemplateSet::Defaults(), DatasetRecordOptions(d));
  ASSERT_EQ(out.size(), 3u);
  std::set<std::string> outputs;
  for (const auto& t : out) {
    EXPECT_EQ(t.input, d.name);
    EXPECT_EQ(t.task_kind, TaskKind::kDatasetKnowledge);
    EXPECT_EQ(t.provenance, std::vector<std::string>{"ds-1"});
    outputs.insert(t.output);
  }
  // Canonical text oracle: scalar list joined with ", ".
  std::string joined;
  for (size_t i = 0; i < d.tags.size(); ++i) joined += (i ? ", " : "") + d.tags[i];
  EXPECT_TRUE(outputs.count(joined));
  EXPECT_TRUE(outputs.count("Surface water occurrence."));
}

TEST(SliceRecord, MissingSubjectThrows) {
  Json j = Json::parse(ToJson(Document(Dataset())).dump());
  j.erase("name");
  EXPECT_THROW(SliceRecord(j, SliceTemplateSet::Defaults(), DatasetRecordOptions(Dataset())),
               std::invalid_argument);
}

TEST(CanonicalValueText, Rules) {
  EXPECT_EQ(CanonicalValueText(Json(nullptr)), "");
  EXPECT_EQ(CanonicalValueText(Json("x")), "x");
  EXPECT_EQ(CanonicalValueText(Json::array({"a", 1, true})), "a, 1, true");
  EXPECT_EQ(CanonicalValueText(Json::array()), "");
  EXPECT_EQ(CanonicalValueText(Json::object()), "");
  EXPECT_EQ(CanonicalValueText(Json::parse(R"({"b":1})")), R"({"b":1})");
  EXPECT_EQ(CanonicalValueText(Json(2.5)), "2.5");
}

TEST(SliceTemplates, DirectoryRoundTripAndShippedFilesMatchDefaults) {
  testing::TempDir dir;
  const SliceTemplateSet defaults = SliceTemplateSet::Defaults();
  defaults.SaveDirectory(dir.path());
  const SliceTemplateSet loaded = SliceTemplateSet::LoadDirectory(dir.path());
  const SliceTemplateSet shipped = SliceTemplateSet::LoadDirectory(testing::SourcePath("templates/slice"));
  EXPECT_EQ(loaded.Attributes(), defaults.Attributes());
  EXPECT_EQ(shipped.Attributes(), defaults.Attributes());
  for (const std::string& a : defaults.Attributes()) {
    EXPECT_EQ(loaded.Find(a)->instruct_pattern, defaults.Find(a)->instruct_pattern);
    EXPECT_EQ(shipped.Find(a)->instruct_pattern, defaults.Find(a)->instruct_pattern);
    EXPECT_EQ(shipped.Find(a)->task_kind, defaults.Find(a)->task_kind);
  }
}

}  // namespace
}  // namespace geocorpus
