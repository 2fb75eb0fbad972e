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

#include <fstream>
#include <set>
#include <thread>

#include "geocorpus/review.h"
#include "geocorpus/text_util.h"
#include "test_util.h"

namespace geocorpus {
namespace {

using testing::TempDir;

ReviewInputs Inputs(int items = 2, int per_item = 1) {
  ReviewInputs in;
  in.models = {"alpha", "beta", "gamma"};
  in.reviewers = {"rev-a", "rev-b"};
  in.reviews_per_item = per_item;
  in.seed = 42;
  for (int i = 0; i < items; ++i) {
    const std::string item = "gen-" + std::to_string(i);
    in.item_ids.push_back(item);
    in.prompts[item] = "Task " + std::to_string(i);
    for (const auto& m : in.models) in.outputs[{item, m}] = "code by " + m + " for " + item;
  }
  return in;
}

std::vector<std::string> Labels(const ReviewTaskSpec& t) {
  std::vector<std::string> out;
  for (const auto& s : t.samples) out.push_back(s.blind_label);
  return out;
}

std::map<std::string, SampleVerdict> AllPass(const ReviewTaskSpec& t) {
  std::map<std::string, SampleVerdict> v;
  for (const auto& s : t.samples) v[s.blind_label] = {Verdict::kPass, ""};
  return v;
}

TEST(ReviewSetup, AssignsRoundRobinAndPermutes) {
  ReviewSetup setup = CreateReviewSetup(Inputs(3, 2));
  ASSERT_EQ(setup.tasks.size(), 6u);
  std::map<std::string, int> per_reviewer;
  for (size_t i = 0; i < setup.tasks.size(); ++i) {
    const auto& t = setup.tasks[i];
    EXPECT_EQ(t.session_id, "session-" + t.reviewer_id);
    ++per_reviewer[t.reviewer_id];
    EXPECT_EQ(Labels(t), (std::vector<std::string>{"Sample-1", "Sample-2", "Sample-3"}));
    std::set<std::string> models;
    for (const auto& s : t.samples) {
      models.insert(s.model_id);
      EXPECT_EQ(s.code, "code by " + s.model_id + " for " + t.item_id);
    }
    EXPECT_EQ(models.size(), 3u);
  }
  EXPECT_EQ(per_reviewer["rev-a"], 3);
  EXPECT_EQ(per_reviewer["rev-b"], 3);
  // Both reviews of one item go to different reviewers.
  EXPECT_NE(setup.tasks[0].reviewer_id, setup.tasks[1].reviewer_id);
}

TEST(ReviewSetup, DeterministicPerSeed) {
  ReviewSetup a = CreateReviewSetup(Inputs(4));
  ReviewSetup b = CreateReviewSetup(Inputs(4));
  EXPECT_EQ(a.ToJson().dump(), b.ToJson().dump());
  ReviewInputs other = Inputs(4);
  bool differs = false;
  for (uint64_t seed = 1; seed < 20 && !differs; ++seed) {
    other.seed = seed;
    differs = CreateReviewSetup(other).ToJson().dump() != a.ToJson().dump();
  }
  EXPECT_TRUE(differs);
}

TEST(ReviewSetup, JsonRoundTrip) {
  ReviewSetup a = CreateReviewSetup(Inputs(2));
  ReviewSetup b = ReviewSetup::FromJson(Json::parse(a.ToJson().dump()));
  EXPECT_EQ(a.ToJson().dump(), b.ToJson().dump());
}

TEST(ReviewSetup, Errors) {
  ReviewInputs in = Inputs();
  in.outputs.erase({"gen-1", "beta"});
  try {
    CreateReviewSetup(in);
    FAIL();
  } catch (const ReviewError& e) {
    EXPECT_NE(std::string(e.what()).find("gen-1"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("beta"), std::string::npos);
  }
  in = Inputs(1, 3);
  EXPECT_THROW(CreateReviewSetup(in), ReviewError);
  in = Inputs();
  in.models = {"alpha"};
  EXPECT_THROW(CreateReviewSetup(in), ReviewError);
  Json dup = CreateReviewSetup(Inputs(2)).ToJson();
  dup["tasks"][1]["task_id"] = dup["tasks"][0]["task_id"];
  EXPECT_THROW(ReviewSetup::FromJson(dup), ReviewError);
}

TEST(ReviewStore, RejectionStatuses) {
  ReviewSetup setup = CreateReviewSetup(Inputs(2));
  ReviewStore store(setup, "");
  const auto& t = setup.tasks[0];
  const std::string other = t.reviewer_id == "rev-a" ? "rev-b" : "rev-a";
  EXPECT_EQ(store.SubmitRanking("task-9999", t.reviewer_id, Labels(t)).status, 404);
  EXPECT_EQ(store.SubmitRanking(t.task_id, other, Labels(t)).status, 403);
  EXPECT_EQ(store.SubmitRanking(t.task_id, t.reviewer_id, {"Sample-1", "Sample-2"}).status,
            422);
  EXPECT_EQ(
      store.SubmitRanking(t.task_id, t.reviewer_id, {"Sample-1", "Sample-1", "Sample-2"})
          .status,
      422);
  EXPECT_TRUE(store.SubmitRanking(t.task_id, t.reviewer_id, Labels(t)).accepted);
  EXPECT_EQ(store.SubmitRanking(t.task_id, t.reviewer_id, Labels(t)).status, 409);

  auto verdicts = AllPass(t);
  verdicts.erase("Sample-2");
  EXPECT_EQ(store.SubmitExecutability(t.task_id, t.reviewer_id, verdicts).status, 422);
  verdicts = AllPass(t);
  verdicts["Sample-9"] = {Verdict::kFail, ""};
  EXPECT_EQ(store.SubmitExecutability(t.task_id, t.reviewer_id, verdicts).status, 422);
  EXPECT_EQ(store.SubmitExecutability(t.task_id, other, AllPass(t)).status, 403);
  EXPECT_TRUE(store.SubmitExecutability(t.task_id, t.reviewer_id, AllPass(t)).accepted);
  EXPECT_EQ(store.SubmitExecutability(t.task_id, t.reviewer_id, AllPass(t)).status, 409);
}

TEST(ReviewStore, PayloadsNeverCarryModelIds) {
  ReviewSetup setup = CreateReviewSetup(Inputs(2));
  ReviewStore store(setup, "");
  for (const auto& t : setup.tasks) {
    for (const std::string& dump :
         {store.TaskPayload(t.task_id).dump(), store.NextTaskPayload(t.reviewer_id).dump(),
          store.SessionsPayload(t.reviewer_id).dump(),
          store.ProgressPayload(t.reviewer_id).dump()}) {
      EXPECT_EQ(dump.find("\"model_id\""), std::string::npos) << dump;
    }
    OrderedJson p = store.TaskPayload(t.task_id);
    for (const auto& s : p["samples"]) EXPECT_EQ(s.size(), 2u);
  }
  EXPECT_TRUE(store.TaskPayload("task-9999").is_null());
}

TEST(ReviewStore, ProgressAndNextTask) {
  ReviewSetup setup = CreateReviewSetup(Inputs(4));
  ReviewStore store(setup, "");
  const auto& t = setup.tasks[0];
  EXPECT_EQ(store.NextTaskPayload(t.reviewer_id)["task_id"], t.task_id);
  store.SubmitRanking(t.task_id, t.reviewer_id, Labels(t));
  EXPECT_EQ(store.NextTaskPayload(t.reviewer_id)["task_id"], t.task_id);
  store.SubmitExecutability(t.task_id, t.reviewer_id, AllPass(t));
  EXPECT_NE(store.NextTaskPayload(t.reviewer_id)["task_id"], t.task_id);
  ReviewProgress p = store.Progress(t.reviewer_id);
  EXPECT_EQ(p.tasks, 2u);
  EXPECT_EQ(p.rankings, 1u);
  EXPECT_FALSE(p.complete());
  EXPECT_EQ(store.SessionsPayload(t.reviewer_id)[0]["pending"], 1);
}

void CompleteAll(ReviewStore& store, const ReviewSetup& setup) {
  for (const auto& t : setup.tasks) {
    std::vector<std::string> order = Labels(t);
    std::reverse(order.begin(), order.end());
    ASSERT_TRUE(store.SubmitRanking(t.task_id, t.reviewer_id, order).accepted);
    auto v = AllPass(t);
    v["Sample-1"] = {Verdict::kFail, "import error"};
    ASSERT_TRUE(store.SubmitExecutability(t.task_id, t.reviewer_id, v).accepted);
  }
}

TEST(ReviewStore, ExportUnblindsOnlyWhenComplete) {
  ReviewSetup setup = CreateReviewSetup(Inputs(2));
  ReviewStore store(setup, "");
  EXPECT_THROW(store.ExportUnblinded(false), ReviewError);
  UnblindedExport partial = store.ExportUnblinded(true);
  EXPECT_FALSE(partial.complete);
  CompleteAll(store, setup);
  UnblindedExport ex = store.ExportUnblinded(false);
  EXPECT_TRUE(ex.complete);
  ASSERT_EQ(ex.rankings.size(), 2u);
  ASSERT_EQ(ex.verdicts.size(), 6u);
  // Rank 1 is the model behind the last label.
  const auto& t = setup.tasks[0];
  EXPECT_EQ(ex.rankings[0].ordering[0], t.samples.back().model_id);
  size_t fails = 0;
  for (const auto& v : ex.verdicts) {
    if (v.verdict == Verdict::kFail) {
      ++fails;
      EXPECT_EQ(v.note, "import error");
    }
  }
  EXPECT_EQ(fails, 2u);
  UnblindedExport back = UnblindedExport::FromJson(Json::parse(ex.ToJson().dump()));
  EXPECT_EQ(back.ToJson().dump(), ex.ToJson().dump());
}

TEST(ReviewStore, ReplaysEventLog) {
  TempDir dir("review");
  const std::string log = dir.File("events.jsonl");
  ReviewSetup setup = CreateReviewSetup(Inputs(2));
  std::string first_export;
  {
    ReviewStore store(setup, log);
    CompleteAll(store, setup);
    first_export = store.ExportUnblinded(false).ToJson().dump();
  }
  ReviewStore reloaded(setup, log);
  EXPECT_TRUE(reloaded.Progress().complete());
  EXPECT_EQ(reloaded.ExportUnblinded(false).ToJson().dump(), first_export);
  const auto& t = setup.tasks[0];
  EXPECT_EQ(reloaded.SubmitRanking(t.task_id, t.reviewer_id, Labels(t)).status, 409);
}

TEST(ReviewStore, TornFinalLineIsIgnored) {
  TempDir dir("review");
  const std::string log = dir.File("events.jsonl");
  ReviewSetup setup = CreateReviewSetup(Inputs(2));
  {
    ReviewStore store(setup, log);
    const auto& t = setup.tasks[0];
    store.SubmitRanking(t.task_id, t.reviewer_id, Labels(t));
  }
  {
    std::ofstream out(log, std::ios::app);
    out << R"({"event":"ranking","task_id":"task-0002","revi)";
  }
  ReviewStore reloaded(setup, log);
  EXPECT_EQ(reloaded.Progress().rankings, 1u);
}

TEST(ReviewStore, CorruptMiddleLineOrStaleEventFails) {
  TempDir dir("review");
  ReviewSetup setup = CreateReviewSetup(Inputs(2));
  const std::string log = dir.File("events.jsonl");
  {
    std::ofstream out(log);
    out << "garbage\n" << R"({"event":"ranking"})" << "\n";
  }
  EXPECT_THROW(ReviewStore(setup, log), ReviewError);
  {
    std::ofstream out(log);
    out << R"({"event":"ranking","task_id":"task-0404","reviewer_id":"rev-a","ordering":[]})"
        << "\n";
  }
  EXPECT_THROW(ReviewStore(setup, log), ReviewError);
}

TEST(ReviewStore, ConcurrentDuplicateSubmissionsAcceptOnce) {
  TempDir dir("review");
  ReviewSetup setup = CreateReviewSetup(Inputs(1));
  ReviewStore store(setup, dir.File("events.jsonl"));
  const auto& t = setup.tasks[0];
  std::atomic<int> accepted{0};
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&] {
      if (store.SubmitRanking(t.task_id, t.reviewer_id, Labels(t)).accepted) ++accepted;
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(accepted.load(), 1);
  std::ifstream in(dir.File("events.jsonl"));
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 1);
}

}  // namespace
}  // namespace geocorpus
