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

// Blind expert review of generated code.
//
// Each task shows one reviewer the outputs of every candidate model for one
// item, relabeled "Sample-1".."Sample-M" under a seeded permutation. The
// label -> model mapping never leaves the server until an admin exports.
// Accepted submissions are appended to an event log that is replayed on
// startup.

#ifndef GEOCORPUS_REVIEW_H_
#define GEOCORPUS_REVIEW_H_

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "geocorpus/corpus_model.h"
#include "geocorpus/scoring.h"

namespace geocorpus {

class ReviewError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ReviewSample {
  std::string blind_label;
  std::string code;
  std::string model_id;  // server side only
};

struct ReviewTaskSpec {
  std::string task_id;
  std::string session_id;
  std::string reviewer_id;
  std::string item_id;
  std::string prompt;
  std::vector<ReviewSample> samples;
};

struct ReviewSetup {
  uint64_t seed = 0;
  std::vector<ReviewTaskSpec> tasks;

  OrderedJson ToJson() const;
  static ReviewSetup FromJson(const Json& j);
  static ReviewSetup Load(const std::string& path);
};

struct ReviewInputs {
  std::vector<std::string> item_ids;
  // Optional task text shown to the reviewer, keyed by item id.
  std::map<std::string, std::string> prompts;
  std::vector<std::string> models;
  // (item id, model id) -> generated code.
  std::map<std::pair<std::string, std::string>, std::string> outputs;
  std::vector<std::string> reviewers;
  // Independent reviewers per item; must not exceed the reviewer count.
  int reviews_per_item = 1;
  uint64_t seed = 0;
};

// Assigns (item, review) pairs to reviewers round robin, one session per
// reviewer, and permutes each task's samples with a seed derived from
// (seed, task id). Throws ReviewError naming (item, model) for a missing
// output.
ReviewSetup CreateReviewSetup(const ReviewInputs& inputs);

struct SampleVerdict {
  Verdict verdict = Verdict::kNotRun;
  std::string note;

  bool operator==(const SampleVerdict&) const = default;
};

struct SubmitResult {
  bool accepted = false;
  std::string reason;
  // HTTP-style status for the rejection: 403, 404, 409 or 422.
  int status = 200;
};

struct ReviewProgress {
  size_t tasks = 0;
  size_t rankings = 0;
  size_t verdicts = 0;
  bool complete() const { return rankings == tasks && verdicts == tasks; }
};

struct UnblindedExport {
  bool complete = false;
  std::vector<RankSubmission> rankings;
  std::vector<ExecutabilityVerdict> verdicts;

  OrderedJson ToJson() const;
  static UnblindedExport FromJson(const Json& j);
};

class ReviewStore {
 public:
  // Replays `event_log_path` when it exists. An empty path keeps events in
  // memory only. Throws ReviewError for a log entry that no longer applies.
  ReviewStore(ReviewSetup setup, std::string event_log_path);

  SubmitResult SubmitRanking(const std::string& task_id, const std::string& reviewer_id,
                             const std::vector<std::string>& ordering);
  SubmitResult SubmitExecutability(const std::string& task_id,
                                   const std::string& reviewer_id,
                                   const std::map<std::string, SampleVerdict>& verdicts);

  // Client-facing views. None of them carries a model id.
  OrderedJson SessionsPayload(const std::string& reviewer_id) const;
  // The first task of the reviewer with a missing submission, or null.
  OrderedJson NextTaskPayload(const std::string& reviewer_id) const;
  OrderedJson TaskPayload(const std::string& task_id) const;
  OrderedJson ProgressPayload(const std::string& reviewer_id) const;

  ReviewProgress Progress(const std::string& reviewer_id = "") const;

  // Throws ReviewError("review incomplete ...") unless every task has both
  // submissions or `allow_partial` is set.
  UnblindedExport ExportUnblinded(bool allow_partial) const;

  const ReviewSetup& setup() const { return setup_; }
  bool HasTask(const std::string& task_id) const;
  std::optional<std::string> TaskReviewer(const std::string& task_id) const;

 private:
  struct TaskState {
    std::optional<std::vector<std::string>> ranking;
    std::optional<std::map<std::string, SampleVerdict>> verdicts;
  };
  using State = std::map<std::string, TaskState>;

  SubmitResult CheckRanking(const State& state, const std::string& task_id,
                            const std::string& reviewer_id,
                            const std::vector<std::string>& ordering) const;
  SubmitResult CheckExecutability(const State& state, const std::string& task_id,
                                  const std::string& reviewer_id,
                                  const std::map<std::string, SampleVerdict>& verdicts) const;
  const ReviewTaskSpec* FindTask(const std::string& task_id) const;
  std::shared_ptr<const State> Snapshot() const;
  void Publish(std::shared_ptr<const State> next);
  void Append(const OrderedJson& event);
  OrderedJson TaskPayloadFor(const ReviewTaskSpec& spec, const TaskState* state) const;

  ReviewSetup setup_;
  std::map<std::string, size_t> task_index_;
  std::string log_path_;
  // Serializes submissions and log writes.
  std::mutex write_mu_;
  // Guards only the pointer swap; readers copy the pointer and release.
  mutable std::mutex snapshot_mu_;
  std::shared_ptr<const State> state_;
};

}  // namespace geocorpus

#endif  // GEOCORPUS_REVIEW_H_
