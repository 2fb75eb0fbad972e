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

#include "geocorpus/review.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "geocorpus/numeric.h"
#include "geocorpus/text_util.h"

namespace geocorpus {
namespace {

std::string TaskIdFor(size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "task-%04zu", index + 1);
  return buf;
}

SubmitResult Reject(int status, std::string reason) {
  return {false, std::move(reason), status};
}

}  // namespace

OrderedJson ReviewSetup::ToJson() const {
  OrderedJson tasks_json = OrderedJson::array();
  for (const ReviewTaskSpec& t : tasks) {
    OrderedJson samples = OrderedJson::array();
    for (const ReviewSample& s : t.samples) {
      samples.push_back({{"blind_label", s.blind_label},
                         {"model_id", s.model_id},
                         {"code", s.code}});
    }
    tasks_json.push_back({{"task_id", t.task_id},
                          {"session_id", t.session_id},
                          {"reviewer_id", t.reviewer_id},
                          {"item_id", t.item_id},
                          {"prompt", t.prompt},
                          {"samples", samples}});
  }
  return {{"seed", seed}, {"tasks", tasks_json}};
}

ReviewSetup ReviewSetup::FromJson(const Json& j) {
  ReviewSetup setup;
  setup.seed = j.value("seed", uint64_t{0});
  std::set<std::string> ids;
  for (const Json& t : j.at("tasks")) {
    ReviewTaskSpec spec;
    spec.task_id = t.at("task_id").get<std::string>();
    spec.session_id = t.at("session_id").get<std::string>();
    spec.reviewer_id = t.at("reviewer_id").get<std::string>();
    spec.item_id = t.at("item_id").get<std::string>();
    spec.prompt = t.value("prompt", "");
    for (const Json& s : t.at("samples")) {
      spec.samples.push_back({s.at("blind_label").get<std::string>(),
                              s.at("code").get<std::string>(),
                              s.at("model_id").get<std::string>()});
    }
    if (!ids.insert(spec.task_id).second) {
      throw ReviewError("duplicate task id in review setup: " + spec.task_id);
    }
    setup.tasks.push_back(std::move(spec));
  }
  return setup;
}

ReviewSetup ReviewSetup::Load(const std::string& path) {
  return FromJson(Json::parse(ReadFile(path)));
}

ReviewSetup CreateReviewSetup(const ReviewInputs& inputs) {
  if (inputs.models.size() < 2) throw ReviewError("review needs at least 2 models");
  if (inputs.reviewers.empty()) throw ReviewError("review needs at least 1 reviewer");
  if (inputs.reviews_per_item < 1 ||
      static_cast<size_t>(inputs.reviews_per_item) > inputs.reviewers.size()) {
    throw ReviewError("reviews per item must be between 1 and the reviewer count");
  }
  for (const std::string& item : inputs.item_ids) {
    for (const std::string& model : inputs.models) {
      if (!inputs.outputs.count({item, model})) {
        throw ReviewError("missing output for item " + item + ", model " + model);
      }
    }
  }
  ReviewSetup setup;
  setup.seed = inputs.seed;
  size_t slot = 0;
  for (const std::string& item : inputs.item_ids) {
    for (int r = 0; r < inputs.reviews_per_item; ++r, ++slot) {
      ReviewTaskSpec spec;
      spec.task_id = TaskIdFor(setup.tasks.size());
      spec.reviewer_id = inputs.reviewers[slot % inputs.reviewers.size()];
      spec.session_id = "session-" + spec.reviewer_id;
      spec.item_id = item;
      if (auto p = inputs.prompts.find(item); p != inputs.prompts.end()) spec.prompt = p->second;
      std::vector<std::string> order = inputs.models;
      DeterministicRng rng(MixSeed(inputs.seed, spec.task_id));
      DeterministicShuffle(order, rng);
      for (size_t i = 0; i < order.size(); ++i) {
        spec.samples.push_back({"Sample-" + std::to_string(i + 1),
                                inputs.outputs.at({item, order[i]}), order[i]});
      }
      setup.tasks.push_back(std::move(spec));
    }
  }
  return setup;
}

OrderedJson UnblindedExport::ToJson() const {
  OrderedJson ranks = OrderedJson::array();
  for (const RankSubmission& r : rankings) {
    ranks.push_back(
        {{"item_id", r.item_id}, {"reviewer_id", r.reviewer_id}, {"ordering", r.ordering}});
  }
  OrderedJson verdicts_json = OrderedJson::array();
  for (const ExecutabilityVerdict& v : verdicts) {
    verdicts_json.push_back({{"item_id", v.item_id},
                             {"model_id", v.model_id},
                             {"reviewer_id", v.reviewer_id},
                             {"verdict", ToString(v.verdict)},
                             {"note", v.note}});
  }
  return {{"complete", complete}, {"rankings", ranks}, {"verdicts", verdicts_json}};
}

UnblindedExport UnblindedExport::FromJson(const Json& j) {
  UnblindedExport out;
  out.complete = j.value("complete", false);
  for (const Json& r : j.at("rankings")) {
    out.rankings.push_back({r.at("item_id").get<std::string>(),
                            r.at("reviewer_id").get<std::string>(),
                            r.at("ordering").get<std::vector<std::string>>()});
  }
  for (const Json& v : j.at("verdicts")) {
    const std::string text = v.at("verdict").get<std::string>();
    auto verdict = ParseVerdict(text);
    if (!verdict) throw ReviewError("unknown verdict in export: " + text);
    out.verdicts.push_back({v.at("item_id").get<std::string>(),
                            v.at("model_id").get<std::string>(),
                            v.at("reviewer_id").get<std::string>(), *verdict,
                            v.value("note", "")});
  }
  return out;
}

ReviewStore::ReviewStore(ReviewSetup setup, std::string event_log_path)
    : setup_(std::move(setup)),
      log_path_(std::move(event_log_path)),
      state_(std::make_shared<const State>()) {
  for (size_t i = 0; i < setup_.tasks.size(); ++i) task_index_[setup_.tasks[i].task_id] = i;
  if (log_path_.empty() || !std::filesystem::exists(log_path_)) return;

  auto state = std::make_shared<State>();
  std::ifstream in(log_path_);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    Json event;
    try {
      event = Json::parse(line);
    } catch (const Json::parse_error&) {
      // A torn final line from an interrupted append.
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw ReviewError("event log line " + std::to_string(lineno) + " is not JSON");
    }
    const std::string type = event.value("event", "");
    const std::string task_id = event.value("task_id", "");
    const std::string reviewer = event.value("reviewer_id", "");
    SubmitResult r;
    if (type == "ranking") {
      auto ordering = event.at("ordering").get<std::vector<std::string>>();
      r = CheckRanking(*state, task_id, reviewer, ordering);
      if (r.accepted) (*state)[task_id].ranking = std::move(ordering);
    } else if (type == "executability") {
      std::map<std::string, SampleVerdict> verdicts;
      for (const auto& [label, v] : event.at("verdicts").items()) {
        auto verdict = ParseVerdict(v.at("verdict").get<std::string>());
        if (!verdict) throw ReviewError("event log has an unknown verdict");
        verdicts[label] = {*verdict, v.value("note", "")};
      }
      r = CheckExecutability(*state, task_id, reviewer, verdicts);
      if (r.accepted) (*state)[task_id].verdicts = std::move(verdicts);
    } else {
      r = Reject(422, "unknown event type: " + type);
    }
    if (!r.accepted) {
      throw ReviewError("event log line " + std::to_string(lineno) + ": " + r.reason);
    }
  }
  state_ = std::move(state);
}

const ReviewTaskSpec* ReviewStore::FindTask(const std::string& task_id) const {
  auto it = task_index_.find(task_id);
  return it == task_index_.end() ? nullptr : &setup_.tasks[it->second];
}

bool ReviewStore::HasTask(const std::string& task_id) const {
  return FindTask(task_id) != nullptr;
}

std::optional<std::string> ReviewStore::TaskReviewer(const std::string& task_id) const {
  const ReviewTaskSpec* spec = FindTask(task_id);
  if (spec == nullptr) return std::nullopt;
  return spec->reviewer_id;
}

std::shared_ptr<const ReviewStore::State> ReviewStore::Snapshot() const {
  std::lock_guard<std::mutex> lock(snapshot_mu_);
  return state_;
}

void ReviewStore::Publish(std::shared_ptr<const State> next) {
  std::lock_guard<std::mutex> lock(snapshot_mu_);
  state_ = std::move(next);
}

void ReviewStore::Append(const OrderedJson& event) {
  if (log_path_.empty()) return;
  std::filesystem::path p(log_path_);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  const bool torn = EndsWithoutNewline(log_path_);
  std::ofstream out(log_path_, std::ios::app | std::ios::binary);
  if (!out) throw ReviewError("cannot append to event log: " + log_path_);
  // Keep a torn line from an interrupted append on its own line.
  if (torn) out << '\n';
  out << event.dump() << '\n';
  out.flush();
  if (!out) throw ReviewError("write to event log failed: " + log_path_);
}

SubmitResult ReviewStore::CheckRanking(const State& state, const std::string& task_id,
                                       const std::string& reviewer_id,
                                       const std::vector<std::string>& ordering) const {
  const ReviewTaskSpec* spec = FindTask(task_id);
  if (spec == nullptr) return Reject(404, "unknown task: " + task_id);
  if (spec->reviewer_id != reviewer_id) return Reject(403, "task not assigned to reviewer");
  if (auto it = state.find(task_id); it != state.end() && it->second.ranking) {
    return Reject(409, "duplicate submission");
  }
  std::set<std::string> labels;
  for (const ReviewSample& s : spec->samples) labels.insert(s.blind_label);
  const std::set<std::string> given(ordering.begin(), ordering.end());
  if (ordering.size() != labels.size() || given != labels) {
    return Reject(422, "not a permutation");
  }
  return {true, "", 200};
}

SubmitResult ReviewStore::CheckExecutability(
    const State& state, const std::string& task_id, const std::string& reviewer_id,
    const std::map<std::string, SampleVerdict>& verdicts) const {
  const ReviewTaskSpec* spec = FindTask(task_id);
  if (spec == nullptr) return Reject(404, "unknown task: " + task_id);
  if (spec->reviewer_id != reviewer_id) return Reject(403, "task not assigned to reviewer");
  if (auto it = state.find(task_id); it != state.end() && it->second.verdicts) {
    return Reject(409, "duplicate submission");
  }
  std::set<std::string> labels;
  for (const ReviewSample& s : spec->samples) {
    labels.insert(s.blind_label);
    if (!verdicts.count(s.blind_label)) {
      return Reject(422, "verdict missing label: " + s.blind_label);
    }
  }
  for (const auto& [label, v] : verdicts) {
    if (!labels.count(label)) return Reject(422, "unknown label: " + label);
  }
  return {true, "", 200};
}

SubmitResult ReviewStore::SubmitRanking(const std::string& task_id,
                                        const std::string& reviewer_id,
                                        const std::vector<std::string>& ordering) {
  std::lock_guard<std::mutex> lock(write_mu_);
  auto current = Snapshot();
  SubmitResult r = CheckRanking(*current, task_id, reviewer_id, ordering);
  if (!r.accepted) return r;
  Append({{"event", "ranking"},
          {"task_id", task_id},
          {"reviewer_id", reviewer_id},
          {"ordering", ordering}});
  auto next = std::make_shared<State>(*current);
  (*next)[task_id].ranking = ordering;
  Publish(std::move(next));
  return r;
}

SubmitResult ReviewStore::SubmitExecutability(
    const std::string& task_id, const std::string& reviewer_id,
    const std::map<std::string, SampleVerdict>& verdicts) {
  std::lock_guard<std::mutex> lock(write_mu_);
  auto current = Snapshot();
  SubmitResult r = CheckExecutability(*current, task_id, reviewer_id, verdicts);
  if (!r.accepted) return r;
  OrderedJson v = OrderedJson::object();
  for (const auto& [label, sv] : verdicts) {
    v[label] = {{"verdict", ToString(sv.verdict)}, {"note", sv.note}};
  }
  Append({{"event", "executability"},
          {"task_id", task_id},
          {"reviewer_id", reviewer_id},
          {"verdicts", v}});
  auto next = std::make_shared<State>(*current);
  (*next)[task_id].verdicts = verdicts;
  Publish(std::move(next));
  return r;
}

OrderedJson ReviewStore::TaskPayloadFor(const ReviewTaskSpec& spec,
                                        const TaskState* state) const {
  OrderedJson samples = OrderedJson::array();
  for (const ReviewSample& s : spec.samples) {
    samples.push_back({{"label", s.blind_label}, {"code", s.code}});
  }
  const bool ranked = state != nullptr && state->ranking.has_value();
  const bool judged = state != nullptr && state->verdicts.has_value();
  return {{"task_id", spec.task_id},
          {"session_id", spec.session_id},
          {"item_id", spec.item_id},
          {"prompt", spec.prompt},
          {"samples", samples},
          {"ranking_submitted", ranked},
          {"executability_submitted", judged},
          {"status", ranked && judged ? "submitted" : "pending"}};
}

OrderedJson ReviewStore::TaskPayload(const std::string& task_id) const {
  const ReviewTaskSpec* spec = FindTask(task_id);
  if (spec == nullptr) return nullptr;
  auto state = Snapshot();
  auto it = state->find(task_id);
  return TaskPayloadFor(*spec, it == state->end() ? nullptr : &it->second);
}

OrderedJson ReviewStore::SessionsPayload(const std::string& reviewer_id) const {
  auto state = Snapshot();
  std::map<std::string, std::pair<size_t, size_t>> sessions;  // total, pending
  std::vector<std::string> order;
  for (const ReviewTaskSpec& t : setup_.tasks) {
    if (t.reviewer_id != reviewer_id) continue;
    if (!sessions.count(t.session_id)) order.push_back(t.session_id);
    auto& [total, pending] = sessions[t.session_id];
    ++total;
    auto it = state->find(t.task_id);
    if (it == state->end() || !it->second.ranking || !it->second.verdicts) ++pending;
  }
  OrderedJson out = OrderedJson::array();
  for (const std::string& id : order) {
    out.push_back({{"session_id", id},
                   {"tasks", sessions[id].first},
                   {"pending", sessions[id].second}});
  }
  return out;
}

OrderedJson ReviewStore::NextTaskPayload(const std::string& reviewer_id) const {
  auto state = Snapshot();
  for (const ReviewTaskSpec& t : setup_.tasks) {
    if (t.reviewer_id != reviewer_id) continue;
    auto it = state->find(t.task_id);
    const TaskState* ts = it == state->end() ? nullptr : &it->second;
    if (ts == nullptr || !ts->ranking || !ts->verdicts) return TaskPayloadFor(t, ts);
  }
  return nullptr;
}

ReviewProgress ReviewStore::Progress(const std::string& reviewer_id) const {
  auto state = Snapshot();
  ReviewProgress p;
  for (const ReviewTaskSpec& t : setup_.tasks) {
    if (!reviewer_id.empty() && t.reviewer_id != reviewer_id) continue;
    ++p.tasks;
    auto it = state->find(t.task_id);
    if (it == state->end()) continue;
    if (it->second.ranking) ++p.rankings;
    if (it->second.verdicts) ++p.verdicts;
  }
  return p;
}

OrderedJson ReviewStore::ProgressPayload(const std::string& reviewer_id) const {
  const ReviewProgress p = Progress(reviewer_id);
  return {{"tasks", p.tasks},
          {"rankings_submitted", p.rankings},
          {"executability_submitted", p.verdicts},
          {"complete", p.complete()}};
}

UnblindedExport ReviewStore::ExportUnblinded(bool allow_partial) const {
  auto state = Snapshot();
  UnblindedExport out;
  size_t done = 0;
  for (const ReviewTaskSpec& t : setup_.tasks) {
    auto it = state->find(t.task_id);
    if (it == state->end()) continue;
    std::map<std::string, std::string> mapping;
    for (const ReviewSample& s : t.samples) mapping[s.blind_label] = s.model_id;
    if (it->second.ranking) {
      RankSubmission r{t.item_id, t.reviewer_id, {}};
      for (const std::string& label : *it->second.ranking) r.ordering.push_back(mapping[label]);
      out.rankings.push_back(std::move(r));
    }
    if (it->second.verdicts) {
      for (const ReviewSample& s : t.samples) {
        const SampleVerdict& v = it->second.verdicts->at(s.blind_label);
        out.verdicts.push_back({t.item_id, s.model_id, t.reviewer_id, v.verdict, v.note});
      }
    }
    if (it->second.ranking && it->second.verdicts) ++done;
  }
  out.complete = done == setup_.tasks.size();
  if (!out.complete && !allow_partial) {
    throw ReviewError("review incomplete: " + std::to_string(done) + " of " +
                      std::to_string(setup_.tasks.size()) +
                      " tasks submitted; pass the partial flag to export anyway");
  }
  return out;
}

}  // namespace geocorpus
