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

// JSON-over-HTTP front for ReviewStore.
//
//   GET  /api/sessions                      reviewer's sessions
//   GET  /api/tasks/next                    {"task": <task or null>}
//   GET  /api/tasks/{id}                    one task
//   POST /api/tasks/{id}/ranking            {"ordering": ["Sample-2", ...]}
//   POST /api/tasks/{id}/executability      {"verdicts": {"Sample-1": "pass", ...}}
//   GET  /api/progress                      reviewer's progress
//   GET  /api/export[?partial=1]            admin only, unblinded results
//
// Every request carries "Authorization: Bearer <token>".

#ifndef GEOCORPUS_REVIEW_SERVER_H_
#define GEOCORPUS_REVIEW_SERVER_H_

#include <map>
#include <memory>
#include <string>
#include <thread>

#include "geocorpus/review.h"

namespace geocorpus {

struct ReviewTokens {
  std::string admin_token;
  // token -> reviewer id
  std::map<std::string, std::string> reviewers;

  // {"admin_token": "...", "reviewers": {"<reviewer id>": "<token>", ...}}
  static ReviewTokens FromJson(const Json& j);
  static ReviewTokens Load(const std::string& path);
};

class ReviewServer {
 public:
  // `static_dir`, when non-empty, is served at "/".
  ReviewServer(ReviewStore& store, ReviewTokens tokens, std::string static_dir = "");
  ~ReviewServer();

  ReviewServer(const ReviewServer&) = delete;
  ReviewServer& operator=(const ReviewServer&) = delete;

  // Binds and serves on a background thread. Port 0 picks a free port.
  // Returns the bound port; throws ReviewError when binding fails.
  int Start(const std::string& host, int port);
  // Serves on the calling thread until Stop().
  void Run(const std::string& host, int port);
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
};

}  // namespace geocorpus

#endif  // GEOCORPUS_REVIEW_SERVER_H_
