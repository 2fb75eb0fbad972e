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

// Client side of the remote text-generation service used for synthetic
// instruction data and for judge scoring.
//
// GenerationService layers, outermost first: in-flight dedup, persistent
// cache, concurrency cap, retry with exponential backoff, transport.

#ifndef GEOCORPUS_GENERATION_H_
#define GEOCORPUS_GENERATION_H_

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "geocorpus/corpus_model.h"

namespace geocorpus {

struct GenerationRequest {
  std::string prompt;
  int max_output_tokens = 1024;
  double temperature = 0.0;
  // Distinguishes repeated samples of the same prompt (judge repetitions).
  int variant = 0;

  // SHA-256 over the canonical JSON of all fields.
  std::string RequestId() const;
};

class GenerationError : public std::runtime_error {
 public:
  GenerationError(const std::string& what, bool transient)
      : std::runtime_error(what), transient_(transient) {}
  bool transient() const { return transient_; }

 private:
  bool transient_;
};

class GenerationClient {
 public:
  virtual ~GenerationClient() = default;
  // Returns generated text or throws GenerationError.
  virtual std::string Generate(const GenerationRequest& request) = 0;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{30000};

  std::chrono::milliseconds BackoffAfter(int attempt) const;
};

// request_id -> response, persisted as one JSON line per entry. Later lines
// win when an id repeats. Thread-safe; writes go through one mutex.
class GenerationCache {
 public:
  // Empty path keeps the cache in memory only.
  explicit GenerationCache(std::string path = "");

  std::optional<std::string> Get(const std::string& request_id) const;
  void Put(const std::string& request_id, const std::string& response);
  size_t size() const;

 private:
  std::string path_;
  mutable std::mutex mu_;
  std::map<std::string, std::string> entries_;
};

// Scripted offline service. Lookup order: exact request id, first rule whose
// `contains` substring occurs in the prompt, then `default`.
//
// Fixture file:
//   {"responses": {"<request_id>": "text"},
//    "rules": [{"contains": "...", "response": "..."}],
//    "default": "text"}
class StubGenerationClient : public GenerationClient {
 public:
  using Script = std::function<std::string(const GenerationRequest&)>;

  explicit StubGenerationClient(Script script);
  static std::unique_ptr<StubGenerationClient> FromFixture(const Json& fixture);
  static std::unique_ptr<StubGenerationClient> FromFile(const std::string& path);

  std::string Generate(const GenerationRequest& request) override;
  int calls() const { return calls_.load(); }
  int max_in_flight() const { return max_in_flight_.load(); }

 private:
  Script script_;
  std::atomic<int> calls_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> max_in_flight_{0};
};

struct HttpClientConfig {
  // e.g. "http://localhost:8000/v1/chat/completions"
  std::string url;
  std::string model;
  // Bearer token; resolved from the environment or a token file by callers.
  std::string token;
  std::chrono::seconds timeout{120};
};

// OpenAI-compatible chat-completions transport. 429/5xx and connection
// failures are transient; other HTTP errors are permanent.
class HttpGenerationClient : public GenerationClient {
 public:
  explicit HttpGenerationClient(HttpClientConfig config);
  std::string Generate(const GenerationRequest& request) override;

  // Extracts text from chat ("choices[0].message.content"), completion
  // ("choices[0].text") or plain ({"text": ...}) response bodies.
  static std::optional<std::string> ExtractText(const Json& body);

 private:
  HttpClientConfig config_;
  std::string scheme_host_;
  std::string path_;
};

// Reads the token from $env_var, else from token_file (trimmed). Empty when
// neither is set.
std::string ResolveToken(const std::string& env_var, const std::string& token_file);

struct GenerationOutcome {
  bool ok = false;
  std::string text;
  std::string error;
  bool from_cache = false;
  int attempts = 0;
};

class GenerationService {
 public:
  using SleepFn = std::function<void(std::chrono::milliseconds)>;

  GenerationService(GenerationClient& client, GenerationCache* cache,
                    RetryPolicy retry = {}, int concurrency = 4);

  // Replaces the real sleep (tests).
  void set_sleep(SleepFn sleep) { sleep_ = std::move(sleep); }

  GenerationOutcome Generate(const GenerationRequest& request);
  // Results are positionally aligned with `requests`.
  std::vector<GenerationOutcome> GenerateAll(
      const std::vector<GenerationRequest>& requests);

  int remote_calls() const { return remote_calls_.load(); }
  int concurrency() const { return concurrency_; }

 private:
  GenerationOutcome CallWithRetry(const GenerationRequest& request);

  GenerationClient& client_;
  GenerationCache* cache_;
  RetryPolicy retry_;
  int concurrency_;
  SleepFn sleep_;

  std::mutex slots_mu_;
  std::condition_variable slots_cv_;
  int slots_in_use_ = 0;

  std::mutex inflight_mu_;
  std::map<std::string, std::shared_future<GenerationOutcome>> inflight_;

  std::atomic<int> remote_calls_{0};
};

}  // namespace geocorpus

#endif  // GEOCORPUS_GENERATION_H_
