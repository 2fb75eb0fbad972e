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

#include "httplib.h"

#include "geocorpus/generation.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include "geocorpus/hashing.h"
#include "geocorpus/parallel.h"
#include "geocorpus/text_util.h"

namespace geocorpus {

std::string GenerationRequest::RequestId() const {
  OrderedJson j = {{"prompt", prompt},
                   {"max_output_tokens", max_output_tokens},
                   {"temperature", temperature},
                   {"variant", variant}};
  return Sha256Hex(j.dump());
}

std::chrono::milliseconds RetryPolicy::BackoffAfter(int attempt) const {
  double ms = static_cast<double>(initial_backoff.count());
  for (int i = 1; i < attempt; ++i) ms *= multiplier;
  ms = std::min(ms, static_cast<double>(max_backoff.count()));
  return std::chrono::milliseconds(static_cast<int64_t>(ms));
}

// ---------------------------------------------------------------------------

GenerationCache::GenerationCache(std::string path) : path_(std::move(path)) {
  if (path_.empty() || !std::filesystem::exists(path_)) return;
  std::ifstream in(path_);
  std::string line;
  while (std::getline(in, line)) {
    if (Trim(line).empty()) continue;
    try {
      Json j = Json::parse(line);
      entries_[j.at("request_id").get<std::string>()] = j.at("response").get<std::string>();
    } catch (const std::exception&) {
      // A torn final line from an interrupted write; earlier entries stand.
      continue;
    }
  }
}

std::optional<std::string> GenerationCache::Get(const std::string& request_id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(request_id);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void GenerationCache::Put(const std::string& request_id, const std::string& response) {
  std::lock_guard<std::mutex> lock(mu_);
  entries_[request_id] = response;
  if (path_.empty()) return;
  std::filesystem::path p(path_);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  const bool torn = EndsWithoutNewline(path_);
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out) throw std::runtime_error("cannot append to cache: " + path_);
  if (torn) out << '\n';
  out << OrderedJson{{"request_id", request_id}, {"response", response}}.dump() << '\n';
  out.flush();
}

size_t GenerationCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

// ---------------------------------------------------------------------------

StubGenerationClient::StubGenerationClient(Script script) : script_(std::move(script)) {}

std::unique_ptr<StubGenerationClient> StubGenerationClient::FromFixture(
    const Json& fixture) {
  std::map<std::string, std::string> responses;
  if (auto it = fixture.find("responses"); it != fixture.end()) {
    responses = it->get<std::map<std::string, std::string>>();
  }
  std::vector<std::pair<std::string, std::string>> rules;
  if (auto it = fixture.find("rules"); it != fixture.end()) {
    for (const auto& r : *it) {
      rules.emplace_back(r.at("contains").get<std::string>(),
                         r.at("response").get<std::string>());
    }
  }
  std::optional<std::string> fallback;
  if (auto it = fixture.find("default"); it != fixture.end() && it->is_string()) {
    fallback = it->get<std::string>();
  }
  return std::make_unique<StubGenerationClient>(
      [responses, rules, fallback](const GenerationRequest& req) -> std::string {
        if (auto it = responses.find(req.RequestId()); it != responses.end()) {
          return it->second;
        }
        for (const auto& [needle, response] : rules) {
          if (req.prompt.find(needle) != std::string::npos) return response;
        }
        if (fallback) return *fallback;
        throw GenerationError("stub has no response for request " + req.RequestId(),
                              /*transient=*/false);
      });
}

std::unique_ptr<StubGenerationClient> StubGenerationClient::FromFile(
    const std::string& path) {
  return FromFixture(Json::parse(ReadFile(path)));
}

std::string StubGenerationClient::Generate(const GenerationRequest& request) {
  ++calls_;
  const int now = ++in_flight_;
  int seen = max_in_flight_.load();
  while (now > seen && !max_in_flight_.compare_exchange_weak(seen, now)) {
  }
  struct Leave {
    std::atomic<int>& n;
    ~Leave() { --n; }
  } leave{in_flight_};
  return script_(request);
}

// ---------------------------------------------------------------------------

HttpGenerationClient::HttpGenerationClient(HttpClientConfig config)
    : config_(std::move(config)) {
  const size_t scheme_end = config_.url.find("://");
  if (scheme_end == std::string::npos) {
    throw std::invalid_argument("endpoint url needs a scheme: " + config_.url);
  }
  const size_t path_start = config_.url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    scheme_host_ = config_.url;
    path_ = "/";
  } else {
    scheme_host_ = config_.url.substr(0, path_start);
    path_ = config_.url.substr(path_start);
  }
}

std::optional<std::string> HttpGenerationClient::ExtractText(const Json& body) {
  if (!body.is_object()) return std::nullopt;
  if (auto it = body.find("choices"); it != body.end() && it->is_array() && !it->empty()) {
    const Json& first = (*it)[0];
    if (auto m = first.find("message"); m != first.end() && m->contains("content") &&
                                        (*m)["content"].is_string()) {
      return (*m)["content"].get<std::string>();
    }
    if (auto t = first.find("text"); t != first.end() && t->is_string()) {
      return t->get<std::string>();
    }
  }
  if (auto t = body.find("text"); t != body.end() && t->is_string()) {
    return t->get<std::string>();
  }
  return std::nullopt;
}

std::string HttpGenerationClient::Generate(const GenerationRequest& request) {
  httplib::Client cli(scheme_host_);
  const auto timeout = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  cli.set_connection_timeout(timeout);
  cli.set_read_timeout(timeout);
  httplib::Headers headers;
  if (!config_.token.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.token);
  }
  OrderedJson body = {{"model", config_.model},
                      {"messages", {{{"role", "user"}, {"content", request.prompt}}}},
                      {"max_tokens", request.max_output_tokens},
                      {"temperature", request.temperature}};
  auto res = cli.Post(path_, headers, body.dump(), "application/json");
  if (!res) {
    throw GenerationError("connection failed: " + httplib::to_string(res.error()),
                          /*transient=*/true);
  }
  if (res->status == 429 || res->status >= 500) {
    throw GenerationError("server returned " + std::to_string(res->status),
                          /*transient=*/true);
  }
  if (res->status < 200 || res->status >= 300) {
    throw GenerationError("server returned " + std::to_string(res->status),
                          /*transient=*/false);
  }
  Json parsed;
  try {
    parsed = Json::parse(res->body);
  } catch (const Json::parse_error&) {
    throw GenerationError("response is not JSON", /*transient=*/false);
  }
  auto text = ExtractText(parsed);
  if (!text) throw GenerationError("response has no text field", /*transient=*/false);
  return *text;
}

std::string ResolveToken(const std::string& env_var, const std::string& token_file) {
  if (!env_var.empty()) {
    if (const char* v = std::getenv(env_var.c_str()); v != nullptr && *v != '\0') {
      return std::string(Trim(v));
    }
  }
  if (!token_file.empty()) return std::string(Trim(ReadFile(token_file)));
  return "";
}

// ---------------------------------------------------------------------------

GenerationService::GenerationService(GenerationClient& client, GenerationCache* cache,
                                     RetryPolicy retry, int concurrency)
    : client_(client),
      cache_(cache),
      retry_(retry),
      concurrency_(std::max(1, concurrency)),
      sleep_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }) {}

GenerationOutcome GenerationService::CallWithRetry(const GenerationRequest& request) {
  GenerationOutcome out;
  for (int attempt = 1; attempt <= std::max(1, retry_.max_attempts); ++attempt) {
    out.attempts = attempt;
    {
      std::unique_lock<std::mutex> lock(slots_mu_);
      slots_cv_.wait(lock, [&] { return slots_in_use_ < concurrency_; });
      ++slots_in_use_;
    }
    bool transient = false;
    try {
      ++remote_calls_;
      out.text = client_.Generate(request);
      out.ok = true;
    } catch (const GenerationError& e) {
      out.error = e.what();
      transient = e.transient();
    } catch (const std::exception& e) {
      out.error = e.what();
    }
    {
      std::lock_guard<std::mutex> lock(slots_mu_);
      --slots_in_use_;
    }
    slots_cv_.notify_one();
    if (out.ok || !transient) break;
    if (attempt < retry_.max_attempts) sleep_(retry_.BackoffAfter(attempt));
  }
  return out;
}

GenerationOutcome GenerationService::Generate(const GenerationRequest& request) {
  const std::string id = request.RequestId();
  if (cache_) {
    if (auto hit = cache_->Get(id)) {
      GenerationOutcome out;
      out.ok = true;
      out.text = *hit;
      out.from_cache = true;
      return out;
    }
  }
  std::promise<GenerationOutcome> promise;
  std::shared_future<GenerationOutcome> existing;
  bool owner = false;
  {
    std::lock_guard<std::mutex> lock(inflight_mu_);
    auto it = inflight_.find(id);
    if (it == inflight_.end()) {
      // An owner fills the cache before leaving inflight_, so a second look
      // here closes the window between the first lookup and this lock.
      if (cache_) {
        if (auto hit = cache_->Get(id)) {
          GenerationOutcome out;
          out.ok = true;
          out.text = *hit;
          out.from_cache = true;
          return out;
        }
      }
      inflight_.emplace(id, promise.get_future().share());
      owner = true;
    } else {
      existing = it->second;
    }
  }
  if (!owner) return existing.get();

  GenerationOutcome out = CallWithRetry(request);
  if (out.ok && cache_) cache_->Put(id, out.text);
  promise.set_value(out);
  {
    std::lock_guard<std::mutex> lock(inflight_mu_);
    inflight_.erase(id);
  }
  return out;
}

std::vector<GenerationOutcome> GenerationService::GenerateAll(
    const std::vector<GenerationRequest>& requests) {
  std::vector<GenerationOutcome> out(requests.size());
  ParallelFor(requests.size(), concurrency_,
              [&](size_t i) { out[i] = Generate(requests[i]); });
  return out;
}

}  // namespace geocorpus
