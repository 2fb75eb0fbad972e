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

#include "geocorpus/review_server.h"

#include <optional>

#include "geocorpus/text_util.h"

namespace geocorpus {
namespace {

void SendJson(httplib::Response& res, int status, const OrderedJson& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void SendError(httplib::Response& res, int status, const std::string& reason) {
  SendJson(res, status, {{"accepted", false}, {"error", reason}});
}

std::optional<std::string> BearerToken(const httplib::Request& req) {
  const std::string header = req.get_header_value("Authorization");
  constexpr std::string_view kPrefix = "Bearer ";
  if (header.size() <= kPrefix.size() || header.compare(0, kPrefix.size(), kPrefix) != 0) {
    return std::nullopt;
  }
  return std::string(Trim(std::string_view(header).substr(kPrefix.size())));
}

}  // namespace

ReviewTokens ReviewTokens::FromJson(const Json& j) {
  ReviewTokens t;
  t.admin_token = j.value("admin_token", "");
  if (auto it = j.find("reviewers"); it != j.end()) {
    for (const auto& [reviewer, token] : it->items()) {
      const std::string tok = token.get<std::string>();
      if (tok.empty()) throw ReviewError("empty token for reviewer " + reviewer);
      if (tok == t.admin_token || !t.reviewers.emplace(tok, reviewer).second) {
        throw ReviewError("token reused for reviewer " + reviewer);
      }
    }
  }
  return t;
}

ReviewTokens ReviewTokens::Load(const std::string& path) {
  return FromJson(Json::parse(ReadFile(path)));
}

struct ReviewServer::Impl {
  ReviewStore& store;
  ReviewTokens tokens;
  httplib::Server server;

  Impl(ReviewStore& s, ReviewTokens t) : store(s), tokens(std::move(t)) {}

  // Reviewer id for the request, or nullopt after writing a 401.
  std::optional<std::string> Reviewer(const httplib::Request& req, httplib::Response& res) {
    auto token = BearerToken(req);
    if (token) {
      if (auto it = tokens.reviewers.find(*token); it != tokens.reviewers.end()) {
        return it->second;
      }
    }
    SendError(res, 401, "missing or invalid token");
    return std::nullopt;
  }

  bool Admin(const httplib::Request& req, httplib::Response& res) {
    auto token = BearerToken(req);
    if (!token) {
      SendError(res, 401, "missing or invalid token");
      return false;
    }
    if (tokens.admin_token.empty() || *token != tokens.admin_token) {
      SendError(res, tokens.reviewers.count(*token) ? 403 : 401, "admin token required");
      return false;
    }
    return true;
  }

  void Routes() {
    server.Get("/api/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      auto reviewer = Reviewer(req, res);
      if (!reviewer) return;
      SendJson(res, 200, {{"sessions", store.SessionsPayload(*reviewer)}});
    });
    server.Get("/api/tasks/next", [this](const httplib::Request& req, httplib::Response& res) {
      auto reviewer = Reviewer(req, res);
      if (!reviewer) return;
      SendJson(res, 200, {{"task", store.NextTaskPayload(*reviewer)}});
    });
    server.Get(R"(/api/tasks/([^/]+))",
               [this](const httplib::Request& req, httplib::Response& res) {
                 auto reviewer = Reviewer(req, res);
                 if (!reviewer) return;
                 const std::string id = req.matches[1];
                 auto owner = store.TaskReviewer(id);
                 if (!owner) return SendError(res, 404, "unknown task: " + id);
                 if (*owner != *reviewer) {
                   return SendError(res, 403, "task not assigned to reviewer");
                 }
                 SendJson(res, 200, store.TaskPayload(id));
               });
    server.Post(R"(/api/tasks/([^/]+)/ranking)",
                [this](const httplib::Request& req, httplib::Response& res) {
                  auto reviewer = Reviewer(req, res);
                  if (!reviewer) return;
                  std::vector<std::string> ordering;
                  try {
                    ordering = Json::parse(req.body).at("ordering").get<std::vector<std::string>>();
                  } catch (const std::exception&) {
                    return SendError(res, 400, "body must be {\"ordering\": [labels]}");
                  }
                  Reply(res, store.SubmitRanking(req.matches[1], *reviewer, ordering));
                });
    server.Post(R"(/api/tasks/([^/]+)/executability)",
                [this](const httplib::Request& req, httplib::Response& res) {
                  auto reviewer = Reviewer(req, res);
                  if (!reviewer) return;
                  std::map<std::string, SampleVerdict> verdicts;
                  try {
                    const Json body = Json::parse(req.body);
                    for (const auto& [label, v] : body.at("verdicts").items()) {
                      SampleVerdict sv;
                      const std::string text =
                          v.is_string() ? v.get<std::string>() : v.at("verdict").get<std::string>();
                      auto parsed = ParseVerdict(text);
                      if (!parsed) return SendError(res, 422, "unknown verdict: " + text);
                      sv.verdict = *parsed;
                      if (v.is_object()) sv.note = v.value("note", "");
                      verdicts[label] = sv;
                    }
                  } catch (const std::exception&) {
                    return SendError(res, 400, "body must be {\"verdicts\": {label: verdict}}");
                  }
                  Reply(res, store.SubmitExecutability(req.matches[1], *reviewer, verdicts));
                });
    server.Get("/api/progress", [this](const httplib::Request& req, httplib::Response& res) {
      auto reviewer = Reviewer(req, res);
      if (!reviewer) return;
      SendJson(res, 200, store.ProgressPayload(*reviewer));
    });
    server.Get("/api/export", [this](const httplib::Request& req, httplib::Response& res) {
      if (!Admin(req, res)) return;
      const bool partial = req.get_param_value("partial") == "1" ||
                           req.get_param_value("partial") == "true";
      try {
        SendJson(res, 200, store.ExportUnblinded(partial).ToJson());
      } catch (const ReviewError& e) {
        SendError(res, 409, e.what());
      }
    });
    server.set_exception_handler(
        [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
          std::string what = "internal error";
          try {
            std::rethrow_exception(ep);
          } catch (const std::exception& e) {
            what = e.what();
          } catch (...) {
          }
          SendError(res, 500, what);
        });
  }

  static void Reply(httplib::Response& res, const SubmitResult& r) {
    if (r.accepted) {
      SendJson(res, 200, {{"accepted", true}});
    } else {
      SendJson(res, r.status, {{"accepted", false}, {"reason", r.reason}});
    }
  }
};

ReviewServer::ReviewServer(ReviewStore& store, ReviewTokens tokens, std::string static_dir)
    : impl_(std::make_unique<Impl>(store, std::move(tokens))) {
  impl_->Routes();
  if (!static_dir.empty() && !impl_->server.set_mount_point("/", static_dir)) {
    throw ReviewError("static directory not found: " + static_dir);
  }
}

ReviewServer::~ReviewServer() { Stop(); }

int ReviewServer::Start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw ReviewError("cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void ReviewServer::Run(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) {
    throw ReviewError("cannot listen on " + host + ":" + std::to_string(port));
  }
}

void ReviewServer::Stop() {
  if (impl_) impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace geocorpus
