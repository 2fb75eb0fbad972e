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

#include <httplib.h>

#include <cstdlib>
#include <fstream>
#include <thread>

#include "geocorpus/generation.h"
#include "test_util.h"

namespace geocorpus {
namespace {

using testing::TempDir;

GenerationRequest Req(const std::string& prompt, int variant = 0) {
  GenerationRequest r;
  r.prompt = prompt;
  r.variant = variant;
  return r;
}

TEST(GenerationRequest, IdCoversEveryField) {
  GenerationRequest a = Req("p");
  GenerationRequest b = a;
  EXPECT_EQ(a.RequestId(), b.RequestId());
  EXPECT_EQ(a.RequestId().size(), 64u);
  b.variant = 1;
  EXPECT_NE(a.RequestId(), b.RequestId());
  b = a;
  b.max_output_tokens = 64;
  EXPECT_NE(a.RequestId(), b.RequestId());
  b = a;
  b.temperature = 0.7;
  EXPECT_NE(a.RequestId(), b.RequestId());
}

TEST(RetryPolicy, BackoffDoublesAndCaps) {
  RetryPolicy p;
  EXPECT_EQ(p.BackoffAfter(1).count(), 500);
  EXPECT_EQ(p.BackoffAfter(2).count(), 1000);
  EXPECT_EQ(p.BackoffAfter(3).count(), 2000);
  EXPECT_EQ(p.BackoffAfter(20).count(), 30000);
}

TEST(StubClient, LookupOrderIsExactThenRulesThenDefault) {
  GenerationRequest exact = Req("Summarize this exactly");
  Json fixture = {
      {"responses", {{exact.RequestId(), "exact"}}},
      {"rules",
       {{{"contains", "Summarize"}, {"response", "rule1"}},
        {{"contains", "this"}, {"response", "rule2"}}}},
      {"default", "fallback"}};
  auto stub = StubGenerationClient::FromFixture(fixture);
  EXPECT_EQ(stub->Generate(exact), "exact");
  EXPECT_EQ(stub->Generate(Req("Summarize that")), "rule1");
  EXPECT_EQ(stub->Generate(Req("and this")), "rule2");
  EXPECT_EQ(stub->Generate(Req("other")), "fallback");
  EXPECT_EQ(stub->calls(), 4);
}

TEST(StubClient, MissingResponseIsPermanentError) {
  auto stub = StubGenerationClient::FromFixture(Json::object());
  try {
    stub->Generate(Req("x"));
    FAIL() << "expected GenerationError";
  } catch (const GenerationError& e) {
    EXPECT_FALSE(e.transient());
  }
}

TEST(StubClient, ShippedFixtureLoads) {
  auto stub = StubGenerationClient::FromFile(testing::SourcePath("fixtures/stub.json"));
  EXPECT_EQ(stub->Generate(Req("... Reply with the letter ...")), "B");
}

TEST(GenerationCache, PersistsAndLaterLinesWin) {
  TempDir dir("cache");
  const std::string path = dir.File("cache.jsonl");
  {
    GenerationCache cache(path);
    cache.Put("a", "one");
    cache.Put("b", "two");
    cache.Put("a", "three");
  }
  GenerationCache reloaded(path);
  EXPECT_EQ(reloaded.size(), 2u);
  EXPECT_EQ(reloaded.Get("a").value_or(""), "three");
  EXPECT_EQ(reloaded.Get("b").value_or(""), "two");
  EXPECT_FALSE(reloaded.Get("c").has_value());
}

TEST(GenerationCache, TornFinalLineIsSkipped) {
  TempDir dir("cache");
  const std::string path = dir.File("cache.jsonl");
  {
    std::ofstream f(path);
    f << R"({"request_id":"a","response":"ok"})" << "\n"
      << R"({"request_id":"b","resp)";
  }
  GenerationCache cache(path);
  EXPECT_EQ(cache.size(), 1u);
  EXPECT_EQ(cache.Get("a").value_or(""), "ok");
  cache.Put("c", "new");
  GenerationCache again(path);
  EXPECT_EQ(again.Get("c").value_or(""), "new");
}

TEST(GenerationCache, MemoryOnly) {
  GenerationCache cache;
  cache.Put("k", "v");
  EXPECT_EQ(cache.Get("k").value_or(""), "v");
}

class RecordingSleep {
 public:
  GenerationService::SleepFn fn() {
    return [this](std::chrono::milliseconds d) {
      std::lock_guard<std::mutex> lock(mu_);
      waits_.push_back(d.count());
    };
  }
  std::vector<int64_t> waits() {
    std::lock_guard<std::mutex> lock(mu_);
    return waits_;
  }

 private:
  std::mutex mu_;
  std::vector<int64_t> waits_;
};

TEST(GenerationService, RetriesTransientErrorsWithBackoff) {
  int failures = 2;
  StubGenerationClient stub([&](const GenerationRequest&) -> std::string {
    if (failures-- > 0) throw GenerationError("busy", true);
    return "done";
  });
  GenerationService service(stub, nullptr);
  RecordingSleep sleep;
  service.set_sleep(sleep.fn());
  GenerationOutcome out = service.Generate(Req("p"));
  EXPECT_TRUE(out.ok);
  EXPECT_EQ(out.text, "done");
  EXPECT_EQ(out.attempts, 3);
  EXPECT_EQ(sleep.waits(), (std::vector<int64_t>{500, 1000}));
}

TEST(GenerationService, GivesUpAfterMaxAttempts) {
  StubGenerationClient stub([](const GenerationRequest&) -> std::string {
    throw GenerationError("busy", true);
  });
  GenerationService service(stub, nullptr);
  RecordingSleep sleep;
  service.set_sleep(sleep.fn());
  GenerationOutcome out = service.Generate(Req("p"));
  EXPECT_FALSE(out.ok);
  EXPECT_EQ(out.attempts, 3);
  EXPECT_EQ(stub.calls(), 3);
  EXPECT_EQ(out.error, "busy");
}

TEST(GenerationService, PermanentErrorIsNotRetried) {
  StubGenerationClient stub([](const GenerationRequest&) -> std::string {
    throw GenerationError("bad request", false);
  });
  GenerationService service(stub, nullptr);
  RecordingSleep sleep;
  service.set_sleep(sleep.fn());
  GenerationOutcome out = service.Generate(Req("p"));
  EXPECT_FALSE(out.ok);
  EXPECT_EQ(out.attempts, 1);
  EXPECT_TRUE(sleep.waits().empty());
}

TEST(GenerationService, CacheHitsSkipTheClient) {
  StubGenerationClient stub([](const GenerationRequest& r) { return "re:" + r.prompt; });
  GenerationCache cache;
  GenerationService service(stub, &cache);
  EXPECT_FALSE(service.Generate(Req("a")).from_cache);
  GenerationOutcome second = service.Generate(Req("a"));
  EXPECT_TRUE(second.from_cache);
  EXPECT_EQ(second.text, "re:a");
  EXPECT_EQ(stub.calls(), 1);
  EXPECT_EQ(service.remote_calls(), 1);
}

TEST(GenerationService, FailuresAreNotCached) {
  int n = 0;
  StubGenerationClient stub([&](const GenerationRequest&) -> std::string {
    if (n++ == 0) throw GenerationError("nope", false);
    return "ok";
  });
  GenerationCache cache;
  GenerationService service(stub, &cache);
  EXPECT_FALSE(service.Generate(Req("a")).ok);
  EXPECT_EQ(cache.size(), 0u);
  EXPECT_TRUE(service.Generate(Req("a")).ok);
}

TEST(GenerationService, ConcurrencyIsBounded) {
  StubGenerationClient stub([](const GenerationRequest& r) {
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    return r.prompt;
  });
  GenerationService service(stub, nullptr, RetryPolicy{}, 3);
  std::vector<GenerationRequest> reqs;
  for (int i = 0; i < 24; ++i) reqs.push_back(Req("p" + std::to_string(i)));
  auto outs = service.GenerateAll(reqs);
  ASSERT_EQ(outs.size(), reqs.size());
  for (size_t i = 0; i < outs.size(); ++i) {
    EXPECT_TRUE(outs[i].ok);
    EXPECT_EQ(outs[i].text, reqs[i].prompt);
  }
  EXPECT_LE(stub.max_in_flight(), 3);
  EXPECT_GE(stub.max_in_flight(), 1);
}

TEST(GenerationService, DuplicateRequestsInFlightShareOneCall) {
  StubGenerationClient stub([](const GenerationRequest&) {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    return std::string("same");
  });
  GenerationService service(stub, nullptr, RetryPolicy{}, 8);
  std::vector<GenerationRequest> reqs(8, Req("dup"));
  auto outs = service.GenerateAll(reqs);
  for (const auto& o : outs) EXPECT_EQ(o.text, "same");
  EXPECT_EQ(stub.calls(), 1);
}

// Minimal chat-completions server on an ephemeral port.
class FakeEndpoint {
 public:
  explicit FakeEndpoint(httplib::Server::Handler handler) {
    server_.Post("/v1/chat/completions", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeEndpoint() {
    server_.stop();
    thread_.join();
  }
  std::string url() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST(HttpClient, SendsChatBodyWithBearerToken) {
  std::string auth;
  Json seen;
  FakeEndpoint ep([&](const httplib::Request& req, httplib::Response& res) {
    auth = req.get_header_value("Authorization");
    seen = Json::parse(req.body);
    res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"hi"}}]})",
                    "application/json");
  });
  HttpGenerationClient client({ep.url(), "m-1", "tok", std::chrono::seconds(5)});
  GenerationRequest r = Req("hello");
  r.max_output_tokens = 64;
  EXPECT_EQ(client.Generate(r), "hi");
  EXPECT_EQ(auth, "Bearer tok");
  EXPECT_EQ(seen["model"], "m-1");
  EXPECT_EQ(seen["messages"][0]["role"], "user");
  EXPECT_EQ(seen["messages"][0]["content"], "hello");
  EXPECT_EQ(seen["max_tokens"], 64);
  EXPECT_EQ(seen["temperature"], 0.0);
}

TEST(HttpClient, RateLimitIsRetriedThroughService) {
  std::atomic<int> hits{0};
  FakeEndpoint ep([&](const httplib::Request&, httplib::Response& res) {
    if (hits++ == 0) {
      res.status = 429;
      return;
    }
    res.set_content(R"({"text":"later"})", "application/json");
  });
  HttpGenerationClient client({ep.url(), "m", "", std::chrono::seconds(5)});
  GenerationService service(client, nullptr);
  service.set_sleep([](std::chrono::milliseconds) {});
  GenerationOutcome out = service.Generate(Req("x"));
  EXPECT_TRUE(out.ok);
  EXPECT_EQ(out.text, "later");
  EXPECT_EQ(out.attempts, 2);
}

TEST(HttpClient, StatusClassification) {
  int status = 400;
  FakeEndpoint ep([&](const httplib::Request&, httplib::Response& res) {
    res.status = status;
  });
  HttpGenerationClient client({ep.url(), "m", "", std::chrono::seconds(5)});
  for (int s : {400, 401, 404}) {
    status = s;
    try {
      client.Generate(Req("x"));
      FAIL();
    } catch (const GenerationError& e) {
      EXPECT_FALSE(e.transient()) << s;
    }
  }
  for (int s : {429, 500, 503}) {
    status = s;
    try {
      client.Generate(Req("x"));
      FAIL();
    } catch (const GenerationError& e) {
      EXPECT_TRUE(e.transient()) << s;
    }
  }
}

TEST(HttpClient, NonJsonBodyIsPermanent) {
  FakeEndpoint ep([](const httplib::Request&, httplib::Response& res) {
    res.set_content("<html>", "text/html");
  });
  HttpGenerationClient client({ep.url(), "m", "", std::chrono::seconds(5)});
  try {
    client.Generate(Req("x"));
    FAIL();
  } catch (const GenerationError& e) {
    EXPECT_FALSE(e.transient());
  }
}

TEST(HttpClient, ConnectionFailureIsTransient) {
  HttpGenerationClient client(
      {"http://127.0.0.1:1/v1/chat/completions", "m", "", std::chrono::seconds(2)});
  try {
    client.Generate(Req("x"));
    FAIL();
  } catch (const GenerationError& e) {
    EXPECT_TRUE(e.transient());
  }
}

TEST(HttpClient, UrlWithoutSchemeIsRejected) {
  EXPECT_THROW(HttpGenerationClient({"localhost:8000/v1", "m", "", {}}),
               std::invalid_argument);
}

TEST(HttpClient, ExtractTextVariants) {
  EXPECT_EQ(HttpGenerationClient::ExtractText(
                Json::parse(R"({"choices":[{"message":{"content":"a"}}]})")),
            "a");
  EXPECT_EQ(HttpGenerationClient::ExtractText(Json::parse(R"({"choices":[{"text":"b"}]})")),
            "b");
  EXPECT_EQ(HttpGenerationClient::ExtractText(Json::parse(R"({"text":"c"})")), "c");
  EXPECT_FALSE(HttpGenerationClient::ExtractText(Json::parse(R"({"choices":[]})")));
  EXPECT_FALSE(HttpGenerationClient::ExtractText(Json::parse("[1]")));
}

TEST(ResolveToken, EnvironmentBeatsFile) {
  TempDir dir("token");
  {
    std::ofstream f(dir.File("tok"));
    f << "  from-file\n";
  }
  ::unsetenv("GEOCORPUS_TEST_TOKEN");
  EXPECT_EQ(ResolveToken("GEOCORPUS_TEST_TOKEN", dir.File("tok")), "from-file");
  ::setenv("GEOCORPUS_TEST_TOKEN", "from-env", 1);
  EXPECT_EQ(ResolveToken("GEOCORPUS_TEST_TOKEN", dir.File("tok")), "from-env");
  ::unsetenv("GEOCORPUS_TEST_TOKEN");
  EXPECT_EQ(ResolveToken("GEOCORPUS_TEST_TOKEN", ""), "");
}

}  // namespace
}  // namespace geocorpus
