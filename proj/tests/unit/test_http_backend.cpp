// Copyright 2026 The rolesim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <mutex>
#include <thread>

#include "rolesim/error.hpp"
#include "rolesim/gateway.hpp"

using namespace rolesim;

namespace {

// OpenAI-compatible stub on an ephemeral local port.
class StubServer {
 public:
  StubServer() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      {
        std::lock_guard lock(mu_);
        auth_ = req.get_header_value("Authorization");
        last_body_ = json::parse(req.body);
      }
      const int n = ++chat_calls_;
      if (n <= fail_first_) {
        res.status = 503;
        res.set_content("busy", "text/plain");
        return;
      }
      if (reject_) {
        res.status = 401;
        res.set_content("{\"error\":\"bad key\"}", "application/json");
        return;
      }
      const json reply{{"choices", {{{"message", {{"role", "assistant"}, {"content", "<think>x</think>Hi!"}}}}}}};
      res.set_content(reply.dump(), "application/json");
    });
    server_.Post("/v1/embeddings", [](const httplib::Request&, httplib::Response& res) {
      const json reply{{"data", {{{"embedding", {0.6, 0.8}}}}}};
      res.set_content(reply.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  std::string auth() {
    std::lock_guard lock(mu_);
    return auth_;
  }
  json last_body() {
    std::lock_guard lock(mu_);
    return last_body_;
  }

  std::atomic<int> chat_calls_{0};
  int fail_first_ = 0;
  bool reject_ = false;

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::mutex mu_;
  std::string auth_;
  json last_body_;
};

BackendConfig http_backend(const std::string& url) {
  BackendConfig c;
  c.name = "local";
  c.kind = BackendKind::kHttp;
  c.base_url = url;
  c.max_attempts = 3;
  c.timeout = std::chrono::seconds(5);
  c.backoff.initial = std::chrono::milliseconds(1);
  c.backoff.cap = std::chrono::milliseconds(2);
  return c;
}

CompletionRequest request() {
  CompletionRequest r;
  r.model_id = "tiny";
  r.messages = {{Role::kSystem, "be brief"}, {Role::kUser, "hello"}};
  r.temperature = 0.2;
  r.max_tokens = 16;
  r.tag = "probe";
  return r;
}

}  // namespace

TEST_CASE("chat completion over HTTP with retry and credentials from the environment") {
  StubServer stub;
  stub.fail_first_ = 1;
  ::setenv("ROLESIM_API_KEY_LOCAL", "test-secret", 1);
  Gateway gw;
  gw.add_backend(http_backend(stub.url()));
  const auto r = gw.complete("local", request());
  ::unsetenv("ROLESIM_API_KEY_LOCAL");
  CHECK(r.text == "<think>x</think>Hi!");
  CHECK(r.filtered_text == "Hi!");
  CHECK(r.attempts == 2);
  CHECK(stub.auth() == "Bearer test-secret");
  const json body = stub.last_body();
  CHECK(body["model"] == "tiny");
  CHECK(body["max_tokens"] == 16);
  CHECK(body["messages"][0]["role"] == "system");
  CHECK(body["messages"][1]["content"] == "hello");
  CHECK_FALSE(gw.all_deterministic());
}

TEST_CASE("a rejected key is not retried") {
  StubServer stub;
  stub.reject_ = true;
  Gateway gw;
  gw.add_backend(http_backend(stub.url()));
  try {
    gw.complete("local", request());
    FAIL("expected NonRetryable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNonRetryable);
    CHECK(e.status() == 401);
  }
  CHECK(stub.chat_calls_ == 1);
}

TEST_CASE("embeddings over HTTP") {
  StubServer stub;
  Gateway gw;
  gw.add_backend(http_backend(stub.url()));
  CHECK(gw.embed("local", "some text") == std::vector<double>{0.6, 0.8});
}

TEST_CASE("an unreachable server exhausts the retries") {
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  Gateway gw;
  auto c = http_backend("http://127.0.0.1:" + std::to_string(port));
  c.timeout = std::chrono::seconds(1);
  gw.add_backend(c);
  gw.set_sleeper([](std::chrono::milliseconds) {});
  try {
    gw.complete("local", request());
    FAIL("expected BackendUnavailable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kBackendUnavailable);
  }
  CHECK(gw.stats("local").attempts == 3);
}
