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

#include <cctype>
#include <cstdlib>

#include "rolesim/backends.hpp"
#include "rolesim/error.hpp"
#include "rolesim/text.hpp"

namespace rolesim {

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path prefix without trailing '/'
};

Endpoint split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  const auto path_start =
      url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  Endpoint e;
  if (path_start == std::string::npos) {
    e.origin = url;
  } else {
    e.origin = url.substr(0, path_start);
    e.prefix = url.substr(path_start);
    while (!e.prefix.empty() && e.prefix.back() == '/') e.prefix.pop_back();
  }
  return e;
}

bool transient_status(int status) {
  return status == 408 || status == 409 || status == 429 || status >= 500;
}

class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(BackendConfig config)
      : config_(std::move(config)), endpoint_(split_url(config_.base_url)) {
    if (const char* key = std::getenv(api_key_variable(config_).c_str())) api_key_ = key;
  }

  TransportReply complete(const CompletionRequest& request) override {
    json body{{"model", request.model_id},
              {"temperature", request.temperature},
              {"max_tokens", request.max_tokens},
              {"messages", json::array()}};
    for (const auto& m : request.messages) {
      body["messages"].push_back({{"role", to_string(m.role)}, {"content", m.content}});
    }
    TransportReply reply;
    auto parsed = post("/v1/chat/completions", body, reply.kind, reply.status, reply.detail);
    if (!parsed) return reply;
    try {
      const auto& content = parsed->at("choices").at(0).at("message").at("content");
      reply.text = content.is_null() ? std::string() : content.get<std::string>();
    } catch (const json::exception& e) {
      reply.kind = TransportReply::Kind::kPermanent;
      reply.detail = std::string("malformed chat response: ") + e.what();
    }
    return reply;
  }

  EmbeddingReply embed(std::string_view text) override {
    json body{{"model", config_.embedding_model}, {"input", std::string(text)}};
    EmbeddingReply reply;
    auto parsed = post("/v1/embeddings", body, reply.kind, reply.status, reply.detail);
    if (!parsed) return reply;
    try {
      reply.vector = parsed->at("data").at(0).at("embedding").get<std::vector<double>>();
    } catch (const json::exception& e) {
      reply.kind = TransportReply::Kind::kPermanent;
      reply.detail = std::string("malformed embedding response: ") + e.what();
    }
    return reply;
  }

  bool deterministic() const override { return false; }

 private:
  std::optional<json> post(const std::string& path, const json& body,
                           TransportReply::Kind& kind, int& status, std::string& detail) {
    httplib::Client client(endpoint_.origin);
    const auto t = static_cast<time_t>(config_.timeout.count());
    client.set_connection_timeout(t < 10 ? t : 10, 0);
    client.set_read_timeout(t, 0);
    client.set_write_timeout(t, 0);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    auto res = client.Post(endpoint_.prefix + path, headers, body.dump(), "application/json");
    if (!res) {
      kind = TransportReply::Kind::kTransient;
      status = 0;
      detail = "transport error: " + httplib::to_string(res.error());
      return std::nullopt;
    }
    status = res->status;
    if (res->status != 200) {
      kind = transient_status(res->status) ? TransportReply::Kind::kTransient
                                           : TransportReply::Kind::kPermanent;
      detail = res->body.substr(0, 300);
      return std::nullopt;
    }
    auto parsed = json::parse(res->body, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded()) {
      kind = TransportReply::Kind::kPermanent;
      detail = "response body is not JSON";
      return std::nullopt;
    }
    kind = TransportReply::Kind::kOk;
    return parsed;
  }

  BackendConfig config_;
  Endpoint endpoint_;
  std::string api_key_;
};

}  // namespace

std::string api_key_variable(const BackendConfig& config) {
  if (!config.api_key_env.empty()) return config.api_key_env;
  std::string name;
  for (char c : config.name) {
    name.push_back(std::isalnum(static_cast<unsigned char>(c))
                       ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
                       : '_');
  }
  return "ROLESIM_API_KEY_" + name;
}

std::shared_ptr<Transport> make_http_transport(const BackendConfig& config) {
  return std::make_shared<HttpTransport>(config);
}

}  // namespace rolesim
