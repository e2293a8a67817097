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

#pragma once

#include <chrono>
#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rolesim/json_util.hpp"
#include "rolesim/trace_filter.hpp"

namespace rolesim {

enum class Role { kSystem, kUser, kAssistant };

std::string_view to_string(Role role);
Role role_from_string(std::string_view s);

struct ChatMessage {
  Role role = Role::kUser;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

struct CompletionRequest {
  std::string model_id;
  std::vector<ChatMessage> messages;
  double temperature = 0.7;
  int max_tokens = 1024;
  // Routing label for scripted backends, e.g. "ep-3:npc.react.r1".
  std::string tag;
};

/// Throws InvalidArgument unless messages is non-empty, starts with a system
/// message, user/system contents are non-empty, temperature >= 0 and
/// max_tokens > 0.
void validate(const CompletionRequest& request);

/// Which model answers a role, and on which backend.
struct ModelBinding {
  std::string model_id;
  std::string backend;
  double temperature = 0.7;
  int max_tokens = 1024;
};

struct CompletionResult {
  std::string text;
  std::string filtered_text;
  int attempts = 0;
  std::chrono::nanoseconds latency{0};
};

enum class BackendKind { kHttp, kScripted };

struct BackoffConfig {
  std::chrono::milliseconds initial{250};
  double multiplier = 2.0;
  std::chrono::milliseconds cap{8000};
  // Fraction of each delay that may be randomly shaved off. Ignored for
  // scripted backends.
  double jitter = 0.2;
};

/// One scripted reply: a text response or an injected failure.
struct ScriptEntry {
  enum class Kind { kText, kTransient, kStatus };
  Kind kind = Kind::kText;
  std::string text;
  int status = 0;

  static ScriptEntry reply(std::string text) { return {Kind::kText, std::move(text), 0}; }
  static ScriptEntry transient() { return {Kind::kTransient, {}, 503}; }
  static ScriptEntry status_code(int status) { return {Kind::kStatus, {}, status}; }
};

using Script = std::map<std::string, std::vector<ScriptEntry>, std::less<>>;

/// Parses a script document: {"tag": ["reply", {"fail": "transient"},
/// {"fail": "status", "status": 400}], ...}.
Script parse_script(const json& doc);
json script_to_json(const Script& script);

struct BackendConfig {
  std::string name;
  BackendKind kind = BackendKind::kScripted;
  std::string base_url;  // http only, e.g. "http://localhost:8000"
  std::string api_key_env;  // empty: ROLESIM_API_KEY_<NAME>
  int max_attempts = 4;
  BackoffConfig backoff;
  int max_concurrency = 4;
  double requests_per_second = 0.0;  // 0 disables rate limiting
  std::chrono::seconds timeout{120};
  Script script;  // scripted only
  std::string embedding_model = "text-embedding-3-small";
  int embedding_dim = 64;  // scripted only
  TraceFilterConfig trace_filter;
};

/// Throws ConfigError when max_attempts < 1, max_concurrency < 1 or a
/// kind-specific field is missing.
void validate(const BackendConfig& config);

/// Exponential backoff schedule for one request. Delays never decrease from
/// one retry to the next and never exceed the cap, with or without jitter.
class Backoff {
 public:
  Backoff(BackoffConfig config, bool jitter_enabled, std::uint64_t seed);
  /// Delay before retry number `failures` (1 after the first failure).
  std::chrono::milliseconds next();

 private:
  BackoffConfig config_;
  bool jitter_enabled_;
  std::uint64_t state_;
  int failures_ = 0;
  std::chrono::milliseconds last_{0};
};

/// What a transport reports for one attempt.
struct TransportReply {
  enum class Kind { kOk, kTransient, kPermanent };
  Kind kind = Kind::kOk;
  std::string text;
  int status = 200;
  std::string detail;
};

struct EmbeddingReply {
  TransportReply::Kind kind = TransportReply::Kind::kOk;
  std::vector<double> vector;
  int status = 200;
  std::string detail;
};

/// One attempt against a concrete endpoint. Retries, limits and filtering
/// live in Gateway, not here.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual TransportReply complete(const CompletionRequest& request) = 0;
  virtual EmbeddingReply embed(std::string_view text) = 0;
  virtual bool deterministic() const = 0;
};

struct BackendStats {
  int in_flight = 0;
  int max_in_flight = 0;
  long requests = 0;
  long attempts = 0;
};

class Gateway {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  Gateway();
  ~Gateway();
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  /// Registers a backend, building the transport its kind calls for.
  void add_backend(BackendConfig config);
  /// Registers a backend over a caller-supplied transport (tests, probes).
  void add_backend(BackendConfig config, std::shared_ptr<Transport> transport);

  bool has_backend(std::string_view name) const;
  const BackendConfig& backend_config(std::string_view name) const;
  /// True when every registered backend is deterministic (scripted).
  bool all_deterministic() const;
  BackendStats stats(std::string_view backend) const;

  /// Runs `request` on `backend` with retries, concurrency bounding, rate
  /// limiting and trace filtering.
  ///
  /// Errors: BackendUnavailable after max_attempts transient failures,
  /// NonRetryable(status) on a permanent failure, ScriptExhausted(tag) from
  /// scripted backends, UnterminatedTrace from the filter.
  CompletionResult complete(std::string_view backend, const CompletionRequest& request);

  /// Embedding vector for non-empty text. Throws EmptyText on blank input.
  std::vector<double> embed(std::string_view backend, std::string_view text);

  /// Replaces the sleep used between retries and for rate limiting.
  void set_sleeper(Sleeper sleeper);

 private:
  struct Slot;
  Slot& slot(std::string_view name) const;
  template <typename Reply, typename Call>
  Reply run_with_retries(Slot& s, const std::string& what, std::uint64_t seed,
                         int& attempts, Call&& call);

  std::map<std::string, std::unique_ptr<Slot>, std::less<>> slots_;
  Sleeper sleeper_;
};

}  // namespace rolesim
