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

#include "rolesim/gateway.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <spdlog/spdlog.h>

#include "rolesim/backends.hpp"
#include "rolesim/error.hpp"
#include "rolesim/rng.hpp"
#include "rolesim/text.hpp"

namespace rolesim {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::kSystem: return "system";
    case Role::kUser: return "user";
    case Role::kAssistant: return "assistant";
  }
  return "user";
}

Role role_from_string(std::string_view s) {
  if (s == "system") return Role::kSystem;
  if (s == "user") return Role::kUser;
  if (s == "assistant") return Role::kAssistant;
  fail(ErrorCode::kParseError, "unknown chat role '" + std::string(s) + "'");
}

void validate(const CompletionRequest& request) {
  require(!request.messages.empty(), "completion request has no messages");
  require(request.messages.front().role == Role::kSystem,
          "first message must have role system");
  for (const auto& m : request.messages) {
    if (m.role != Role::kAssistant) {
      require(!m.content.empty(), "empty " + std::string(to_string(m.role)) + " message");
    }
  }
  require(request.temperature >= 0.0, "temperature must be >= 0");
  require(request.max_tokens > 0, "max_tokens must be positive");
}

void validate(const BackendConfig& config) {
  auto bad = [&](const std::string& why) {
    fail(ErrorCode::kConfigError, "backend '" + config.name + "': " + why);
  };
  if (config.name.empty()) bad("missing name");
  if (config.max_attempts < 1) bad("max_attempts must be >= 1");
  if (config.max_concurrency < 1) bad("max_concurrency must be >= 1");
  if (config.backoff.multiplier < 1.0) bad("backoff multiplier must be >= 1");
  if (config.backoff.initial.count() < 0 || config.backoff.cap < config.backoff.initial) {
    bad("backoff needs 0 <= initial <= cap");
  }
  if (config.kind == BackendKind::kHttp && config.base_url.empty()) bad("http backend needs base_url");
  if (config.kind == BackendKind::kScripted && config.embedding_dim < 1) bad("embedding_dim must be >= 1");
}

Script parse_script(const json& doc) {
  if (!doc.is_object()) fail(ErrorCode::kParseError, "script must be a JSON object");
  Script script;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!it.value().is_array()) {
      fail(ErrorCode::kParseError, "script tag '" + it.key() + "' must map to an array");
    }
    auto& entries = script[it.key()];
    for (const auto& e : it.value()) {
      if (e.is_string()) {
        entries.push_back(ScriptEntry::reply(e.get<std::string>()));
      } else if (e.is_object() && e.value("fail", "") == "transient") {
        entries.push_back(ScriptEntry::transient());
      } else if (e.is_object() && e.value("fail", "") == "status") {
        entries.push_back(ScriptEntry::status_code(e.value("status", 400)));
      } else {
        fail(ErrorCode::kParseError, "bad script entry under '" + it.key() + "'");
      }
    }
  }
  return script;
}

json script_to_json(const Script& script) {
  json doc = json::object();
  for (const auto& [tag, entries] : script) {
    json arr = json::array();
    for (const auto& e : entries) {
      switch (e.kind) {
        case ScriptEntry::Kind::kText: arr.push_back(e.text); break;
        case ScriptEntry::Kind::kTransient: arr.push_back({{"fail", "transient"}}); break;
        case ScriptEntry::Kind::kStatus:
          arr.push_back({{"fail", "status"}, {"status", e.status}});
          break;
      }
    }
    doc[tag] = std::move(arr);
  }
  return doc;
}

Backoff::Backoff(BackoffConfig config, bool jitter_enabled, std::uint64_t seed)
    : config_(config), jitter_enabled_(jitter_enabled), state_(seed) {}

std::chrono::milliseconds Backoff::next() {
  ++failures_;
  const double nominal =
      std::min(static_cast<double>(config_.cap.count()),
               static_cast<double>(config_.initial.count()) *
                   std::pow(config_.multiplier, failures_ - 1));
  double delay = nominal;
  if (jitter_enabled_ && config_.jitter > 0.0) {
    state_ = mix_seed(state_, static_cast<std::uint64_t>(failures_));
    const double u = static_cast<double>(state_ >> 11) * 0x1.0p-53;
    delay = nominal * (1.0 - std::clamp(config_.jitter, 0.0, 1.0) * u);
  }
  auto ms = std::chrono::milliseconds(static_cast<long long>(std::llround(delay)));
  ms = std::clamp(ms, last_, config_.cap);
  last_ = ms;
  return ms;
}

struct Gateway::Slot {
  BackendConfig config;
  std::shared_ptr<Transport> transport;

  mutable std::mutex mu;
  std::condition_variable cv;
  int in_flight = 0;
  int max_in_flight = 0;
  long requests = 0;
  long attempts = 0;
  std::chrono::steady_clock::time_point next_start{};
};

namespace {

// RAII permit against a slot's max_concurrency.
template <typename SlotT>
class Permit {
 public:
  explicit Permit(SlotT& s) : s_(s) {
    std::unique_lock lock(s_.mu);
    s_.cv.wait(lock, [&] { return s_.in_flight < s_.config.max_concurrency; });
    ++s_.in_flight;
    s_.max_in_flight = std::max(s_.max_in_flight, s_.in_flight);
  }
  ~Permit() {
    {
      std::lock_guard lock(s_.mu);
      --s_.in_flight;
    }
    s_.cv.notify_one();
  }
  Permit(const Permit&) = delete;
  Permit& operator=(const Permit&) = delete;

 private:
  SlotT& s_;
};

}  // namespace

Gateway::Gateway()
    : sleeper_([](std::chrono::milliseconds d) {
        if (d.count() > 0) std::this_thread::sleep_for(d);
      }) {}

Gateway::~Gateway() = default;

void Gateway::add_backend(BackendConfig config) {
  std::shared_ptr<Transport> transport;
  if (config.kind == BackendKind::kScripted) {
    transport = std::make_shared<ScriptedTransport>(config.script, config.embedding_dim);
  } else {
    transport = make_http_transport(config);
  }
  add_backend(std::move(config), std::move(transport));
}

void Gateway::add_backend(BackendConfig config, std::shared_ptr<Transport> transport) {
  validate(config);
  require(transport != nullptr, "backend '" + config.name + "' has no transport");
  auto s = std::make_unique<Slot>();
  s->config = std::move(config);
  s->transport = std::move(transport);
  std::string name = s->config.name;
  slots_[name] = std::move(s);
}

bool Gateway::has_backend(std::string_view name) const {
  return slots_.find(name) != slots_.end();
}

Gateway::Slot& Gateway::slot(std::string_view name) const {
  auto it = slots_.find(name);
  if (it == slots_.end()) {
    fail(ErrorCode::kUnknownBackend, "no backend named '" + std::string(name) + "'");
  }
  return *it->second;
}

const BackendConfig& Gateway::backend_config(std::string_view name) const {
  return slot(name).config;
}

bool Gateway::all_deterministic() const {
  return std::all_of(slots_.begin(), slots_.end(),
                     [](const auto& kv) { return kv.second->transport->deterministic(); });
}

BackendStats Gateway::stats(std::string_view backend) const {
  const Slot& s = slot(backend);
  std::lock_guard lock(s.mu);
  return BackendStats{s.in_flight, s.max_in_flight, s.requests, s.attempts};
}

void Gateway::set_sleeper(Sleeper sleeper) { sleeper_ = std::move(sleeper); }

template <typename Reply, typename Call>
Reply Gateway::run_with_retries(Slot& s, const std::string& what, std::uint64_t seed,
                                int& attempts, Call&& call) {
  const bool scripted = s.transport->deterministic();
  Backoff backoff(s.config.backoff, /*jitter_enabled=*/!scripted, seed);
  {
    std::lock_guard lock(s.mu);
    ++s.requests;
  }
  std::string last_detail;
  for (attempts = 1; attempts <= s.config.max_attempts; ++attempts) {
    if (s.config.requests_per_second > 0.0) {
      const auto spacing = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
          std::chrono::duration<double>(1.0 / s.config.requests_per_second));
      std::chrono::steady_clock::time_point start;
      {
        std::lock_guard lock(s.mu);
        const auto now = std::chrono::steady_clock::now();
        start = std::max(now, s.next_start);
        s.next_start = start + spacing;
      }
      const auto wait = start - std::chrono::steady_clock::now();
      if (wait.count() > 0) {
        sleeper_(std::chrono::duration_cast<std::chrono::milliseconds>(wait));
      }
    }
    Reply reply;
    {
      Permit permit(s);
      {
        std::lock_guard lock(s.mu);
        ++s.attempts;
      }
      reply = call();
    }
    if (reply.kind == TransportReply::Kind::kOk) return reply;
    if (reply.kind == TransportReply::Kind::kPermanent) {
      Error err(ErrorCode::kNonRetryable, s.config.name + " " + what + ": status " +
                                              std::to_string(reply.status) + " " +
                                              reply.detail);
      err.with_status(reply.status);
      throw err;
    }
    last_detail = reply.detail;
    if (attempts < s.config.max_attempts) {
      const auto delay = backoff.next();
      spdlog::debug("{} {}: transient failure ({}), retry in {} ms", s.config.name, what,
                    reply.detail, delay.count());
      sleeper_(delay);
    }
  }
  attempts = s.config.max_attempts;
  fail(ErrorCode::kBackendUnavailable,
       s.config.name + " " + what + ": " + std::to_string(s.config.max_attempts) +
           " transient failures, last: " + last_detail);
}

CompletionResult Gateway::complete(std::string_view backend,
                                   const CompletionRequest& request) {
  validate(request);
  Slot& s = slot(backend);
  const auto t0 = std::chrono::steady_clock::now();
  CompletionResult result;
  TransportReply reply = run_with_retries<TransportReply>(
      s, "complete[" + request.tag + "]", fnv1a64(request.tag), result.attempts,
      [&] { return s.transport->complete(request); });
  result.text = std::move(reply.text);
  result.filtered_text = strip_reasoning_traces(result.text, s.config.trace_filter);
  result.latency = std::chrono::steady_clock::now() - t0;
  return result;
}

std::vector<double> Gateway::embed(std::string_view backend, std::string_view text) {
  if (is_blank(text)) fail(ErrorCode::kEmptyText, "cannot embed empty text");
  Slot& s = slot(backend);
  int attempts = 0;
  EmbeddingReply reply = run_with_retries<EmbeddingReply>(
      s, "embed", fnv1a64(text), attempts, [&] { return s.transport->embed(text); });
  return std::move(reply.vector);
}

}  // namespace rolesim
