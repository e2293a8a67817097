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

#include <cctype>
#include <cmath>

#include "rolesim/backends.hpp"
#include "rolesim/error.hpp"
#include "rolesim/rng.hpp"
#include "rolesim/text.hpp"

namespace rolesim {

namespace {

// "r12" -> true
bool is_round_suffix(std::string_view s) {
  if (s.size() < 2 || s[0] != 'r') return false;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

}  // namespace

std::vector<std::string> script_keys_for(std::string_view tag) {
  std::string_view scope;
  std::string_view base = tag;
  if (auto colon = tag.rfind(':'); colon != std::string_view::npos) {
    scope = tag.substr(0, colon);
    base = tag.substr(colon + 1);
  }
  std::string_view unrounded = base;
  if (auto dot = base.rfind('.'); dot != std::string_view::npos &&
                                  is_round_suffix(base.substr(dot + 1))) {
    unrounded = base.substr(0, dot);
  }
  std::vector<std::string> keys;
  auto add = [&](std::string key) {
    for (const auto& k : keys) {
      if (k == key) return;
    }
    keys.push_back(std::move(key));
  };
  if (!scope.empty()) {
    add(std::string(scope) + ":" + std::string(base));
    add(std::string(scope) + ":" + std::string(unrounded));
  }
  add(std::string(base));
  add(std::string(unrounded));
  return keys;
}

ScriptedTransport::ScriptedTransport(Script script, int embedding_dim)
    : script_(std::move(script)), embedding_dim_(embedding_dim) {}

TransportReply ScriptedTransport::complete(const CompletionRequest& request) {
  std::lock_guard lock(mu_);
  log_.push_back(request.tag);
  for (const auto& key : script_keys_for(request.tag)) {
    auto it = script_.find(key);
    if (it == script_.end()) continue;
    std::size_t& pos = cursor_[key];
    if (pos >= it->second.size()) break;
    const ScriptEntry& e = it->second[pos++];
    switch (e.kind) {
      case ScriptEntry::Kind::kText:
        return TransportReply{TransportReply::Kind::kOk, e.text, 200, {}};
      case ScriptEntry::Kind::kTransient:
        return TransportReply{TransportReply::Kind::kTransient, {}, e.status,
                              "scripted transient failure"};
      case ScriptEntry::Kind::kStatus: {
        const bool transient = e.status == 429 || e.status >= 500;
        return TransportReply{transient ? TransportReply::Kind::kTransient
                                        : TransportReply::Kind::kPermanent,
                              {}, e.status, "scripted status"};
      }
    }
  }
  Error err(ErrorCode::kScriptExhausted, "no scripted response left for tag '" +
                                             request.tag + "'");
  err.with_field(request.tag);
  throw err;
}

EmbeddingReply ScriptedTransport::embed(std::string_view text) {
  return EmbeddingReply{TransportReply::Kind::kOk, hashed_embedding(text, embedding_dim_),
                        200, {}};
}

std::size_t ScriptedTransport::consumed(std::string_view key) const {
  std::lock_guard lock(mu_);
  auto it = cursor_.find(key);
  return it == cursor_.end() ? 0 : it->second;
}

std::vector<std::string> ScriptedTransport::call_log() const {
  std::lock_guard lock(mu_);
  return log_;
}

std::vector<double> hashed_embedding(std::string_view text, int dim) {
  std::vector<double> v(static_cast<std::size_t>(dim), 0.0);
  auto add_token = [&](std::string_view token) {
    SeededRng rng(fnv1a64(token));
    for (auto& x : v) x += rng.symmetric();
  };
  std::string token;
  bool any = false;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!token.empty()) {
      add_token(token);
      token.clear();
      any = true;
    }
  }
  if (!token.empty()) {
    add_token(token);
    any = true;
  }
  // Punctuation-only text still needs a direction.
  if (!any) add_token(text);
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) {
    v[0] = 1.0;
    return v;
  }
  for (auto& x : v) x /= norm;
  return v;
}

}  // namespace rolesim
