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

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "rolesim/gateway.hpp"

namespace rolesim {

/// Candidate script keys for a tag, most specific first. A tag has the shape
/// "[scope:]role.op[.rN]"; the scope and the round suffix are each optional
/// in the script:
///   "ep1:npc.react.r2" -> ep1:npc.react.r2, ep1:npc.react, npc.react.r2, npc.react
std::vector<std::string> script_keys_for(std::string_view tag);

/// Replays a Script. Each key is an ordered queue; the first candidate key
/// that exists in the script is consumed. Consumption is serialized so the
/// per-key order holds under concurrent callers.
class ScriptedTransport final : public Transport {
 public:
  ScriptedTransport(Script script, int embedding_dim);

  TransportReply complete(const CompletionRequest& request) override;
  EmbeddingReply embed(std::string_view text) override;
  bool deterministic() const override { return true; }

  /// Number of entries consumed from `key` so far.
  std::size_t consumed(std::string_view key) const;
  /// Tags seen, in call order.
  std::vector<std::string> call_log() const;

 private:
  mutable std::mutex mu_;
  Script script_;
  std::map<std::string, std::size_t, std::less<>> cursor_;
  std::vector<std::string> log_;
  int embedding_dim_;
};

/// Bag-of-words hashed embedding: each lowercase token seeds a pseudo-random
/// direction, the directions are summed and normalized. Texts sharing words
/// get positive similarity; identical texts get identical vectors.
std::vector<double> hashed_embedding(std::string_view text, int dim);

/// OpenAI-compatible chat-completions and embeddings client.
std::shared_ptr<Transport> make_http_transport(const BackendConfig& config);

/// Credential lookup: config.api_key_env when set, else
/// ROLESIM_API_KEY_<NAME> with the backend name upper-cased.
std::string api_key_variable(const BackendConfig& config);

}  // namespace rolesim
