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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rolesim/clock.hpp"
#include "rolesim/gateway.hpp"
#include "rolesim/memory.hpp"

namespace rolesim {

/// Belief-desire-intention state, kept as free text because it only ever
/// reaches the model as prompt content.
struct BdiState {
  std::string self_belief;
  std::string env_belief;
  std::string desire;
  std::string intention;

  bool operator==(const BdiState&) const = default;
};

std::string render_bdi(const BdiState& bdi);

enum class CharacterKind { kProtagonist, kNpc };
enum class EventKind { kAction, kDialogue, kReaction };

std::string_view to_string(CharacterKind kind);
std::string_view to_string(EventKind kind);
EventKind event_kind_from_string(std::string_view s);

/// The inputs a character prompt was assembled from. Stored with each event
/// so the exact prompt can be rebuilt from a trajectory.
struct PromptContext {
  std::string template_name;  // "action", "dialogue" or "reaction"
  std::string persona;
  BdiState bdi;
  std::string view;
  std::vector<std::string> memories;
  std::string incoming;  // reaction only
  std::string impact;    // reaction only

  bool operator==(const PromptContext&) const = default;
};

inline constexpr std::string_view kMemoriesNone = "(nothing relevant yet)";

std::string render_memories(const std::vector<std::string>& memories);

/// Renders the character prompt for `ctx`. With `mask_memories` the memory
/// slot is replaced by a fixed token.
std::vector<ChatMessage> assemble_prompt(const PromptContext& ctx, bool mask_memories = false);

struct ActionEvent {
  int round = 1;
  std::string actor;
  EventKind kind = EventKind::kAction;
  std::string content;  // trace-filtered
  std::optional<std::string> target;
  std::string raw_text;
  std::string timestamp;
  PromptContext prompt;
  std::string prompt_text;  // flattened assembled prompt
  int attempts = 1;

  bool operator==(const ActionEvent&) const = default;
};

/// What a character perceives when it is its turn.
struct AgentView {
  std::string text;
  std::string memory_query;
  bool in_conversation = false;
};

class CharacterAgent {
 public:
  CharacterAgent(std::string id, std::string display_name, CharacterKind kind,
                 std::string persona_summary, BdiState initial, ModelBinding binding);

  const std::string& id() const noexcept { return id_; }
  const std::string& display_name() const noexcept { return display_name_; }
  CharacterKind kind() const noexcept { return kind_; }
  bool is_protagonist() const noexcept { return kind_ == CharacterKind::kProtagonist; }
  const std::string& persona_summary() const noexcept { return persona_summary_; }
  const BdiState& bdi() const noexcept { return bdi_; }
  const ModelBinding& binding() const noexcept { return binding_; }

  // Protagonist only.
  const MemoryStore& memory() const;
  MemoryStore& memory();

  void set_bdi(BdiState bdi);

 private:
  std::string id_;
  std::string display_name_;
  CharacterKind kind_;
  std::string persona_summary_;
  BdiState bdi_;
  ModelBinding binding_;
  std::optional<MemoryStore> memory_;
};

/// Shared per-episode plumbing for agent calls.
struct AgentContext {
  Gateway& gateway;
  Clock& clock;
  std::string tag_scope;
  std::string embedding_backend;
  std::size_t memory_k = kDefaultRetrievalDepth;
};

/// Scoped scripted-routing tag, "<scope>:<base>".
std::string scoped_tag(std::string_view scope, std::string_view base);

/// Generates the character's own move for the round. Uses the dialogue
/// template when the character is already in conversation and the action
/// template otherwise; the event is dialogue when the output opens with a
/// quotation mark. The protagonist retrieves its top-k memories first.
///
/// Errors: EmptyGeneration after one re-prompt; gateway errors propagate.
ActionEvent act(CharacterAgent& agent, const AgentView& view, int round, AgentContext& ctx);

/// Reaction to `incoming`. `incoming_text` is how the incoming event is shown
/// to the responder (speaker name plus content).
///
/// Errors: SelfReaction when the agent is the incoming actor; InvalidArgument
/// on a blank impact; EmptyGeneration after one re-prompt.
ActionEvent react(CharacterAgent& agent, const ActionEvent& incoming,
                  std::string_view incoming_text, std::string_view impact,
                  const AgentView& view, int round, AgentContext& ctx);

/// Revises beliefs from the round's interaction summary. Protagonists may
/// change every field; NPCs only change env_belief. A blank summary leaves the
/// state untouched and makes no model call.
BdiState update_beliefs(CharacterAgent& agent, std::string_view summary, int round,
                        AgentContext& ctx);

/// Appends one record to the protagonist's memory.
void remember(CharacterAgent& agent, int round, std::string_view author,
              std::string_view text, AgentContext& ctx);

BdiState initial_bdi(std::string_view self_description, std::string_view situation,
                     std::string_view goal, std::string_view opening);

json to_json(const BdiState& b);
BdiState bdi_from_json(const json& j);
json to_json(const PromptContext& p);
PromptContext prompt_context_from_json(const json& j);
json to_json(const ActionEvent& e);
ActionEvent action_event_from_json(const json& j);

}  // namespace rolesim
