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

#include "rolesim/agents.hpp"

#include <spdlog/spdlog.h>

#include "rolesim/error.hpp"
#include "rolesim/prompts.hpp"
#include "rolesim/text.hpp"

namespace rolesim {

std::string render_bdi(const BdiState& bdi) {
  return "- Self-belief: " + bdi.self_belief + "\n- Env-belief: " + bdi.env_belief +
         "\n- Desire: " + bdi.desire + "\n- Intention: " + bdi.intention;
}

std::string_view to_string(CharacterKind kind) {
  return kind == CharacterKind::kProtagonist ? "protagonist" : "npc";
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kAction: return "action";
    case EventKind::kDialogue: return "dialogue";
    case EventKind::kReaction: return "reaction";
  }
  return "action";
}

EventKind event_kind_from_string(std::string_view s) {
  if (s == "action") return EventKind::kAction;
  if (s == "dialogue") return EventKind::kDialogue;
  if (s == "reaction") return EventKind::kReaction;
  fail(ErrorCode::kParseError, "unknown event kind '" + std::string(s) + "'");
}

std::string render_memories(const std::vector<std::string>& memories) {
  if (memories.empty()) return std::string(kMemoriesNone);
  std::string out;
  for (const auto& m : memories) {
    if (!out.empty()) out += '\n';
    out += "- " + m;
  }
  return out;
}

std::vector<ChatMessage> assemble_prompt(const PromptContext& ctx, bool mask_memories) {
  prompts::Values values{{"persona", ctx.persona},
                         {"bdi", render_bdi(ctx.bdi)},
                         {"scene", ctx.view},
                         {"memories", mask_memories ? std::string("[memories]")
                                                    : render_memories(ctx.memories)}};
  if (ctx.template_name == "reaction") {
    values["incoming"] = ctx.incoming;
    values["impact"] = ctx.impact;
  }
  return prompts::render_messages(ctx.template_name, values);
}

CharacterAgent::CharacterAgent(std::string id, std::string display_name, CharacterKind kind,
                               std::string persona_summary, BdiState initial,
                               ModelBinding binding)
    : id_(std::move(id)),
      display_name_(std::move(display_name)),
      kind_(kind),
      persona_summary_(std::move(persona_summary)),
      bdi_(std::move(initial)),
      binding_(std::move(binding)) {
  require(!id_.empty(), "character id is empty");
  require(!is_blank(bdi_.self_belief) && !is_blank(bdi_.env_belief) &&
              !is_blank(bdi_.desire) && !is_blank(bdi_.intention),
          "character '" + id_ + "' has an incomplete initial BDI state");
  if (kind_ == CharacterKind::kProtagonist) memory_.emplace();
}

const MemoryStore& CharacterAgent::memory() const {
  require(memory_.has_value(), "character '" + id_ + "' has no memory store");
  return *memory_;
}

MemoryStore& CharacterAgent::memory() {
  require(memory_.has_value(), "character '" + id_ + "' has no memory store");
  return *memory_;
}

void CharacterAgent::set_bdi(BdiState bdi) {
  if (kind_ == CharacterKind::kNpc) {
    require(bdi.self_belief == bdi_.self_belief,
            "NPC '" + id_ + "' self-belief is fixed after initialization");
  }
  bdi_ = std::move(bdi);
}

std::string scoped_tag(std::string_view scope, std::string_view base) {
  if (scope.empty()) return std::string(base);
  return std::string(scope) + ":" + std::string(base);
}

namespace {

std::string round_tag(const CharacterAgent& agent, std::string_view op, int round) {
  return std::string(to_string(agent.kind())) + "." + std::string(op) + ".r" +
         std::to_string(round);
}

std::vector<std::string> recall(CharacterAgent& agent, const AgentView& view,
                                AgentContext& ctx) {
  if (!agent.is_protagonist() || agent.memory().empty() || is_blank(view.memory_query)) {
    return {};
  }
  const auto query = ctx.gateway.embed(ctx.embedding_backend, view.memory_query);
  std::vector<std::string> out;
  for (const auto& r : retrieve(agent.memory(), query, ctx.memory_k)) {
    out.push_back("(round " + std::to_string(r.round) + ", " + r.author + ") " + r.text);
  }
  return out;
}

bool opens_with_quote(std::string_view s) {
  return s.rfind("\"", 0) == 0 || s.rfind("\xE2\x80\x9C", 0) == 0;  // " or “
}

// One prompt, one automatic re-prompt on blank output.
ActionEvent generate(CharacterAgent& agent, PromptContext prompt, const std::string& tag,
                     int round, AgentContext& ctx) {
  const auto messages = assemble_prompt(prompt);
  CompletionRequest request{agent.binding().model_id, messages, agent.binding().temperature,
                            agent.binding().max_tokens, scoped_tag(ctx.tag_scope, tag)};
  ActionEvent event;
  event.round = round;
  event.actor = agent.id();
  event.prompt_text = prompts::flatten(messages);
  event.prompt = std::move(prompt);
  int attempts = 0;
  for (int pass = 0; pass < 2; ++pass) {
    CompletionResult result = ctx.gateway.complete(agent.binding().backend, request);
    attempts += result.attempts;
    if (!is_blank(result.filtered_text)) {
      event.raw_text = std::move(result.text);
      event.content = std::move(result.filtered_text);
      event.attempts = attempts;
      event.timestamp = iso8601(ctx.clock.now());
      return event;
    }
    spdlog::warn("{}: empty generation for {}, re-prompting", agent.id(), request.tag);
  }
  Error err(ErrorCode::kEmptyGeneration, agent.id() + " produced no text for " + request.tag);
  err.with_field(agent.id());
  throw err;
}

}  // namespace

ActionEvent act(CharacterAgent& agent, const AgentView& view, int round, AgentContext& ctx) {
  PromptContext prompt;
  prompt.template_name = view.in_conversation ? "dialogue" : "action";
  prompt.persona = agent.persona_summary();
  prompt.bdi = agent.bdi();
  prompt.view = view.text;
  prompt.memories = recall(agent, view, ctx);
  ActionEvent event = generate(agent, std::move(prompt), round_tag(agent, "act", round), round, ctx);
  event.kind = opens_with_quote(event.content) ? EventKind::kDialogue : EventKind::kAction;
  return event;
}

ActionEvent react(CharacterAgent& agent, const ActionEvent& incoming,
                  std::string_view incoming_text, std::string_view impact,
                  const AgentView& view, int round, AgentContext& ctx) {
  if (agent.id() == incoming.actor) {
    Error err(ErrorCode::kSelfReaction, agent.id() + " cannot react to its own event");
    err.with_field(agent.id());
    throw err;
  }
  require(!is_blank(impact), "reaction needs a non-empty impact");
  PromptContext prompt;
  prompt.template_name = "reaction";
  prompt.persona = agent.persona_summary();
  prompt.bdi = agent.bdi();
  prompt.view = view.text;
  prompt.memories = recall(agent, view, ctx);
  prompt.incoming = std::string(incoming_text);
  prompt.impact = std::string(impact);
  ActionEvent event =
      generate(agent, std::move(prompt), round_tag(agent, "react", round), round, ctx);
  event.kind = EventKind::kReaction;
  event.target = incoming.actor;
  return event;
}

BdiState update_beliefs(CharacterAgent& agent, std::string_view summary, int round,
                        AgentContext& ctx) {
  if (is_blank(summary)) return agent.bdi();
  const std::string name = agent.is_protagonist() ? "belief_update_protagonist"
                                                  : "belief_update_npc";
  auto messages = prompts::render_messages(
      name, {{"persona", agent.persona_summary()},
             {"bdi", render_bdi(agent.bdi())},
             {"summary", std::string(summary)}});
  CompletionRequest request{agent.binding().model_id, std::move(messages),
                            agent.binding().temperature, agent.binding().max_tokens,
                            scoped_tag(ctx.tag_scope, round_tag(agent, "beliefs", round))};
  const CompletionResult result = ctx.gateway.complete(agent.binding().backend, request);
  if (is_blank(result.filtered_text)) {
    spdlog::warn("{}: empty belief revision, state kept", agent.id());
    return agent.bdi();
  }
  BdiState next = agent.bdi();
  if (auto doc = extract_json_object(result.filtered_text)) {
    if (auto v = string_member(*doc, "env_belief")) next.env_belief = *v;
    if (agent.is_protagonist()) {
      if (auto v = string_member(*doc, "self_belief")) next.self_belief = *v;
      if (auto v = string_member(*doc, "desire")) next.desire = *v;
      if (auto v = string_member(*doc, "intention")) next.intention = *v;
    }
  } else {
    // Plain prose is taken as the revised view of the situation.
    next.env_belief = result.filtered_text;
  }
  agent.set_bdi(next);
  return next;
}

void remember(CharacterAgent& agent, int round, std::string_view author,
              std::string_view text, AgentContext& ctx) {
  if (is_blank(text)) return;
  MemoryRecord record;
  record.round = round;
  record.author = std::string(author);
  record.text = std::string(text);
  record.embedding = ctx.gateway.embed(ctx.embedding_backend, text);
  agent.memory().append(std::move(record));
}

BdiState initial_bdi(std::string_view self_description, std::string_view situation,
                     std::string_view goal, std::string_view opening) {
  BdiState b;
  b.self_belief = trim(self_description);
  b.env_belief = trim(situation);
  b.desire = is_blank(goal) ? "Take part in the situation in a way true to myself."
                            : trim(goal);
  b.intention = is_blank(opening) ? "Observe the others and respond naturally."
                                  : trim(opening);
  return b;
}

json to_json(const BdiState& b) {
  return json{{"self_belief", b.self_belief},
              {"env_belief", b.env_belief},
              {"desire", b.desire},
              {"intention", b.intention}};
}

BdiState bdi_from_json(const json& j) {
  return BdiState{j.at("self_belief").get<std::string>(), j.at("env_belief").get<std::string>(),
                  j.at("desire").get<std::string>(), j.at("intention").get<std::string>()};
}

json to_json(const PromptContext& p) {
  json j{{"template", p.template_name}, {"persona", p.persona}, {"bdi", to_json(p.bdi)},
         {"view", p.view}, {"memories", p.memories}};
  if (p.template_name == "reaction") {
    j["incoming"] = p.incoming;
    j["impact"] = p.impact;
  }
  return j;
}

PromptContext prompt_context_from_json(const json& j) {
  PromptContext p;
  p.template_name = j.at("template").get<std::string>();
  p.persona = j.at("persona").get<std::string>();
  p.bdi = bdi_from_json(j.at("bdi"));
  p.view = j.at("view").get<std::string>();
  p.memories = j.at("memories").get<std::vector<std::string>>();
  p.incoming = j.value("incoming", "");
  p.impact = j.value("impact", "");
  return p;
}

json to_json(const ActionEvent& e) {
  json j{{"round", e.round},     {"actor", e.actor},         {"kind", to_string(e.kind)},
         {"content", e.content}, {"raw_text", e.raw_text},   {"timestamp", e.timestamp},
         {"prompt", to_json(e.prompt)}, {"prompt_text", e.prompt_text},
         {"attempts", e.attempts}};
  j["target"] = e.target ? json(*e.target) : json(nullptr);
  return j;
}

ActionEvent action_event_from_json(const json& j) {
  ActionEvent e;
  e.round = j.at("round").get<int>();
  e.actor = j.at("actor").get<std::string>();
  e.kind = event_kind_from_string(j.at("kind").get<std::string>());
  e.content = j.at("content").get<std::string>();
  e.raw_text = j.at("raw_text").get<std::string>();
  e.timestamp = j.at("timestamp").get<std::string>();
  e.prompt = prompt_context_from_json(j.at("prompt"));
  e.prompt_text = j.at("prompt_text").get<std::string>();
  e.attempts = j.at("attempts").get<int>();
  if (const auto& t = j.at("target"); !t.is_null()) e.target = t.get<std::string>();
  return e;
}

}  // namespace rolesim
