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

#include "rolesim/environment.hpp"

#include <set>

#include <spdlog/spdlog.h>

#include "rolesim/error.hpp"
#include "rolesim/text.hpp"

namespace rolesim {

namespace {

[[noreturn]] void scene_invalid(const std::string& field, const std::string& msg) {
  fail_field(ErrorCode::kSceneInvalid, field, msg);
}

std::string str_or_empty(const json& doc, std::string_view key) {
  if (!doc.is_object()) return {};
  auto it = doc.find(key);
  if (it == doc.end() || !it->is_string()) return {};
  return trim(it->get<std::string>());
}

std::map<std::string, std::string> string_map(const json& doc, std::string_view key) {
  std::map<std::string, std::string> out;
  if (!doc.is_object()) return out;
  auto it = doc.find(key);
  if (it == doc.end() || !it->is_object()) return out;
  for (const auto& [k, v] : it->items()) {
    if (v.is_string()) out[k] = trim(v.get<std::string>());
  }
  return out;
}

std::vector<std::string> string_list(const json& doc, std::string_view key) {
  std::vector<std::string> out;
  if (!doc.is_object()) return out;
  auto it = doc.find(key);
  if (it == doc.end() || !it->is_array()) return out;
  for (const auto& v : *it) {
    if (v.is_string() && !is_blank(v.get<std::string>())) out.push_back(trim(v.get<std::string>()));
  }
  return out;
}

std::string render_priors(const Persona& p) {
  const PersonaFacts& f = p.facts;
  return "- Occupation: " + f.occupation + "\n- Personality: " + join(f.personality, "; ") +
         "\n- Values: " + join(f.values, "; ") + "\n- Interests: " + join(f.interests, "; ") +
         "\n- Experiences: " + join(f.experiences, "; ");
}

}  // namespace

void validate_scene(const Scene& s) {
  if (is_blank(s.event_description)) scene_invalid("event_description", "scene has no event description");
  if (is_blank(s.time)) scene_invalid("time", "scene has no time");
  if (is_blank(s.place)) scene_invalid("place", "scene has no place");
  if (s.npcs.size() < kMinNpcs || s.npcs.size() > kMaxNpcs) {
    scene_invalid("npc_sketches", "scene has " + std::to_string(s.npcs.size()) +
                                      " supporting characters, expected 2 to 3");
  }
  std::set<std::string, std::less<>> ids{std::string(kProtagonistId)};
  for (std::size_t i = 0; i < s.npcs.size(); ++i) {
    const NpcSketch& n = s.npcs[i];
    const std::string at = "npc_sketches[" + std::to_string(i) + "]";
    if (is_blank(n.id)) scene_invalid(at + ".id", "supporting character without id");
    if (!ids.insert(n.id).second) scene_invalid(at + ".id", "duplicate character id '" + n.id + "'");
    if (is_blank(n.name)) scene_invalid(at + ".name", "supporting character without name");
    if (is_blank(n.sketch)) scene_invalid(at + ".sketch", "supporting character without sketch");
  }
  for (const auto& [id, text] : s.initial_actions) {
    if (!ids.contains(id)) scene_invalid("initial_actions", "opening for unknown character '" + id + "'");
  }
}

std::vector<std::string> scene_characters(const Scene& scene) {
  std::vector<std::string> out{std::string(kProtagonistId)};
  for (const auto& n : scene.npcs) out.push_back(n.id);
  return out;
}

bool scene_has_character(const Scene& scene, std::string_view id) {
  if (id == kProtagonistId) return true;
  for (const auto& n : scene.npcs) {
    if (n.id == id) return true;
  }
  return false;
}

std::string character_name(const Scene& scene, const Persona& persona, std::string_view id) {
  if (id == kProtagonistId) return persona.name;
  for (const auto& n : scene.npcs) {
    if (n.id == id) return n.name;
  }
  require(false, "unknown character '" + std::string(id) + "'");
  return {};
}

Scene scene_from_generation(const json& doc, std::string scene_id, std::string persona_id) {
  Scene s;
  s.scene_id = std::move(scene_id);
  s.persona_id = std::move(persona_id);
  s.event_description = str_or_empty(doc, "event_description");
  s.time = str_or_empty(doc, "time");
  s.place = str_or_empty(doc, "place");
  s.protagonist_sketch = str_or_empty(doc, "protagonist_sketch");
  if (auto it = doc.find("npcs"); it != doc.end() && it->is_array()) {
    for (const auto& n : *it) {
      NpcSketch sk;
      sk.name = str_or_empty(n, "name");
      const std::string raw_id = str_or_empty(n, "id");
      sk.id = slugify(is_blank(raw_id) ? sk.name : raw_id);
      sk.sketch = str_or_empty(n, "sketch");
      sk.goal = str_or_empty(n, "goal");
      s.npcs.push_back(std::move(sk));
    }
  }
  s.initial_actions = string_map(doc, "initial_actions");
  s.initial_positions = string_map(doc, "positions");
  s.initial_emotions = string_map(doc, "emotional_states");
  s.environment_facts = string_list(doc, "environment_facts");
  return s;
}

json to_json(const Scene& s) {
  json npcs = json::array();
  for (const auto& n : s.npcs) {
    npcs.push_back({{"id", n.id}, {"name", n.name}, {"sketch", n.sketch}, {"goal", n.goal}});
  }
  return json{{"scene_id", s.scene_id},
              {"persona_id", s.persona_id},
              {"event_description", s.event_description},
              {"time", s.time},
              {"place", s.place},
              {"protagonist_sketch", s.protagonist_sketch},
              {"npcs", npcs},
              {"initial_actions", s.initial_actions},
              {"positions", s.initial_positions},
              {"emotional_states", s.initial_emotions},
              {"environment_facts", s.environment_facts}};
}

Scene scene_from_json(const json& j) {
  Scene s;
  s.scene_id = j.at("scene_id").get<std::string>();
  s.persona_id = j.at("persona_id").get<std::string>();
  s.event_description = j.at("event_description").get<std::string>();
  s.time = j.at("time").get<std::string>();
  s.place = j.at("place").get<std::string>();
  s.protagonist_sketch = j.at("protagonist_sketch").get<std::string>();
  for (const auto& n : j.at("npcs")) {
    s.npcs.push_back(NpcSketch{n.at("id").get<std::string>(), n.at("name").get<std::string>(),
                               n.at("sketch").get<std::string>(), n.at("goal").get<std::string>()});
  }
  s.initial_actions = j.at("initial_actions").get<std::map<std::string, std::string>>();
  s.initial_positions = j.at("positions").get<std::map<std::string, std::string>>();
  s.initial_emotions = j.at("emotional_states").get<std::map<std::string, std::string>>();
  s.environment_facts = j.at("environment_facts").get<std::vector<std::string>>();
  return s;
}

Scene setup_scenario(const Persona& persona, Gateway& gateway, const ModelBinding& binding,
                     std::string scene_id, std::string_view tag_scope) {
  validate_persona(persona, 0);
  auto messages = prompts::render_messages(
      "scene_setup", {{"persona", persona_summary(persona)}, {"priors", render_priors(persona)}});
  CompletionRequest request{binding.model_id, std::move(messages), binding.temperature,
                            binding.max_tokens, scoped_tag(tag_scope, "env.scene")};
  for (int pass = 0;; ++pass) {
    const CompletionResult result = gateway.complete(binding.backend, request);
    try {
      auto doc = extract_json_object(result.filtered_text);
      if (!doc) scene_invalid("json", "scene output is not a JSON object");
      Scene scene = scene_from_generation(*doc, scene_id, persona.id);
      validate_scene(scene);
      return scene;
    } catch (const Error& e) {
      if (pass >= 1) throw;
      spdlog::warn("scene for {} rejected ({}), regenerating", persona.id, e.what());
    }
  }
}

WorldState initial_world(const Scene& scene) {
  WorldState w;
  for (const auto& id : scene_characters(scene)) {
    CharacterEntry e;
    auto p = scene.initial_positions.find(id);
    e.position = p != scene.initial_positions.end() && !is_blank(p->second) ? p->second : scene.place;
    auto m = scene.initial_emotions.find(id);
    e.emotional_state = m != scene.initial_emotions.end() && !is_blank(m->second) ? m->second : "calm";
    w.characters.emplace(id, std::move(e));
  }
  w.environment_facts = scene.environment_facts;
  return w;
}

json to_json(const WorldState& w) {
  json chars = json::object();
  for (const auto& [id, e] : w.characters) {
    chars[id] = {{"position", e.position}, {"emotional_state", e.emotional_state}};
  }
  return json{{"characters", chars}, {"environment_facts", w.environment_facts}};
}

WorldState world_from_json(const json& j) {
  WorldState w;
  for (const auto& [id, e] : j.at("characters").items()) {
    w.characters[id] = CharacterEntry{e.at("position").get<std::string>(),
                                      e.at("emotional_state").get<std::string>()};
  }
  w.environment_facts = j.at("environment_facts").get<std::vector<std::string>>();
  return w;
}

std::string_view to_string(Dimension d) {
  switch (d) {
    case Dimension::kBackground: return "Background";
    case Dimension::kPersonality: return "Personality";
    case Dimension::kValues: return "Values";
    case Dimension::kInterests: return "Interests";
    case Dimension::kExperiences: return "Experiences";
  }
  return "Background";
}

std::optional<Dimension> dimension_from_string(std::string_view s) {
  for (Dimension d : kDimensions) {
    if (to_lower(s) == to_lower(to_string(d))) return d;
  }
  return std::nullopt;
}

void CheckpointCoverage::add(Dimension d, Evidence e) {
  require(e.round >= 1, "evidence round must be >= 1");
  evidence_[static_cast<std::size_t>(d)].push_back(std::move(e));
}

const std::vector<Evidence>& CheckpointCoverage::evidence(Dimension d) const {
  return evidence_[static_cast<std::size_t>(d)];
}

bool CheckpointCoverage::covered(Dimension d, int evidence_quorum) const {
  return static_cast<int>(evidence(d).size()) >= evidence_quorum;
}

int CheckpointCoverage::covered_count(int evidence_quorum) const {
  int n = 0;
  for (Dimension d : kDimensions) n += covered(d, evidence_quorum) ? 1 : 0;
  return n;
}

json to_json(const CheckpointCoverage& c) {
  json dims = json::object();
  for (Dimension d : kDimensions) {
    json list = json::array();
    for (const auto& e : c.evidence(d)) list.push_back({{"round", e.round}, {"quote", e.quote}});
    dims[std::string(to_string(d))] = list;
  }
  return json{{"evidence", dims}, {"stall", c.stall()}};
}

CheckpointCoverage coverage_from_json(const json& j) {
  CheckpointCoverage c;
  const json& dims = j.at("evidence");
  for (Dimension d : kDimensions) {
    for (const auto& e : dims.at(std::string(to_string(d)))) {
      c.add(d, Evidence{e.at("round").get<int>(), e.at("quote").get<std::string>()});
    }
  }
  c.set_stall(j.at("stall").get<int>());
  return c;
}

void validate(const TurnControlConfig& c) {
  auto bad = [](const std::string& field, const std::string& msg) {
    fail_field(ErrorCode::kConfigError, field, msg);
  };
  if (c.max_turns < 1) bad("max_turns", "max_turns must be >= 1");
  if (c.dim_quorum < 1 || c.dim_quorum > 5) bad("dim_quorum", "dim_quorum must be in 1..5");
  if (c.stall_rounds < 1) bad("stall_rounds", "stall_rounds must be >= 1");
  if (c.evidence_quorum < 1) bad("evidence_quorum", "evidence_quorum must be >= 1");
}

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::kAllCovered: return "all_covered";
    case StopReason::kQuorumCovered: return "quorum_covered";
    case StopReason::kStalled: return "stalled";
    case StopReason::kMaxTurns: return "max_turns";
  }
  return "max_turns";
}

StopReason stop_reason_from_string(std::string_view s) {
  if (s == "all_covered") return StopReason::kAllCovered;
  if (s == "quorum_covered") return StopReason::kQuorumCovered;
  if (s == "stalled") return StopReason::kStalled;
  if (s == "max_turns") return StopReason::kMaxTurns;
  fail(ErrorCode::kParseError, "unknown stop reason '" + std::string(s) + "'");
}

std::optional<StopReason> decide_turn(int covered, int stall, int round,
                                      const TurnControlConfig& config) {
  if (config.early_stop_enabled) {
    if (covered >= static_cast<int>(kDimensions.size())) return StopReason::kAllCovered;
    if (covered >= config.dim_quorum) return StopReason::kQuorumCovered;
    if (stall >= config.stall_rounds && covered >= 1) return StopReason::kStalled;
  }
  if (round >= config.max_turns) return StopReason::kMaxTurns;
  return std::nullopt;
}

json to_json(const TurnDecision& d) {
  return json{{"verdict", d.stop ? "stop" : "continue"},
              {"reason", d.reason ? json(to_string(*d.reason)) : json(nullptr)},
              {"coverage_after", to_json(d.coverage_after)}};
}

TurnDecision turn_decision_from_json(const json& j) {
  TurnDecision d;
  d.stop = j.at("verdict").get<std::string>() == "stop";
  if (const auto& r = j.at("reason"); !r.is_null()) d.reason = stop_reason_from_string(r.get<std::string>());
  d.coverage_after = coverage_from_json(j.at("coverage_after"));
  return d;
}

std::string render_coverage(const CheckpointCoverage& coverage, int evidence_quorum) {
  std::string out;
  for (Dimension d : kDimensions) {
    if (!out.empty()) out += '\n';
    const auto n = coverage.evidence(d).size();
    out += "- " + std::string(to_string(d)) + ": ";
    out += coverage.covered(d, evidence_quorum) ? "covered" : "not yet covered";
    out += " (" + std::to_string(n) + (n == 1 ? " quote)" : " quotes)");
  }
  return out;
}

EnvironmentController::EnvironmentController(Scene scene, Persona persona, Gateway& gateway,
                                             ModelBinding binding, std::string tag_scope,
                                             TurnControlConfig config)
    : scene_(std::move(scene)),
      persona_(std::move(persona)),
      gateway_(gateway),
      binding_(std::move(binding)),
      tag_scope_(std::move(tag_scope)),
      config_(config) {
  validate_scene(scene_);
  validate(config_);
}

std::string EnvironmentController::name_of(std::string_view id) const {
  return character_name(scene_, persona_, id);
}

std::string EnvironmentController::describe(const ActionEvent& event) const {
  return name_of(event.actor) + ": " + event.content;
}

std::string EnvironmentController::render_world(const WorldState& world) const {
  std::string out;
  for (const auto& id : scene_characters(scene_)) {
    auto it = world.characters.find(id);
    if (it == world.characters.end()) continue;
    if (!out.empty()) out += '\n';
    out += "- " + name_of(id) + " (" + id + "): at " + it->second.position + "; feeling " +
           it->second.emotional_state;
  }
  return out;
}

std::string EnvironmentController::round_tag(std::string_view op, int round) const {
  return scoped_tag(tag_scope_, "env." + std::string(op) + ".r" + std::to_string(round));
}

CompletionResult EnvironmentController::call(std::string_view template_name,
                                             const prompts::Values& values, std::string tag) {
  CompletionRequest request{binding_.model_id, prompts::render_messages(template_name, values),
                            binding_.temperature, binding_.max_tokens, std::move(tag)};
  return gateway_.complete(binding_.backend, request);
}

Influence EnvironmentController::analyze_influence(const ActionEvent& action,
                                                   const WorldState& world) {
  require(scene_has_character(scene_, action.actor),
          "actor '" + action.actor + "' is not in the scene");
  std::vector<std::string> candidates;
  for (const auto& id : scene_characters(scene_)) {
    if (id != action.actor) candidates.push_back(id + " (" + name_of(id) + ")");
  }
  const prompts::Values values{{"world", render_world(world)},
                               {"actor", name_of(action.actor)},
                               {"action", action.content},
                               {"candidates", join(candidates, ", ")}};
  std::string problem;
  for (int pass = 0; pass < 2; ++pass) {
    const auto result = call("influence", values, round_tag("influence", action.round));
    auto doc = extract_json_object(result.filtered_text);
    auto named = doc ? string_member(*doc, "responder") : std::nullopt;
    auto impact = doc ? string_member(*doc, "impact") : std::nullopt;
    if (!named) {
      problem = "influence output names no responder";
    } else {
      std::string responder;
      const std::string want = to_lower(trim(*named));
      for (const auto& id : scene_characters(scene_)) {
        if (want == to_lower(id) || want == to_lower(name_of(id))) responder = id;
      }
      if (responder.empty()) {
        problem = "responder '" + *named + "' is not in the scene";
      } else if (responder == action.actor) {
        problem = "responder '" + *named + "' is the acting character";
      } else if (!impact) {
        problem = "influence output has no impact";
      } else {
        return Influence{responder, trim(*impact)};
      }
    }
    spdlog::warn("round {}: {}{}", action.round, problem, pass == 0 ? ", retrying" : "");
  }
  Error err(ErrorCode::kInvalidResponder, problem);
  err.with_field("responder");
  throw err;
}

std::string EnvironmentController::summarize_interaction(const ActionEvent& action,
                                                         const ActionEvent& reaction) {
  require(reaction.target && *reaction.target == action.actor,
          "reaction does not target the acting character");
  const prompts::Values values{{"action", describe(action)}, {"reaction", describe(reaction)}};
  for (int pass = 0; pass < 2; ++pass) {
    const auto result = call("summary", values, round_tag("summary", action.round));
    if (!is_blank(result.filtered_text)) return result.filtered_text;
    spdlog::warn("round {}: empty interaction summary", action.round);
  }
  Error err(ErrorCode::kEmptyGeneration, "environment produced no interaction summary");
  err.with_field("summary");
  throw err;
}

TurnDecision EnvironmentController::check_turn_control(const CheckpointCoverage& coverage,
                                                       const std::vector<ActionEvent>& round_events,
                                                       int round) {
  require(round >= 1, "round must be >= 1");
  TurnDecision decision;
  decision.coverage_after = coverage;
  std::vector<const ActionEvent*> own;
  for (const auto& e : round_events) {
    if (e.actor == kProtagonistId) own.push_back(&e);
  }
  bool gained = false;
  if (!own.empty()) {
    std::string events;
    for (const ActionEvent* e : own) {
      if (!events.empty()) events += '\n';
      events += describe(*e);
    }
    const prompts::Values values{{"persona", persona_summary(persona_)},
                                 {"coverage", render_coverage(coverage, config_.evidence_quorum)},
                                 {"events", events}};
    std::optional<json> dims;
    for (int pass = 0; pass < 2 && !dims; ++pass) {
      const auto result = call("turn_control", values, round_tag("turn_control", round));
      auto doc = extract_json_object(result.filtered_text);
      if (doc && doc->contains("dimensions") && (*doc)["dimensions"].is_object()) {
        dims = (*doc)["dimensions"];
      } else {
        spdlog::warn("round {}: unparseable turn-control output", round);
      }
    }
    if (!dims) {
      Error err(ErrorCode::kTurnControlUnparseable,
                "turn-control output unparseable in round " + std::to_string(round));
      err.with_field("dimensions");
      throw err;
    }
    for (const auto& [key, verdict] : dims->items()) {
      auto d = dimension_from_string(key);
      if (!d) {
        spdlog::warn("round {}: unknown checkpoint dimension '{}'", round, key);
        continue;
      }
      if (!verdict.is_object() || !verdict.value("new_evidence", false)) continue;
      auto quote = string_member(verdict, "quote");
      bool found = false;
      if (quote) {
        *quote = trim(*quote);
        for (const ActionEvent* e : own) found = found || contains(e->content, *quote);
      }
      if (!found) {
        spdlog::warn("round {}: {} evidence quote not found in protagonist behavior", round, key);
        continue;
      }
      decision.coverage_after.add(*d, Evidence{round, *quote});
      gained = true;
    }
  }
  decision.coverage_after.set_stall(gained ? 0 : coverage.stall() + 1);
  decision.reason = decide_turn(decision.coverage_after.covered_count(config_.evidence_quorum),
                                decision.coverage_after.stall(), round, config_);
  decision.stop = decision.reason.has_value();
  return decision;
}

CharacterUpdate EnvironmentController::update_character_state(std::string_view character,
                                                              const ActionEvent& own_action,
                                                              const ActionEvent* feedback,
                                                              std::string_view summary,
                                                              const WorldState& world) {
  require(scene_has_character(scene_, character),
          "character '" + std::string(character) + "' is not in the scene");
  require(own_action.actor == character, "own action belongs to another character");
  auto it = world.characters.find(std::string(character));
  require(it != world.characters.end(),
          "character '" + std::string(character) + "' has no world entry");
  const CharacterEntry& current = it->second;
  prompts::Values values{{"character", name_of(character)},
                         {"world_entry", "at " + current.position + "; feeling " + current.emotional_state},
                         {"own_action", own_action.content}};
  std::string template_name = "character_update_self";
  if (feedback) {
    template_name = "character_update_feedback";
    values["feedback"] = describe(*feedback);
    values["summary"] = std::string(summary);
  }
  CompletionRequest request{binding_.model_id, prompts::render_messages(template_name, values),
                            binding_.temperature, binding_.max_tokens,
                            round_tag("character_state", own_action.round)};
  CharacterUpdate update;
  update.prompt_text = prompts::flatten(request.messages);
  update.entry = current;
  const auto result = gateway_.complete(binding_.backend, request);
  if (auto doc = extract_json_object(result.filtered_text)) {
    if (auto v = string_member(*doc, "position")) update.entry.position = trim(*v);
    if (auto v = string_member(*doc, "emotional_state")) update.entry.emotional_state = trim(*v);
  } else {
    spdlog::warn("round {}: unparseable state update for {}, kept", own_action.round, character);
  }
  return update;
}

EnvironmentUpdate EnvironmentController::update_environment(
    const WorldState& world, const std::vector<ActionEvent>& round_events) {
  EnvironmentUpdate out{world, false};
  if (round_events.empty()) return out;
  std::string facts = world.environment_facts.empty() ? "(none recorded)" : "";
  for (const auto& f : world.environment_facts) {
    if (!facts.empty()) facts += '\n';
    facts += "- " + f;
  }
  std::string events;
  for (const auto& e : round_events) {
    if (!events.empty()) events += '\n';
    events += describe(e);
  }
  const auto result = call("environment_update", {{"facts", facts}, {"events", events}},
                           round_tag("environment", round_events.front().round));
  auto doc = extract_json_object(result.filtered_text);
  if (!doc) {
    spdlog::warn("round {}: unparseable environment update, kept", round_events.front().round);
    return out;
  }
  auto flag = doc->find("affects_environment");
  if (flag == doc->end() || !flag->is_boolean() || !flag->get<bool>()) return out;
  auto list = doc->find("environment_facts");
  if (list == doc->end() || !list->is_array()) {
    spdlog::warn("round {}: environment flagged as changed without facts, kept",
                 round_events.front().round);
    return out;
  }
  std::vector<std::string> revised;
  for (const auto& f : *list) {
    if (f.is_string() && !is_blank(f.get<std::string>())) revised.push_back(trim(f.get<std::string>()));
  }
  out.changed = revised != world.environment_facts;
  out.world.environment_facts = std::move(revised);
  return out;
}

}  // namespace rolesim
