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

#include "rolesim/simulation.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

#include "rolesim/prompts.hpp"
#include "rolesim/text.hpp"

namespace rolesim {

void validate(const SimulationConfig& config) {
  validate(config.turn_control);
  auto check = [](const ModelBinding& b, const char* role) {
    if (b.model_id.empty() || b.backend.empty()) {
      fail_field(ErrorCode::kConfigError, role, std::string("no model bound for ") + role);
    }
  };
  check(config.protagonist, "protagonist");
  check(config.npc, "npc");
  check(config.environment, "environment");
  if (config.embedding_backend.empty()) {
    fail_field(ErrorCode::kConfigError, "embedding", "no embedding backend");
  }
}

EpisodeAborted::EpisodeAborted(ErrorCode cause, const std::string& message, Trajectory partial)
    : Error(ErrorCode::kEpisodeAborted, message), cause_(cause), partial_(std::move(partial)) {}

std::string episode_id(std::string_view model_id, std::string_view persona_id, int repeat) {
  return slugify(model_id) + "__" + std::string(persona_id) + "__r" + std::to_string(repeat);
}

std::string acting_character(int round, std::string_view previous_responder) {
  if (round % 2 == 1 || previous_responder.empty()) return std::string(kProtagonistId);
  return std::string(previous_responder);
}

std::string render_view(const EnvironmentController& env, const WorldState& world,
                        const std::vector<Round>& rounds) {
  const Scene& s = env.scene();
  std::string out = "Event: " + s.event_description + "\nTime: " + s.time + "\nPlace: " + s.place;
  out += "\n\nPeople present:\n" + env.render_world(world);
  if (!world.environment_facts.empty()) {
    out += "\n\nSurroundings:";
    for (const auto& f : world.environment_facts) out += "\n- " + f;
  }
  if (rounds.empty()) {
    if (!s.initial_actions.empty()) {
      out += "\n\nOpening moments:";
      for (const auto& id : scene_characters(s)) {
        auto it = s.initial_actions.find(id);
        if (it != s.initial_actions.end()) out += "\n- " + env.name_of(id) + ": " + it->second;
      }
    }
    return out;
  }
  out += "\n\nSo far:";
  for (const auto& r : rounds) out += "\n- " + r.summary;
  const Round& last = rounds.back();
  out += "\n\nJust now:\n" + env.describe(last.action) + "\n" + env.describe(last.reaction);
  return out;
}

namespace {

BeliefSnapshot snapshot(const std::vector<CharacterAgent>& cast) {
  BeliefSnapshot out;
  for (const auto& a : cast) out.emplace(a.id(), a.bdi());
  return out;
}

CharacterAgent& find_agent(std::vector<CharacterAgent>& cast, std::string_view id) {
  for (auto& a : cast) {
    if (a.id() == id) return a;
  }
  fail(ErrorCode::kInvalidResponder, "no agent for character '" + std::string(id) + "'");
}

std::vector<CharacterAgent> build_cast(const EpisodeSpec& spec, const SimulationConfig& config) {
  const Scene& s = spec.scene;
  const std::string situation = s.event_description + " (" + s.time + ", " + s.place + ")";
  auto opening = [&](const std::string& id) {
    auto it = s.initial_actions.find(id);
    return it == s.initial_actions.end() ? std::string() : it->second;
  };
  std::vector<CharacterAgent> cast;
  const std::string self = is_blank(s.protagonist_sketch) ? spec.persona.narrative
                                                          : s.protagonist_sketch;
  cast.emplace_back(std::string(kProtagonistId), spec.persona.name, CharacterKind::kProtagonist,
                    persona_summary(spec.persona),
                    initial_bdi(self, situation, "", opening(std::string(kProtagonistId))),
                    config.protagonist);
  for (const auto& n : s.npcs) {
    cast.emplace_back(n.id, n.name, CharacterKind::kNpc, "Name: " + n.name + "\n\n" + n.sketch,
                      initial_bdi(n.sketch, situation, n.goal, opening(n.id)), config.npc);
  }
  return cast;
}

AgentView view_for(const CharacterAgent& agent, const std::string& view_text,
                   std::string memory_query, const std::vector<Round>& rounds) {
  AgentView v;
  v.text = view_text;
  v.memory_query = std::move(memory_query);
  if (!rounds.empty()) {
    const Round& last = rounds.back();
    v.in_conversation = last.action.actor == agent.id() || last.reaction.actor == agent.id();
  }
  return v;
}

}  // namespace

Trajectory run_episode(const EpisodeSpec& spec, Gateway& gateway, Clock& clock,
                       const SimulationConfig& config) {
  validate(config);
  validate_scene(spec.scene);
  const auto started = clock.now();

  Trajectory t;
  t.id = spec.id;
  t.persona = spec.persona;
  t.repeat = spec.repeat;
  t.seed = config.seed;
  t.protagonist_model_id = config.protagonist.model_id;
  t.npc_model_id = config.npc.model_id;
  t.environment_model_id = config.environment.model_id;
  t.prompt_version = std::string(prompts::asset_version());
  t.scene = spec.scene;

  const std::string scope = slugify(spec.id);
  EnvironmentController env(spec.scene, spec.persona, gateway, config.environment, scope,
                            config.turn_control);
  AgentContext ctx{gateway, clock, scope, config.embedding_backend, config.memory_k};
  std::vector<CharacterAgent> cast = build_cast(spec, config);
  CharacterAgent& protagonist = find_agent(cast, kProtagonistId);

  WorldState world = initial_world(spec.scene);
  t.initial_beliefs = snapshot(cast);
  t.world_initial = world;
  CheckpointCoverage coverage;

  auto finish = [&] {
    t.world_after = world;
    t.coverage_final = coverage;
    t.memory = protagonist.memory().records();
    t.wall_time_s = std::chrono::duration<double>(clock.now() - started).count();
  };

  std::string previous_responder;
  try {
    for (int index = 1; index <= config.turn_control.max_turns; ++index) {
      Round r;
      r.index = index;
      const std::string view = render_view(env, world, t.rounds);

      CharacterAgent& actor = find_agent(cast, acting_character(index, previous_responder));
      const std::string query = t.rounds.empty() ? spec.scene.event_description
                                                 : t.rounds.back().summary;
      r.action = act(actor, view_for(actor, view, query, t.rounds), index, ctx);

      r.influence = env.analyze_influence(r.action, world);
      CharacterAgent& responder = find_agent(cast, r.influence.responder);
      r.reaction = react(responder, r.action, env.describe(r.action), r.influence.impact,
                         view_for(responder, view, r.action.content, t.rounds), index, ctx);

      r.summary = env.summarize_interaction(r.action, r.reaction);

      update_beliefs(actor, r.summary, index, ctx);
      update_beliefs(responder, r.summary, index, ctx);

      const CharacterEntry actor_before = world.characters.at(actor.id());
      const CharacterEntry responder_before = world.characters.at(responder.id());
      auto actor_update = env.update_character_state(actor.id(), r.action, &r.reaction,
                                                     r.summary, world);
      auto responder_update = env.update_character_state(responder.id(), r.reaction, nullptr,
                                                         r.summary, world);
      world.characters[actor.id()] = actor_update.entry;
      world.characters[responder.id()] = responder_update.entry;
      r.state_updates.push_back(StateUpdate{actor.id(), actor_before, actor_update.entry, true,
                                            std::move(actor_update.prompt_text)});
      r.state_updates.push_back(StateUpdate{responder.id(), responder_before,
                                            responder_update.entry, false,
                                            std::move(responder_update.prompt_text)});

      const std::vector<ActionEvent> events{r.action, r.reaction};
      auto env_update = env.update_environment(world, events);
      r.env_changed = env_update.changed;
      world.environment_facts = env_update.world.environment_facts;
      r.environment_facts = world.environment_facts;

      if (actor.is_protagonist() || responder.is_protagonist()) {
        remember(protagonist, index, actor.id(), env.describe(r.action), ctx);
        remember(protagonist, index, responder.id(), env.describe(r.reaction), ctx);
      }
      remember(protagonist, index, "environment", r.summary, ctx);

      r.decision = env.check_turn_control(coverage, events, index);
      coverage = r.decision.coverage_after;
      r.beliefs = snapshot(cast);
      previous_responder = responder.id();
      const bool stop = r.decision.stop;
      if (stop) t.stop_reason = r.decision.reason;
      t.rounds.push_back(std::move(r));
      if (stop) break;
    }
  } catch (const Error& e) {
    finish();
    t.status = "aborted";
    t.error = e.what();
    spdlog::error("episode {} aborted after {} rounds: {}", spec.id, t.rounds.size(), e.what());
    throw EpisodeAborted(e.code(), "episode " + spec.id + " aborted: " + e.what(), std::move(t));
  }
  finish();
  return t;
}

json to_json(const Trajectory& t) {
  auto beliefs = [](const BeliefSnapshot& b) {
    json out = json::object();
    for (const auto& [id, s] : b) out[id] = to_json(s);
    return out;
  };
  json rounds = json::array();
  for (const auto& r : t.rounds) {
    json updates = json::array();
    for (const auto& u : r.state_updates) {
      updates.push_back({{"character", u.character},
                         {"before", {{"position", u.before.position},
                                     {"emotional_state", u.before.emotional_state}}},
                         {"after", {{"position", u.after.position},
                                    {"emotional_state", u.after.emotional_state}}},
                         {"with_feedback", u.with_feedback},
                         {"prompt_text", u.prompt_text}});
    }
    rounds.push_back({{"index", r.index},
                      {"action", to_json(r.action)},
                      {"influence", {{"responder", r.influence.responder},
                                     {"impact", r.influence.impact}}},
                      {"reaction", to_json(r.reaction)},
                      {"summary", r.summary},
                      {"state_updates", updates},
                      {"env_changed", r.env_changed},
                      {"environment_facts", r.environment_facts},
                      {"beliefs", beliefs(r.beliefs)},
                      {"decision", to_json(r.decision)}});
  }
  json memory = json::array();
  for (const auto& m : t.memory) memory.push_back(to_json(m));
  return json{{"schema_version", t.schema_version},
              {"id", t.id},
              {"persona", to_json(t.persona)},
              {"repeat", t.repeat},
              {"seed", t.seed},
              {"protagonist_model_id", t.protagonist_model_id},
              {"npc_model_id", t.npc_model_id},
              {"environment_model_id", t.environment_model_id},
              {"prompt_version", t.prompt_version},
              {"scene", to_json(t.scene)},
              {"initial_beliefs", beliefs(t.initial_beliefs)},
              {"world_initial", to_json(t.world_initial)},
              {"rounds", rounds},
              {"world_after", to_json(t.world_after)},
              {"coverage_final", to_json(t.coverage_final)},
              {"stop_reason", t.stop_reason ? json(to_string(*t.stop_reason)) : json(nullptr)},
              {"memory", memory},
              {"wall_time_s", t.wall_time_s},
              {"status", t.status},
              {"error", t.error}};
}

Trajectory trajectory_from_json(const json& j) {
  auto beliefs = [](const json& b) {
    BeliefSnapshot out;
    for (const auto& [id, s] : b.items()) out.emplace(id, bdi_from_json(s));
    return out;
  };
  auto entry = [](const json& e) {
    return CharacterEntry{e.at("position").get<std::string>(),
                          e.at("emotional_state").get<std::string>()};
  };
  Trajectory t;
  t.schema_version = j.at("schema_version").get<int>();
  if (t.schema_version != kTrajectorySchemaVersion) {
    fail(ErrorCode::kParseError,
         "unsupported trajectory schema version " + std::to_string(t.schema_version));
  }
  t.id = j.at("id").get<std::string>();
  t.persona = persona_from_json(j.at("persona"), 0);
  t.repeat = j.at("repeat").get<int>();
  t.seed = j.at("seed").get<std::uint64_t>();
  t.protagonist_model_id = j.at("protagonist_model_id").get<std::string>();
  t.npc_model_id = j.at("npc_model_id").get<std::string>();
  t.environment_model_id = j.at("environment_model_id").get<std::string>();
  t.prompt_version = j.at("prompt_version").get<std::string>();
  t.scene = scene_from_json(j.at("scene"));
  t.initial_beliefs = beliefs(j.at("initial_beliefs"));
  t.world_initial = world_from_json(j.at("world_initial"));
  for (const auto& rj : j.at("rounds")) {
    Round r;
    r.index = rj.at("index").get<int>();
    r.action = action_event_from_json(rj.at("action"));
    r.influence = Influence{rj.at("influence").at("responder").get<std::string>(),
                            rj.at("influence").at("impact").get<std::string>()};
    r.reaction = action_event_from_json(rj.at("reaction"));
    r.summary = rj.at("summary").get<std::string>();
    for (const auto& u : rj.at("state_updates")) {
      r.state_updates.push_back(StateUpdate{u.at("character").get<std::string>(),
                                            entry(u.at("before")), entry(u.at("after")),
                                            u.at("with_feedback").get<bool>(),
                                            u.at("prompt_text").get<std::string>()});
    }
    r.env_changed = rj.at("env_changed").get<bool>();
    r.environment_facts = rj.at("environment_facts").get<std::vector<std::string>>();
    r.beliefs = beliefs(rj.at("beliefs"));
    r.decision = turn_decision_from_json(rj.at("decision"));
    t.rounds.push_back(std::move(r));
  }
  t.world_after = world_from_json(j.at("world_after"));
  t.coverage_final = coverage_from_json(j.at("coverage_final"));
  if (const auto& s = j.at("stop_reason"); !s.is_null()) {
    t.stop_reason = stop_reason_from_string(s.get<std::string>());
  }
  for (const auto& m : j.at("memory")) t.memory.push_back(memory_record_from_json(m));
  t.wall_time_s = j.at("wall_time_s").get<double>();
  t.status = j.at("status").get<std::string>();
  t.error = j.at("error").get<std::string>();
  return t;
}

std::vector<std::string> check_trajectory_invariants(const Trajectory& t, int max_turns,
                                                     const TraceFilterConfig& filter) {
  std::vector<std::string> v;
  auto at = [](const Round& r) { return "round " + std::to_string(r.index) + ": "; };
  if (static_cast<int>(t.rounds.size()) > max_turns) {
    v.push_back(std::to_string(t.rounds.size()) + " rounds exceed max_turns " +
                std::to_string(max_turns));
  }
  auto trace_free = [&](const Round& r, const ActionEvent& e) {
    if (!is_trace_free(e.content, filter) || strip_reasoning_traces(e.content, filter) != e.content) {
      v.push_back(at(r) + e.actor + " content is not a trace-filter fixed point");
    }
  };
  const CheckpointCoverage empty;
  const CheckpointCoverage* previous = &empty;
  for (std::size_t i = 0; i < t.rounds.size(); ++i) {
    const Round& r = t.rounds[i];
    if (r.index != static_cast<int>(i) + 1) v.push_back(at(r) + "index out of sequence");
    if (!scene_has_character(t.scene, r.action.actor)) v.push_back(at(r) + "actor not in scene");
    if (!scene_has_character(t.scene, r.reaction.actor)) v.push_back(at(r) + "responder not in scene");
    if (r.influence.responder == r.action.actor) v.push_back(at(r) + "responder equals actor");
    if (r.influence.responder != r.reaction.actor) v.push_back(at(r) + "reaction not by the chosen responder");
    if (!r.reaction.target || *r.reaction.target != r.action.actor) {
      v.push_back(at(r) + "reaction does not target the actor");
    }
    if (is_blank(r.summary)) v.push_back(at(r) + "empty summary");
    trace_free(r, r.action);
    trace_free(r, r.reaction);
    for (const auto& [id, bdi] : r.beliefs) {
      if (id == kProtagonistId) continue;
      auto init = t.initial_beliefs.find(id);
      if (init == t.initial_beliefs.end() || init->second.self_belief != bdi.self_belief) {
        v.push_back(at(r) + "self-belief of NPC " + id + " changed");
      }
    }
    const CheckpointCoverage& cov = r.decision.coverage_after;
    for (Dimension d : kDimensions) {
      const auto& before = previous->evidence(d);
      const auto& after = cov.evidence(d);
      if (after.size() < before.size() || !std::equal(before.begin(), before.end(), after.begin())) {
        v.push_back(at(r) + std::string(to_string(d)) + " evidence is not append-only");
        continue;
      }
      for (std::size_t k = before.size(); k < after.size(); ++k) {
        const Evidence& e = after[k];
        bool found = false;
        for (const ActionEvent* ev : {&r.action, &r.reaction}) {
          found = found || (ev->actor == kProtagonistId && contains(ev->content, e.quote));
        }
        if (e.round != r.index || !found) {
          v.push_back(at(r) + std::string(to_string(d)) + " evidence quote not in protagonist behavior");
        }
      }
    }
    previous = &cov;
  }
  return v;
}

}  // namespace rolesim
