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

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rolesim/agents.hpp"
#include "rolesim/gateway.hpp"
#include "rolesim/persona_bank.hpp"
#include "rolesim/prompts.hpp"

namespace rolesim {

inline constexpr std::string_view kProtagonistId = "protagonist";

struct NpcSketch {
  std::string id;
  std::string name;
  std::string sketch;
  std::string goal;

  bool operator==(const NpcSketch&) const = default;
};

struct Scene {
  std::string scene_id;
  std::string persona_id;
  std::string event_description;
  std::string time;
  std::string place;
  std::string protagonist_sketch;
  std::vector<NpcSketch> npcs;
  // Character id to opening action or line.
  std::map<std::string, std::string> initial_actions;
  // Optional starting state; characters left out start at `place`.
  std::map<std::string, std::string> initial_positions;
  std::map<std::string, std::string> initial_emotions;
  std::vector<std::string> environment_facts;

  bool operator==(const Scene&) const = default;
};

inline constexpr std::size_t kMinNpcs = 2;
inline constexpr std::size_t kMaxNpcs = 3;

/// Throws SceneInvalid(field) for the first violated invariant.
void validate_scene(const Scene& scene);

/// Ids of every character, protagonist first.
std::vector<std::string> scene_characters(const Scene& scene);
bool scene_has_character(const Scene& scene, std::string_view id);
/// Display name: the persona name for the protagonist, the sketch name otherwise.
std::string character_name(const Scene& scene, const Persona& persona, std::string_view id);

/// Scene from generator output. Does not validate.
Scene scene_from_generation(const json& doc, std::string scene_id, std::string persona_id);

json to_json(const Scene& s);
Scene scene_from_json(const json& j);

/// Builds the scene for `persona`, regenerating once when the first output is
/// unparseable or violates an invariant.
///
/// Errors: SceneInvalid(field) after the retry, field "json" for unparseable
/// output; gateway errors propagate.
Scene setup_scenario(const Persona& persona, Gateway& gateway, const ModelBinding& binding,
                     std::string scene_id, std::string_view tag_scope);

struct CharacterEntry {
  std::string position;
  std::string emotional_state;

  bool operator==(const CharacterEntry&) const = default;
};

struct WorldState {
  std::map<std::string, CharacterEntry> characters;
  std::vector<std::string> environment_facts;

  bool operator==(const WorldState&) const = default;
};

WorldState initial_world(const Scene& scene);
json to_json(const WorldState& w);
WorldState world_from_json(const json& j);

struct Influence {
  std::string responder;
  std::string impact;

  bool operator==(const Influence&) const = default;
};

enum class Dimension { kBackground, kPersonality, kValues, kInterests, kExperiences };

inline constexpr std::array<Dimension, 5> kDimensions = {
    Dimension::kBackground, Dimension::kPersonality, Dimension::kValues,
    Dimension::kInterests, Dimension::kExperiences};

std::string_view to_string(Dimension d);
std::optional<Dimension> dimension_from_string(std::string_view s);

struct Evidence {
  int round = 1;
  std::string quote;

  bool operator==(const Evidence&) const = default;
};

/// Per-dimension evidence. Evidence lists only grow.
class CheckpointCoverage {
 public:
  void add(Dimension d, Evidence e);
  const std::vector<Evidence>& evidence(Dimension d) const;
  bool covered(Dimension d, int evidence_quorum) const;
  int covered_count(int evidence_quorum) const;

  /// Consecutive rounds that produced no new evidence.
  int stall() const noexcept { return stall_; }
  void set_stall(int stall) noexcept { stall_ = stall; }

  bool operator==(const CheckpointCoverage&) const = default;

 private:
  std::array<std::vector<Evidence>, 5> evidence_;
  int stall_ = 0;
};

json to_json(const CheckpointCoverage& c);
CheckpointCoverage coverage_from_json(const json& j);

struct TurnControlConfig {
  int dim_quorum = 4;
  int stall_rounds = 2;
  int evidence_quorum = 1;
  int max_turns = 10;
  bool early_stop_enabled = true;
};

/// Throws ConfigError for out-of-range knobs.
void validate(const TurnControlConfig& config);

enum class StopReason { kAllCovered, kQuorumCovered, kStalled, kMaxTurns };

std::string_view to_string(StopReason r);
StopReason stop_reason_from_string(std::string_view s);

/// The stopping rule, checked in order: all dimensions covered, at least
/// dim_quorum covered, stall >= stall_rounds with at least one covered, and
/// round >= max_turns. With early stop disabled only the last applies.
std::optional<StopReason> decide_turn(int covered, int stall, int round,
                                      const TurnControlConfig& config);

struct TurnDecision {
  bool stop = false;
  std::optional<StopReason> reason;
  CheckpointCoverage coverage_after;

  bool operator==(const TurnDecision&) const = default;
};

json to_json(const TurnDecision& d);
TurnDecision turn_decision_from_json(const json& j);

struct CharacterUpdate {
  CharacterEntry entry;
  std::string prompt_text;
};

struct EnvironmentUpdate {
  WorldState world;
  bool changed = false;
};

/// The environment agent for one episode. Calls are sequential.
class EnvironmentController {
 public:
  EnvironmentController(Scene scene, Persona persona, Gateway& gateway, ModelBinding binding,
                        std::string tag_scope, TurnControlConfig config);

  const Scene& scene() const noexcept { return scene_; }
  const TurnControlConfig& config() const noexcept { return config_; }
  std::string name_of(std::string_view id) const;

  /// Picks the single character most affected by `action`. The model may
  /// name the responder by id or display name.
  ///
  /// Errors: InvalidResponder when the model names the actor, an unknown
  /// character or gives no impact, after one retry.
  Influence analyze_influence(const ActionEvent& action, const WorldState& world);

  /// Errors: InvalidArgument when reaction.target is not action.actor;
  /// EmptyGeneration after one retry.
  std::string summarize_interaction(const ActionEvent& action, const ActionEvent& reaction);

  /// Classifies this round's protagonist events against the checkpoint
  /// dimensions and applies the stopping rule. Quotes that do not occur in
  /// the round's protagonist content are dropped. Makes no call when the
  /// protagonist did not act this round.
  ///
  /// Errors: TurnControlUnparseable after one retry.
  TurnDecision check_turn_control(const CheckpointCoverage& coverage,
                                  const std::vector<ActionEvent>& round_events, int round);

  /// Refreshes one character's position and emotional state. Without
  /// `feedback` the prompt carries the character's own action alone.
  CharacterUpdate update_character_state(std::string_view character,
                                         const ActionEvent& own_action,
                                         const ActionEvent* feedback,
                                         std::string_view summary, const WorldState& world);

  /// Facts are revised only when the model reports an environment-affecting
  /// action; otherwise the world comes back unchanged. No call for an empty
  /// round.
  EnvironmentUpdate update_environment(const WorldState& world,
                                       const std::vector<ActionEvent>& round_events);

  /// "Name: content", the form events are shown in to other characters.
  std::string describe(const ActionEvent& event) const;
  std::string render_world(const WorldState& world) const;

 private:
  CompletionResult call(std::string_view template_name, const prompts::Values& values,
                        std::string tag);
  std::string round_tag(std::string_view op, int round) const;

  Scene scene_;
  Persona persona_;
  Gateway& gateway_;
  ModelBinding binding_;
  std::string tag_scope_;
  TurnControlConfig config_;
};

std::string render_coverage(const CheckpointCoverage& coverage, int evidence_quorum);

}  // namespace rolesim
