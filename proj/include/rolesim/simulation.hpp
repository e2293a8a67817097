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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rolesim/agents.hpp"
#include "rolesim/clock.hpp"
#include "rolesim/environment.hpp"
#include "rolesim/error.hpp"

namespace rolesim {

inline constexpr int kTrajectorySchemaVersion = 1;

struct SimulationConfig {
  TurnControlConfig turn_control;
  std::uint64_t seed = 0;
  ModelBinding protagonist;
  ModelBinding npc;
  ModelBinding environment;
  std::string embedding_backend;
  std::size_t memory_k = kDefaultRetrievalDepth;
};

/// Throws ConfigError on an invalid turn-control block or missing bindings.
void validate(const SimulationConfig& config);

struct StateUpdate {
  std::string character;
  CharacterEntry before;
  CharacterEntry after;
  bool with_feedback = false;
  std::string prompt_text;

  bool operator==(const StateUpdate&) const = default;
};

using BeliefSnapshot = std::map<std::string, BdiState>;

struct Round {
  int index = 1;
  ActionEvent action;
  Influence influence;
  ActionEvent reaction;
  std::string summary;
  std::vector<StateUpdate> state_updates;
  bool env_changed = false;
  std::vector<std::string> environment_facts;  // after the round
  BeliefSnapshot beliefs;                      // after the round
  TurnDecision decision;

  bool operator==(const Round&) const = default;
};

struct Trajectory {
  int schema_version = kTrajectorySchemaVersion;
  std::string id;
  Persona persona;
  int repeat = 0;
  std::uint64_t seed = 0;
  std::string protagonist_model_id;
  std::string npc_model_id;
  std::string environment_model_id;
  std::string prompt_version;
  Scene scene;
  BeliefSnapshot initial_beliefs;
  WorldState world_initial;
  std::vector<Round> rounds;
  WorldState world_after;
  CheckpointCoverage coverage_final;
  std::optional<StopReason> stop_reason;
  std::vector<MemoryRecord> memory;
  double wall_time_s = 0.0;
  std::string status = "complete";  // or "aborted"
  std::string error;

  bool operator==(const Trajectory&) const = default;
};

json to_json(const Trajectory& t);
Trajectory trajectory_from_json(const json& j);

/// Raised when an episode cannot continue. Carries every completed round.
class EpisodeAborted : public Error {
 public:
  EpisodeAborted(ErrorCode cause, const std::string& message, Trajectory partial);

  ErrorCode cause() const noexcept { return cause_; }
  const Trajectory& partial() const noexcept { return partial_; }

 private:
  ErrorCode cause_;
  Trajectory partial_;
};

struct EpisodeSpec {
  std::string id;
  Persona persona;
  Scene scene;
  int repeat = 0;
};

/// "<model-slug>__<persona id>__r<repeat>".
std::string episode_id(std::string_view model_id, std::string_view persona_id, int repeat);

/// The acting character of `round` given the previous round's responder:
/// the protagonist on odd rounds, the previous responder on even rounds.
std::string acting_character(int round, std::string_view previous_responder);

/// Runs the round loop until the turn controller stops it.
///
/// Errors: EpisodeAborted on any gateway, parse or generation failure.
Trajectory run_episode(const EpisodeSpec& spec, Gateway& gateway, Clock& clock,
                       const SimulationConfig& config);

/// The situation text a character sees before acting or reacting.
std::string render_view(const EnvironmentController& env, const WorldState& world,
                        const std::vector<Round>& rounds);

/// Structural checks on a finished or partial trajectory: actors in the
/// scene, responder distinct from the actor, reaction targets, non-empty
/// summaries, constant NPC self-belief, trace-free content, monotone coverage,
/// evidence quotes traceable to the cited round, and the round bound.
/// Returns one line per violation.
std::vector<std::string> check_trajectory_invariants(const Trajectory& t, int max_turns,
                                                     const TraceFilterConfig& filter = {});

}  // namespace rolesim
