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
#include <vector>

#include "rolesim/environment.hpp"
#include "rolesim/evaluation.hpp"
#include "rolesim/gateway.hpp"
#include "rolesim/persona_bank.hpp"

// Builds complete replay scripts for the scripted backend so that the whole
// pipeline (scene setup, episodes, judging, arbitration) runs offline. Every
// tag is scoped to its persona or episode, so runs are deterministic under
// any episode parallelism.
namespace rolesim::corpus {

struct Options {
  std::vector<std::string> protagonists{"model-a", "model-b"};
  std::string npc_model = "npc-backbone";
  std::string environment_model = "env-backbone";
  std::vector<std::string> judges{"judge-1", "judge-2", "judge-3"};
  std::string arbiter = "arbiter";
  int repeats = 1;
  int max_turns = 10;
  // Round in which the fourth checkpoint dimension gains evidence; 4 or 5.
  int quorum_round = 5;
  // One transient failure in the first episode, absorbed by retries.
  bool inject_transient = true;
  // Metric the judges split on for every other persona.
  Metric disputed_metric = Metric::kIR;
};

/// Number of supporting characters in the scene of the persona at `index`.
std::size_t npc_count(std::size_t persona_index);

/// The evidence phrase the protagonist voices for `d`.
std::string evidence_phrase(const Persona& p, Dimension d);

/// The checkpoint dimension that gains evidence in `round`, if any.
std::optional<Dimension> scheduled_dimension(int round, int quorum_round);

/// The protagonist's filtered line in `round` under the model at `model_index`.
std::string protagonist_line(const Persona& p, std::size_t model_index, int round,
                             int quorum_round);

/// Score judge `judge_index` of `judge_count` gives on `m` to the model at
/// `model_index` for the persona at `persona_index`.
int judge_value(std::size_t model_index, std::size_t persona_index, std::size_t judge_index,
                std::size_t judge_count, Metric m, const Options& options);

/// Whether the judges split on the disputed metric for this persona.
bool persona_disputed(std::size_t persona_index);

/// The referee's reconciled score.
inline constexpr int kRefereeScore = 4;

Script build_script(const std::vector<Persona>& personas, const Options& options);

}  // namespace rolesim::corpus
