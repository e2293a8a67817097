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

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "rolesim/datagen.hpp"
#include "rolesim/evaluation.hpp"
#include "rolesim/gateway.hpp"
#include "rolesim/persona_bank.hpp"
#include "rolesim/rng.hpp"
#include "rolesim/scripted_corpus.hpp"
#include "rolesim/simulation.hpp"

namespace rolesim::testing {

std::filesystem::path demo_dir();
PersonaBank demo_bank();

/// Fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(std::string_view label);
  ~ScratchDir();
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

inline constexpr const char* kReplay = "replay";

/// Gateway with one scripted backend named "replay" and no real sleeping.
std::unique_ptr<Gateway> scripted_gateway(Script script, int embedding_dim = 32);
Script script_from(const json& doc);

ModelBinding replay_binding(std::string model_id, double temperature = 0.0);

Persona sample_persona(std::string id = "p-test", std::string name = "Ada Park");

/// Simulation settings matching the corpus options, all on "replay".
SimulationConfig corpus_simulation_config(const std::string& protagonist_model,
                                          bool early_stop, int max_turns = 10);
EvaluationConfig corpus_evaluation_config(const corpus::Options& options);

/// Runs every (persona, model, repeat) episode of the corpus serially and
/// returns the trajectories in that order.
std::vector<Trajectory> run_corpus(const std::vector<Persona>& personas,
                                   const corpus::Options& options, bool early_stop);

/// A trajectory whose events carry rebuildable prompts, for datagen tests.
/// `protagonist_events` rounds alternate action and reaction; each step's
/// content is drawn from `rng`.
Trajectory synthetic_trajectory(const std::string& id, const Persona& persona,
                                const std::string& model, int rounds, SeededRng& rng);

/// Report with all final scores equal to `score`.
EvaluationReport flat_report(const Trajectory& t, double score);

JudgeScore judge(std::string id, std::array<double, 8> values);

}  // namespace rolesim::testing
