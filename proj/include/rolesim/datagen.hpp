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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rolesim/evaluation.hpp"
#include "rolesim/simulation.hpp"

namespace rolesim {

struct PoolEntry {
  Trajectory trajectory;
  std::optional<EvaluationReport> report;
};

/// Pairs trajectories with their reports by trajectory id. Trajectories
/// without a report are kept with an empty report slot.
std::vector<PoolEntry> build_pool(std::vector<Trajectory> trajectories,
                                  const std::vector<EvaluationReport>& reports);

/// Descending overall score, ties by trajectory id ascending.
/// Throws MissingReport(trajectory id) when an entry has no report.
std::vector<const PoolEntry*> rank_trajectories(const std::vector<PoolEntry>& pool);

struct BehaviorInstance {
  std::string prompt;
  std::string response;
  std::string trajectory_id;
  int round = 1;
  EventKind kind = EventKind::kAction;
  PromptContext context;

  bool operator==(const BehaviorInstance&) const = default;
};

/// One instance per protagonist event, in round order, action before
/// reaction. Each stored prompt is rebuilt from its recorded inputs and must
/// match byte for byte.
///
/// Errors: PromptReplayMismatch(trajectory id).
std::vector<BehaviorInstance> behavior_instances(const Trajectory& t);

/// Instances from the top_k ranked trajectories, in rank then round order.
/// Errors: InvalidArgument when top_k exceeds the pool; MissingReport.
std::vector<BehaviorInstance> export_sft(const std::vector<PoolEntry>& pool, std::size_t top_k);

/// Prompt key used for step alignment: memories masked, whitespace collapsed.
std::string canonicalize_prompt(const PromptContext& context);

struct DpoPair {
  std::string prompt;
  std::string chosen;
  std::string rejected;
  double chosen_score = 0.0;
  double rejected_score = 0.0;
  std::string chosen_trajectory;
  std::string rejected_trajectory;
  int chosen_round = 1;
  int rejected_round = 1;

  bool operator==(const DpoPair&) const = default;
};

struct DpoResult {
  std::vector<DpoPair> pairs;
  std::size_t candidate_pairs = 0;
  std::size_t retained_pairs = 0;
  std::vector<std::string> warnings;
};

/// Steps of `chosen` paired greedily, in order, with the first unused step
/// of `rejected` carrying the same canonical prompt.
std::vector<std::pair<std::size_t, std::size_t>> align_steps(
    const std::vector<BehaviorInstance>& chosen, const std::vector<BehaviorInstance>& rejected);

/// Preference pairs from trajectories of the same persona under different
/// protagonist models. Trajectory pairs are ranked by score gap, largest
/// first, and the top_n are decomposed into aligned steps. Pairs without an
/// alignable step are skipped with a NoAlignableSteps warning.
///
/// Errors: NoPairs when the pool holds fewer than two protagonist models;
/// MissingReport.
DpoResult build_dpo_pairs(const std::vector<PoolEntry>& pool, std::size_t top_n);

std::string sft_jsonl(const std::vector<BehaviorInstance>& instances);
std::string dpo_jsonl(const std::vector<DpoPair>& pairs);

struct Manifest {
  std::string kind;
  std::map<std::string, long> counts;
  std::map<std::string, std::string> sources;  // path -> sha256
  json config;
  std::string prompt_version;
  std::string created_at;
};

json to_json(const Manifest& m);

/// Manifest whose sources are hashed from the files on disk.
Manifest make_manifest(std::string kind, const std::vector<std::filesystem::path>& sources,
                       json config);

}  // namespace rolesim
