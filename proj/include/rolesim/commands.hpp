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
#include <string>
#include <vector>

#include "rolesim/datagen.hpp"
#include "rolesim/evaluation.hpp"
#include "rolesim/gateway.hpp"
#include "rolesim/run_config.hpp"
#include "rolesim/simulation.hpp"

// Pipeline stages behind the command-line tool. Each stage reads and writes
// files under config.out_dir:
//
//   simulate    scenes.jsonl, trajectories.jsonl, aborted.jsonl, simulate_manifest.json
//   evaluate    reports/<trajectory id>.json, summary.txt, summary.json, evaluate_manifest.json
//   export-sft  sft.jsonl, sft_manifest.json
//   export-dpo  dpo.jsonl, dpo_manifest.json
//
// Every stage returns a process exit code: 0 on full success, 1 when some
// unit of work failed but the stage still produced output, 2 when nothing
// could be produced.
namespace rolesim {

struct StageOutcome {
  int exit_code = 0;
  long succeeded = 0;
  long failed = 0;
  std::vector<std::string> warnings;
};

StageOutcome cmd_simulate(const RunConfig& config);
StageOutcome cmd_simulate(const RunConfig& config, Gateway& gateway);

StageOutcome cmd_evaluate(const RunConfig& config);
StageOutcome cmd_evaluate(const RunConfig& config, Gateway& gateway);

StageOutcome cmd_export_sft(const RunConfig& config);
StageOutcome cmd_export_dpo(const RunConfig& config);

/// Renders the summary table from the reports on disk to `out`.
StageOutcome cmd_report(const RunConfig& config, std::string& out);

// Readers shared with tests.
std::vector<Trajectory> read_trajectories(const std::filesystem::path& jsonl);
std::vector<EvaluationReport> read_reports(const std::filesystem::path& dir);

}  // namespace rolesim
