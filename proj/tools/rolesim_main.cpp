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

// rolesim: simulate, evaluate, export-sft, export-dpo, report.
//
//   rolesim simulate --config run.conf [--seed 7] [--parallelism 4]
//   rolesim evaluate --config run.conf --judges a,b,c --arbiter d
//   rolesim export-sft --config run.conf
//   rolesim report --config run.conf

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "rolesim/commands.hpp"
#include "rolesim/error.hpp"
#include "rolesim/run_config.hpp"

namespace {

void print_outcome(const rolesim::StageOutcome& o) {
  for (const auto& w : o.warnings) std::cerr << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("rolesim"));

  CLI::App app{"Persona role-play simulation, debate evaluation and dataset export"};
  app.require_subcommand(1);

  std::string config_path;
  std::string log_level = "info";
  rolesim::RunOverrides overrides;
  std::string bank, out, arbiter;
  std::uint64_t seed = 0;
  int repeats = 0, parallelism = 0;
  std::vector<std::string> judges;
  double threshold = 0.0;

  app.add_option("--config", config_path, "Run configuration file")->required()->check(CLI::ExistingFile);
  auto* o_bank = app.add_option("--bank", bank, "Persona bank (JSONL)");
  auto* o_out = app.add_option("--out", out, "Output directory");
  auto* o_seed = app.add_option("--seed", seed, "Sampling seed");
  auto* o_repeats = app.add_option("--repeats", repeats, "Episodes per persona and model")->check(CLI::PositiveNumber);
  auto* o_par = app.add_option("--parallelism", parallelism, "Concurrent episodes")->check(CLI::PositiveNumber);
  app.add_flag("--no-early-stop", overrides.no_early_stop, "Run every episode to max_turns");
  auto* o_judges = app.add_option("--judges", judges, "Judge model ids")->delimiter(',');
  auto* o_arbiter = app.add_option("--arbiter", arbiter, "Referee model id");
  auto* o_threshold = app.add_option("--threshold", threshold, "Dispute variance threshold")->check(CLI::PositiveNumber);
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error")->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "Sample personas and run episodes")->fallthrough();
  auto* evaluate = app.add_subcommand("evaluate", "Score trajectories with the judge panel")->fallthrough();
  auto* export_sft = app.add_subcommand("export-sft", "Write SFT instances from top trajectories")->fallthrough();
  auto* export_dpo = app.add_subcommand("export-dpo", "Write step-aligned preference pairs")->fallthrough();
  auto* report = app.add_subcommand("report", "Print the summary grid")->fallthrough();

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  if (*o_bank) overrides.bank = bank;
  if (*o_out) overrides.out = out;
  if (*o_seed) overrides.seed = seed;
  if (*o_repeats) overrides.repeats = repeats;
  if (*o_par) overrides.parallelism = parallelism;
  if (*o_judges) overrides.judges = judges;
  if (*o_arbiter) overrides.arbiter = arbiter;
  if (*o_threshold) overrides.threshold = threshold;

  try {
    rolesim::RunConfig config = rolesim::load_run_config(config_path);
    rolesim::apply(config, overrides);
    rolesim::validate(config);

    rolesim::StageOutcome outcome;
    if (*simulate) {
      outcome = rolesim::cmd_simulate(config);
    } else if (*evaluate) {
      outcome = rolesim::cmd_evaluate(config);
    } else if (*export_sft) {
      outcome = rolesim::cmd_export_sft(config);
    } else if (*export_dpo) {
      outcome = rolesim::cmd_export_dpo(config);
    } else if (*report) {
      std::string grid;
      outcome = rolesim::cmd_report(config, grid);
      std::cout << grid;
    }
    print_outcome(outcome);
    return outcome.exit_code;
  } catch (const rolesim::Error& e) {
    std::cerr << "error: " << rolesim::to_string(e.code()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
