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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rolesim/environment.hpp"
#include "rolesim/evaluation.hpp"
#include "rolesim/gateway.hpp"
#include "rolesim/simulation.hpp"

namespace rolesim {

/// Parses the key-value configuration format into {section: {key: value}}.
///
///   # comment
///   [section]            or [backend.name]
///   key = "text"         strings with \" \\ \n \t escapes
///   key = 42             integers, 0.5 reals, true / false
///   key = ["a", "b"]     single-line arrays of scalars
///
/// Keys are bare ([A-Za-z0-9_.-]) or quoted. Keys before the first section
/// land in section "". Throws ParseError with the offending line.
json parse_config_document(std::string_view text);

struct RunConfig {
  std::filesystem::path config_path;

  // [run]
  std::filesystem::path bank_path;
  std::size_t sample = 10;
  std::uint64_t seed = 0;
  int repeats = 1;
  int parallelism = 1;
  std::filesystem::path out_dir = "out";
  std::size_t memory_k = kDefaultRetrievalDepth;

  // [models]
  std::vector<std::string> protagonists;
  std::string npc_model;
  std::string environment_model;
  std::vector<std::string> judges;
  std::string arbiter;
  std::string embedding_backend;
  double agent_temperature = 0.7;
  double judge_temperature = 0.0;
  int max_tokens = 1024;

  // [routing]: model id -> backend name, with "default" as fallback.
  std::map<std::string, std::string> routing;

  // [backend.NAME]
  std::vector<BackendConfig> backends;
  std::map<std::string, std::filesystem::path> script_paths;

  // [turn_control]
  TurnControlConfig turn_control;

  // [evaluation]
  double threshold = 1.0;
  bool concurrent_judges = true;

  // [export]
  std::size_t sft_top_k = 50;
  std::size_t dpo_top_n = 50;
};

/// Relative paths resolve against `base_dir`. Scripts are loaded eagerly.
/// Errors: ParseError, ConfigError(field) for unknown keys and bad values,
/// IoError for unreadable scripts.
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

/// Command-line overrides; set fields win over the file.
struct RunOverrides {
  std::optional<std::filesystem::path> bank;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> repeats;
  std::optional<int> parallelism;
  bool no_early_stop = false;
  std::optional<std::vector<std::string>> judges;
  std::optional<std::string> arbiter;
  std::optional<double> threshold;
};

void apply(RunConfig& config, const RunOverrides& overrides);

/// Throws ConfigError(field) unless the bank exists, the rosters are
/// non-empty and every model routes to a declared backend.
void validate(const RunConfig& config);

std::string backend_for(const RunConfig& config, std::string_view model_id);
ModelBinding agent_binding(const RunConfig& config, std::string_view model_id);
ModelBinding judge_binding(const RunConfig& config, std::string_view model_id);

SimulationConfig simulation_config(const RunConfig& config, std::string_view protagonist_model);
EvaluationConfig evaluation_config(const RunConfig& config);

void register_backends(Gateway& gateway, const RunConfig& config);

/// Serializable snapshot for manifests. Scripts appear as path and hash.
json to_json(const RunConfig& config);

}  // namespace rolesim
