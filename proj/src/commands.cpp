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

#include "rolesim/commands.hpp"

#include <algorithm>
#include <atomic>
#include <memory>
#include <optional>
#include <thread>

#include <spdlog/spdlog.h>

#include "rolesim/clock.hpp"
#include "rolesim/error.hpp"
#include "rolesim/persona_bank.hpp"
#include "rolesim/prompts.hpp"
#include "rolesim/rng.hpp"
#include "rolesim/text.hpp"

namespace rolesim {

namespace fs = std::filesystem;

namespace {

constexpr const char* kTrajectories = "trajectories.jsonl";
constexpr const char* kAborted = "aborted.jsonl";
constexpr const char* kScenes = "scenes.jsonl";
constexpr const char* kReportsDir = "reports";

std::string jsonl(const std::vector<json>& docs) {
  std::string out;
  for (const auto& d : docs) {
    out += d.dump();
    out += '\n';
  }
  return out;
}

void write_json(const fs::path& path, const json& doc) { write_file(path, doc.dump(2) + "\n"); }

std::string describe_error(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    return std::string(to_string(err->code())) + ": " + err->what();
  }
  return e.what();
}

int exit_code_for(const StageOutcome& o) {
  if (o.failed == 0) return 0;
  return o.succeeded > 0 ? 1 : 2;
}

struct EpisodeJob {
  std::string model;
  std::size_t persona_index = 0;
  int repeat = 0;
  std::string id;
};

struct EpisodeResult {
  std::optional<Trajectory> trajectory;
  std::optional<Trajectory> partial;
  std::string error;
};

}  // namespace

std::vector<Trajectory> read_trajectories(const fs::path& path) {
  std::vector<Trajectory> out;
  long line_no = 0;
  for (const auto& line : split_lines(read_file(path))) {
    ++line_no;
    if (is_blank(line)) continue;
    try {
      out.push_back(trajectory_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      Error err(ErrorCode::kParseError, path.generic_string() + ": " + e.what());
      err.with_line(line_no);
      throw err;
    }
  }
  return out;
}

std::vector<EvaluationReport> read_reports(const fs::path& dir) {
  std::vector<fs::path> files;
  if (fs::is_directory(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<EvaluationReport> out;
  for (const auto& f : files) {
    try {
      out.push_back(report_from_json(json::parse(read_file(f))));
    } catch (const json::exception& e) {
      fail(ErrorCode::kParseError, f.generic_string() + ": " + e.what());
    }
  }
  return out;
}

StageOutcome cmd_simulate(const RunConfig& config) {
  Gateway gateway;
  register_backends(gateway, config);
  return cmd_simulate(config, gateway);
}

StageOutcome cmd_simulate(const RunConfig& config, Gateway& gateway) {
  validate(config);
  const PersonaBank bank = load_bank(config.bank_path);
  const std::vector<Persona> personas = sample_personas(bank, config.sample, config.seed);
  const bool deterministic = gateway.all_deterministic();
  if (deterministic) gateway.set_sleeper([](std::chrono::milliseconds) {});
  fs::create_directories(config.out_dir);

  StageOutcome outcome;
  const ModelBinding env_binding = agent_binding(config, config.environment_model);

  std::vector<std::optional<Scene>> scenes(personas.size());
  std::vector<json> scene_docs;
  json status = json::array();
  for (std::size_t i = 0; i < personas.size(); ++i) {
    const Persona& p = personas[i];
    try {
      scenes[i] = setup_scenario(p, gateway, env_binding, "scene__" + p.id, slugify(p.id));
      scene_docs.push_back(to_json(*scenes[i]));
    } catch (const Error& e) {
      spdlog::error("scene setup failed for persona {}: {}", p.id, describe_error(e));
      status.push_back({{"persona", p.id}, {"stage", "scene"}, {"status", "failed"},
                        {"error", describe_error(e)}});
    }
  }

  std::vector<EpisodeJob> jobs;
  for (std::size_t i = 0; i < personas.size(); ++i) {
    for (const auto& model : config.protagonists) {
      for (int r = 0; r < config.repeats; ++r) {
        jobs.push_back(EpisodeJob{model, i, r, episode_id(model, personas[i].id, r)});
      }
    }
  }

  std::vector<EpisodeResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      const EpisodeJob& job = jobs[k];
      EpisodeResult& res = results[k];
      if (!scenes[job.persona_index]) {
        res.error = "no scene for persona " + personas[job.persona_index].id;
        continue;
      }
      EpisodeSpec spec{job.id, personas[job.persona_index], *scenes[job.persona_index], job.repeat};
      SimulationConfig sc = simulation_config(config, job.model);
      sc.seed = mix_seed(config.seed, fnv1a64(job.id));
      std::unique_ptr<Clock> clock;
      if (deterministic) {
        clock = std::make_unique<VirtualClock>();
      } else {
        clock = std::make_unique<SystemClock>();
      }
      try {
        res.trajectory = run_episode(spec, gateway, *clock, sc);
      } catch (const EpisodeAborted& e) {
        res.partial = e.partial();
        res.error = describe_error(e);
      } catch (const std::exception& e) {
        res.error = describe_error(e);
      }
      if (!res.trajectory) spdlog::error("episode {} failed: {}", job.id, res.error);
    }
  };
  const int workers = std::max(1, std::min<int>(config.parallelism, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<json> done;
  std::vector<json> aborted;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const EpisodeResult& res = results[k];
    json row{{"episode", jobs[k].id}, {"model", jobs[k].model},
             {"persona", personas[jobs[k].persona_index].id}, {"repeat", jobs[k].repeat}};
    if (res.trajectory) {
      done.push_back(to_json(*res.trajectory));
      row["status"] = "complete";
      row["rounds"] = res.trajectory->rounds.size();
      row["stop_reason"] = res.trajectory->stop_reason
                               ? json(std::string(to_string(*res.trajectory->stop_reason)))
                               : json(nullptr);
      ++outcome.succeeded;
    } else {
      if (res.partial) aborted.push_back(to_json(*res.partial));
      row["status"] = "aborted";
      row["error"] = res.error;
      ++outcome.failed;
    }
    status.push_back(row);
  }

  write_file(config.out_dir / kScenes, jsonl(scene_docs));
  write_file(config.out_dir / kTrajectories, jsonl(done));
  write_file(config.out_dir / kAborted, jsonl(aborted));

  Manifest m = make_manifest("simulate", {config.bank_path, config.out_dir / kTrajectories},
                             to_json(config));
  if (deterministic) m.created_at = iso8601(VirtualClock::default_epoch());
  m.counts = {{"personas", static_cast<long>(personas.size())},
              {"episodes", static_cast<long>(jobs.size())},
              {"complete", outcome.succeeded},
              {"aborted", outcome.failed}};
  json manifest = to_json(m);
  json sampled = json::array();
  for (const auto& p : personas) sampled.push_back(p.id);
  manifest["personas"] = sampled;
  manifest["seed"] = config.seed;
  manifest["config_sha256"] = sha256_hex(to_json(config).dump());
  manifest["episodes"] = status;
  write_json(config.out_dir / "simulate_manifest.json", manifest);

  spdlog::info("simulate: {} complete, {} aborted", outcome.succeeded, outcome.failed);
  outcome.exit_code = exit_code_for(outcome);
  return outcome;
}

StageOutcome cmd_evaluate(const RunConfig& config) {
  Gateway gateway;
  register_backends(gateway, config);
  return cmd_evaluate(config, gateway);
}

StageOutcome cmd_evaluate(const RunConfig& config, Gateway& gateway) {
  const EvaluationConfig ec = evaluation_config(config);
  validate(ec);
  const bool deterministic = gateway.all_deterministic();
  if (deterministic) gateway.set_sleeper([](std::chrono::milliseconds) {});
  const auto trajectories = read_trajectories(config.out_dir / kTrajectories);
  const fs::path reports_dir = config.out_dir / kReportsDir;
  fs::create_directories(reports_dir);

  StageOutcome outcome;
  std::vector<EvaluationReport> reports;
  json status = json::array();
  std::vector<fs::path> written;
  for (const auto& t : trajectories) {
    try {
      EvaluationReport r = evaluate_trajectory(t, ec, gateway);
      const fs::path path = reports_dir / (slugify(t.id) + ".json");
      write_json(path, to_json(r));
      written.push_back(path);
      for (const auto& w : r.warnings) outcome.warnings.push_back(t.id + ": " + w);
      status.push_back({{"trajectory", t.id}, {"status", "complete"},
                        {"disputed", r.disputed.size()}, {"overall", r.overall}});
      reports.push_back(std::move(r));
      ++outcome.succeeded;
    } catch (const std::exception& e) {
      spdlog::error("evaluation of {} failed: {}", t.id, describe_error(e));
      status.push_back({{"trajectory", t.id}, {"status", "failed"}, {"error", describe_error(e)}});
      ++outcome.failed;
    }
  }

  if (!reports.empty()) {
    const auto summary = summarize_reports(reports);
    write_file(config.out_dir / "summary.txt", render_summary(summary));
    write_json(config.out_dir / "summary.json", to_json(summary));
  }

  Manifest m = make_manifest("evaluate", {config.out_dir / kTrajectories}, to_json(config));
  if (deterministic) m.created_at = iso8601(VirtualClock::default_epoch());
  m.counts = {{"trajectories", static_cast<long>(trajectories.size())},
              {"reports", outcome.succeeded},
              {"failed", outcome.failed}};
  json manifest = to_json(m);
  manifest["trajectories"] = status;
  write_json(config.out_dir / "evaluate_manifest.json", manifest);

  spdlog::info("evaluate: {} reports, {} failed", outcome.succeeded, outcome.failed);
  outcome.exit_code = exit_code_for(outcome);
  return outcome;
}

namespace {

// Trajectories lacking a report are dropped with a warning rather than
// failing the export.
std::vector<PoolEntry> load_scored_pool(const RunConfig& config, StageOutcome& outcome) {
  auto pool = build_pool(read_trajectories(config.out_dir / kTrajectories),
                         read_reports(config.out_dir / kReportsDir));
  std::vector<PoolEntry> scored;
  for (auto& e : pool) {
    if (e.report) {
      scored.push_back(std::move(e));
    } else {
      outcome.warnings.push_back("MissingReport: " + e.trajectory.id + " skipped");
      spdlog::warn("no report for {}, skipped", e.trajectory.id);
    }
  }
  return scored;
}

}  // namespace

StageOutcome cmd_export_sft(const RunConfig& config) {
  StageOutcome outcome;
  const auto pool = load_scored_pool(config, outcome);
  std::size_t k = config.sft_top_k;
  if (k > pool.size()) {
    outcome.warnings.push_back("sft_top_k " + std::to_string(k) + " exceeds pool of " +
                               std::to_string(pool.size()) + ", clamped");
    spdlog::warn("sft_top_k {} exceeds the pool of {}, clamped", k, pool.size());
    k = pool.size();
  }
  const auto instances = export_sft(pool, k);
  const fs::path out = config.out_dir / "sft.jsonl";
  write_file(out, sft_jsonl(instances));

  Manifest m = make_manifest("sft", {config.out_dir / kTrajectories}, to_json(config));
  m.counts = {{"pool", static_cast<long>(pool.size())},
              {"top_k", static_cast<long>(k)},
              {"instances", static_cast<long>(instances.size())}};
  json manifest = to_json(m);
  manifest["warnings"] = outcome.warnings;
  write_json(config.out_dir / "sft_manifest.json", manifest);
  outcome.succeeded = static_cast<long>(instances.size());
  spdlog::info("export-sft: {} instances from {} trajectories", instances.size(), k);
  return outcome;
}

StageOutcome cmd_export_dpo(const RunConfig& config) {
  StageOutcome outcome;
  const auto pool = load_scored_pool(config, outcome);
  const DpoResult result = build_dpo_pairs(pool, config.dpo_top_n);
  for (const auto& w : result.warnings) outcome.warnings.push_back(w);
  write_file(config.out_dir / "dpo.jsonl", dpo_jsonl(result.pairs));

  Manifest m = make_manifest("dpo", {config.out_dir / kTrajectories}, to_json(config));
  m.counts = {{"pool", static_cast<long>(pool.size())},
              {"candidate_pairs", static_cast<long>(result.candidate_pairs)},
              {"retained_pairs", static_cast<long>(result.retained_pairs)},
              {"steps", static_cast<long>(result.pairs.size())}};
  json manifest = to_json(m);
  manifest["warnings"] = outcome.warnings;
  write_json(config.out_dir / "dpo_manifest.json", manifest);
  outcome.succeeded = static_cast<long>(result.pairs.size());
  spdlog::info("export-dpo: {} steps from {} trajectory pairs", result.pairs.size(),
               result.retained_pairs);
  return outcome;
}

StageOutcome cmd_report(const RunConfig& config, std::string& out) {
  StageOutcome outcome;
  const auto reports = read_reports(config.out_dir / kReportsDir);
  if (reports.empty()) fail(ErrorCode::kNoScores, "no reports under " + config.out_dir.generic_string());
  out = render_summary(summarize_reports(reports));
  outcome.succeeded = static_cast<long>(reports.size());
  return outcome;
}

}  // namespace rolesim
