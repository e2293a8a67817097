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

#include "rolesim/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <spdlog/spdlog.h>

#include "rolesim/prompts.hpp"
#include "rolesim/text.hpp"

namespace rolesim {

std::vector<PoolEntry> build_pool(std::vector<Trajectory> trajectories,
                                  const std::vector<EvaluationReport>& reports) {
  std::map<std::string, const EvaluationReport*, std::less<>> by_id;
  for (const auto& r : reports) by_id[r.trajectory_id] = &r;
  std::vector<PoolEntry> pool;
  pool.reserve(trajectories.size());
  for (auto& t : trajectories) {
    PoolEntry e;
    if (auto it = by_id.find(t.id); it != by_id.end()) e.report = *it->second;
    e.trajectory = std::move(t);
    pool.push_back(std::move(e));
  }
  return pool;
}

std::vector<const PoolEntry*> rank_trajectories(const std::vector<PoolEntry>& pool) {
  std::vector<const PoolEntry*> out;
  for (const auto& e : pool) {
    if (!e.report) {
      fail_field(ErrorCode::kMissingReport, e.trajectory.id,
                 "trajectory " + e.trajectory.id + " has no evaluation report");
    }
    out.push_back(&e);
  }
  std::sort(out.begin(), out.end(), [](const PoolEntry* a, const PoolEntry* b) {
    if (a->report->overall != b->report->overall) return a->report->overall > b->report->overall;
    return a->trajectory.id < b->trajectory.id;
  });
  return out;
}

std::vector<BehaviorInstance> behavior_instances(const Trajectory& t) {
  std::vector<BehaviorInstance> out;
  for (const auto& r : t.rounds) {
    for (const ActionEvent* e : {&r.action, &r.reaction}) {
      if (e->actor != kProtagonistId) continue;
      const std::string replayed = prompts::flatten(assemble_prompt(e->prompt));
      if (replayed != e->prompt_text) {
        fail_field(ErrorCode::kPromptReplayMismatch, t.id,
                   "round " + std::to_string(r.index) + " prompt of " + t.id +
                       " does not replay from its recorded inputs");
      }
      require(!is_blank(e->content), "empty protagonist response in " + t.id);
      out.push_back(BehaviorInstance{e->prompt_text, e->content, t.id, r.index, e->kind, e->prompt});
    }
  }
  return out;
}

std::vector<BehaviorInstance> export_sft(const std::vector<PoolEntry>& pool, std::size_t top_k) {
  require(top_k <= pool.size(), "top_k " + std::to_string(top_k) + " exceeds pool size " +
                                    std::to_string(pool.size()));
  const auto ranked = rank_trajectories(pool);
  std::vector<BehaviorInstance> out;
  for (std::size_t i = 0; i < top_k; ++i) {
    auto part = behavior_instances(ranked[i]->trajectory);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

std::string canonicalize_prompt(const PromptContext& context) {
  return collapse_whitespace(prompts::flatten(assemble_prompt(context, /*mask_memories=*/true)));
}

std::vector<std::pair<std::size_t, std::size_t>> align_steps(
    const std::vector<BehaviorInstance>& chosen, const std::vector<BehaviorInstance>& rejected) {
  std::vector<std::string> keys;
  keys.reserve(rejected.size());
  for (const auto& r : rejected) keys.push_back(canonicalize_prompt(r.context));
  std::vector<bool> used(rejected.size(), false);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    const std::string key = canonicalize_prompt(chosen[i].context);
    for (std::size_t j = 0; j < rejected.size(); ++j) {
      if (!used[j] && keys[j] == key) {
        used[j] = true;
        out.emplace_back(i, j);
        break;
      }
    }
  }
  return out;
}

DpoResult build_dpo_pairs(const std::vector<PoolEntry>& pool, std::size_t top_n) {
  const auto ranked = rank_trajectories(pool);
  std::set<std::string> models;
  for (const auto& e : pool) models.insert(e.trajectory.protagonist_model_id);
  if (models.size() < 2) {
    fail(ErrorCode::kNoPairs, "preference pairs need at least two protagonist models, pool has " +
                                  std::to_string(models.size()));
  }

  struct Candidate {
    const PoolEntry* chosen;
    const PoolEntry* rejected;
    double gap;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    for (std::size_t j = i + 1; j < ranked.size(); ++j) {
      const PoolEntry* a = ranked[i];
      const PoolEntry* b = ranked[j];
      if (a->trajectory.persona.id != b->trajectory.persona.id) continue;
      if (a->trajectory.protagonist_model_id == b->trajectory.protagonist_model_id) continue;
      const double gap = a->report->overall - b->report->overall;
      if (!(gap > 0.0)) continue;  // ranked order puts the higher score first
      candidates.push_back(Candidate{a, b, gap});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    if (x.gap != y.gap) return x.gap > y.gap;
    if (x.chosen->trajectory.id != y.chosen->trajectory.id) {
      return x.chosen->trajectory.id < y.chosen->trajectory.id;
    }
    return x.rejected->trajectory.id < y.rejected->trajectory.id;
  });

  DpoResult result;
  result.candidate_pairs = candidates.size();
  const std::size_t keep = std::min(top_n, candidates.size());
  for (std::size_t c = 0; c < keep; ++c) {
    const Candidate& cand = candidates[c];
    const auto chosen = behavior_instances(cand.chosen->trajectory);
    const auto rejected = behavior_instances(cand.rejected->trajectory);
    std::size_t emitted = 0;
    for (const auto& [i, j] : align_steps(chosen, rejected)) {
      if (chosen[i].response == rejected[j].response) continue;
      DpoPair p;
      p.prompt = chosen[i].prompt;
      p.chosen = chosen[i].response;
      p.rejected = rejected[j].response;
      p.chosen_score = cand.chosen->report->overall;
      p.rejected_score = cand.rejected->report->overall;
      p.chosen_trajectory = cand.chosen->trajectory.id;
      p.rejected_trajectory = cand.rejected->trajectory.id;
      p.chosen_round = chosen[i].round;
      p.rejected_round = rejected[j].round;
      result.pairs.push_back(std::move(p));
      ++emitted;
    }
    if (emitted == 0) {
      const std::string msg = std::string(to_string(ErrorCode::kNoAlignableSteps)) + ": " +
                              cand.chosen->trajectory.id + " vs " + cand.rejected->trajectory.id +
                              " share no step prompt";
      spdlog::warn("{}", msg);
      result.warnings.push_back(msg);
      continue;
    }
    ++result.retained_pairs;
  }
  return result;
}

std::string sft_jsonl(const std::vector<BehaviorInstance>& instances) {
  std::string out;
  for (const auto& i : instances) {
    json j{{"prompt", i.prompt},
           {"response", i.response},
           {"meta", {{"trajectory_id", i.trajectory_id}, {"round", i.round}, {"kind", to_string(i.kind)}}}};
    out += j.dump() + "\n";
  }
  return out;
}

std::string dpo_jsonl(const std::vector<DpoPair>& pairs) {
  std::string out;
  for (const auto& p : pairs) {
    json j{{"prompt", p.prompt},
           {"chosen", p.chosen},
           {"rejected", p.rejected},
           {"meta",
            {{"chosen_traj", p.chosen_trajectory},
             {"rejected_traj", p.rejected_trajectory},
             {"chosen_round", p.chosen_round},
             {"rejected_round", p.rejected_round},
             {"chosen_score", p.chosen_score},
             {"rejected_score", p.rejected_score},
             {"gap", p.chosen_score - p.rejected_score}}}};
    out += j.dump() + "\n";
  }
  return out;
}

json to_json(const Manifest& m) {
  return json{{"kind", m.kind},
              {"counts", m.counts},
              {"sources", m.sources},
              {"config", m.config},
              {"prompt_version", m.prompt_version},
              {"created_at", m.created_at}};
}

Manifest make_manifest(std::string kind, const std::vector<std::filesystem::path>& sources,
                       json config) {
  Manifest m;
  m.kind = std::move(kind);
  for (const auto& p : sources) m.sources[p.generic_string()] = sha256_hex(read_file(p));
  m.config = std::move(config);
  m.prompt_version = std::string(prompts::asset_version());
  m.created_at = iso8601(std::chrono::system_clock::now());
  return m;
}

}  // namespace rolesim
