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


#include <doctest.h>

#include "rolesim/agents.hpp"
#include "rolesim/datagen.hpp"
#include "rolesim/error.hpp"
#include "rolesim/prompts.hpp"
#include "rolesim/text.hpp"
#include "support.hpp"

using namespace rolesim;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInvalidArgument;
}

// Two personas, two models, scores chosen per trajectory.
std::vector<PoolEntry> small_pool(SeededRng& rng) {
  const Persona p = testing::sample_persona("p1", "Ada Park");
  const Persona q = testing::sample_persona("p2", "Ben Ode");
  std::vector<Trajectory> ts{testing::synthetic_trajectory("a__p1", p, "a", 4, rng),
                             testing::synthetic_trajectory("b__p1", p, "b", 4, rng),
                             testing::synthetic_trajectory("a__p2", q, "a", 3, rng),
                             testing::synthetic_trajectory("b__p2", q, "b", 3, rng)};
  const std::vector<double> scores{4.0, 2.5, 3.0, 3.0};
  std::vector<EvaluationReport> reports;
  for (std::size_t i = 0; i < ts.size(); ++i) reports.push_back(testing::flat_report(ts[i], scores[i]));
  return build_pool(ts, reports);
}

}  // namespace

TEST_CASE("ranking is by overall score, ties by id") {
  SeededRng rng(1);
  const auto pool = small_pool(rng);
  const auto ranked = rank_trajectories(pool);
  std::vector<std::string> ids;
  for (const auto* e : ranked) ids.push_back(e->trajectory.id);
  CHECK(ids == std::vector<std::string>{"a__p1", "a__p2", "b__p2", "b__p1"});
  auto missing = pool;
  missing[2].report.reset();
  CHECK(code_of([&] { rank_trajectories(missing); }) == ErrorCode::kMissingReport);
}

TEST_CASE("behavior instances cover protagonist events only") {
  SeededRng rng(2);
  const auto t = testing::synthetic_trajectory("t", testing::sample_persona(), "a", 5, rng);
  const auto inst = behavior_instances(t);
  REQUIRE(inst.size() == 5);
  for (std::size_t i = 0; i < inst.size(); ++i) {
    CHECK(inst[i].round == static_cast<int>(i) + 1);
    CHECK(inst[i].kind == (i % 2 == 0 ? EventKind::kDialogue : EventKind::kReaction));
  }
  auto broken = t;
  broken.rounds[2].action.prompt.view += " edited";
  CHECK(code_of([&] { behavior_instances(broken); }) == ErrorCode::kPromptReplayMismatch);
}

TEST_CASE("SFT export takes the top-k trajectories") {
  SeededRng rng(3);
  const auto pool = small_pool(rng);
  const auto out = export_sft(pool, 2);
  // a__p1 has 4 protagonist steps, a__p2 has 3.
  REQUIRE(out.size() == 7);
  CHECK(out.front().trajectory_id == "a__p1");
  CHECK(out.back().trajectory_id == "a__p2");
  CHECK(export_sft(pool, 0).empty());
  CHECK_THROWS_AS(export_sft(pool, 5), Error);
  const std::string jsonl = sft_jsonl(out);
  const auto lines = split_lines(jsonl);
  CHECK(lines.size() >= 7);
  const json first = json::parse(lines[0]);
  CHECK(first["prompt"] == out[0].prompt);
  CHECK(first["meta"]["trajectory_id"] == "a__p1");
  CHECK(first["meta"]["round"] == 1);
}

TEST_CASE("steps align on prompts with memories masked") {
  SeededRng rng(4);
  const Persona p = testing::sample_persona();
  const auto a = behavior_instances(testing::synthetic_trajectory("a", p, "a", 4, rng));
  const auto b = behavior_instances(testing::synthetic_trajectory("b", p, "b", 3, rng));
  const auto pairs = align_steps(a, b);
  REQUIRE(pairs.size() == 3);
  for (std::size_t i = 0; i < pairs.size(); ++i) CHECK(pairs[i] == std::pair<std::size_t, std::size_t>{i, i});
  auto c = a[0].context;
  c.memories = {"something else entirely"};
  CHECK(canonicalize_prompt(c) == canonicalize_prompt(a[0].context));
  c.view += "\n  extra";
  CHECK(canonicalize_prompt(c) != canonicalize_prompt(a[0].context));
}

TEST_CASE("preference pairs ordered by score gap") {
  SeededRng rng(5);
  const auto pool = small_pool(rng);
  const auto res = build_dpo_pairs(pool, 10);
  // Only the p1 pair has a positive gap; p2 is a tie.
  CHECK(res.candidate_pairs == 1);
  CHECK(res.retained_pairs == 1);
  REQUIRE(res.pairs.size() == 4);
  for (const auto& pr : res.pairs) {
    CHECK(pr.chosen_trajectory == "a__p1");
    CHECK(pr.rejected_trajectory == "b__p1");
    CHECK(pr.chosen_score > pr.rejected_score);
    CHECK(pr.chosen != pr.rejected);
  }
  CHECK(build_dpo_pairs(pool, 0).pairs.empty());
  const json line = json::parse(split_lines(dpo_jsonl(res.pairs))[0]);
  CHECK(line["meta"]["gap"] == 1.5);
  CHECK(line["chosen"] == res.pairs[0].chosen);
}

TEST_CASE("single-model pools have no pairs") {
  SeededRng rng(6);
  auto pool = small_pool(rng);
  pool.erase(pool.begin() + 3);
  pool.erase(pool.begin() + 1);
  CHECK(code_of([&] { build_dpo_pairs(pool, 5); }) == ErrorCode::kNoPairs);
}

TEST_CASE("unalignable candidates are skipped with a warning") {
  SeededRng rng(7);
  auto pool = small_pool(rng);
  for (auto& r : pool[1].trajectory.rounds) {
    for (ActionEvent* e : {&r.action, &r.reaction}) {
      e->prompt.view = "A different scene.";
      e->prompt_text = prompts::flatten(assemble_prompt(e->prompt));
    }
  }
  const auto res = build_dpo_pairs(pool, 5);
  CHECK(res.candidate_pairs == 1);
  CHECK(res.retained_pairs == 0);
  CHECK(res.pairs.empty());
  REQUIRE(res.warnings.size() == 1);
  CHECK(res.warnings[0].rfind("NoAlignableSteps", 0) == 0);
}

TEST_CASE("manifests hash their sources") {
  testing::ScratchDir dir("manifest");
  const auto f = dir.path() / "x.txt";
  write_file(f, "abc");
  const auto m = make_manifest("sft", {f}, json{{"k", 1}});
  CHECK(m.sources.at(f.generic_string()) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const json j = to_json(m);
  CHECK(j["kind"] == "sft");
  CHECK(j["config"]["k"] == 1);
  CHECK_FALSE(j["created_at"].get<std::string>().empty());
}
