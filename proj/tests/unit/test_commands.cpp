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

#include "rolesim/commands.hpp"
#include "rolesim/error.hpp"
#include "rolesim/scripted_corpus.hpp"
#include "rolesim/simulation.hpp"
#include "rolesim/text.hpp"
#include "support.hpp"

using namespace rolesim;
namespace fs = std::filesystem;

namespace {

RunConfig demo_config(const fs::path& out) {
  RunConfig c = load_run_config(testing::demo_dir() / "demo.conf");
  c.out_dir = out;
  return c;
}

std::size_t line_count(const fs::path& p) {
  std::size_t n = 0;
  for (const auto& l : split_lines(read_file(p))) n += l.empty() ? 0 : 1;
  return n;
}

}  // namespace

TEST_CASE("the committed demo script matches the generator") {
  const auto bank = testing::demo_bank();
  const json fresh = script_to_json(corpus::build_script(bank.personas(), corpus::Options{}));
  const json committed = json::parse(read_file(testing::demo_dir() / "script.json"));
  CHECK(fresh == committed);
}

TEST_CASE("the demo pipeline runs end to end") {
  testing::ScratchDir dir("pipeline");
  const auto c = demo_config(dir.path());

  const auto sim = cmd_simulate(c);
  CHECK(sim.exit_code == 0);
  CHECK(sim.succeeded == 20);
  CHECK(line_count(dir.path() / "trajectories.jsonl") == 20);
  CHECK(line_count(dir.path() / "scenes.jsonl") == 10);
  CHECK(line_count(dir.path() / "aborted.jsonl") == 0);
  const json sm = json::parse(read_file(dir.path() / "simulate_manifest.json"));
  CHECK(sm["counts"]["complete"] == 20);
  CHECK(sm["created_at"] == "2025-01-01T00:00:00.000Z");
  CHECK(sm["personas"].size() == 10);

  const auto trajectories = read_trajectories(dir.path() / "trajectories.jsonl");
  for (const auto& t : trajectories) CHECK(check_trajectory_invariants(t, 10).empty());

  const auto ev = cmd_evaluate(c);
  CHECK(ev.exit_code == 0);
  CHECK(ev.succeeded == 20);
  CHECK(read_reports(dir.path() / "reports").size() == 20);
  CHECK(fs::exists(dir.path() / "summary.txt"));

  const auto sft = cmd_export_sft(c);
  CHECK(sft.exit_code == 0);
  CHECK(line_count(dir.path() / "sft.jsonl") > 0);
  const auto dpo = cmd_export_dpo(c);
  CHECK(dpo.exit_code == 0);
  const json dm = json::parse(read_file(dir.path() / "dpo_manifest.json"));
  CHECK(dm["counts"]["retained_pairs"].get<long>() > 0);
  CHECK(line_count(dir.path() / "dpo.jsonl") == static_cast<std::size_t>(dm["counts"]["steps"].get<long>()));

  std::string text;
  CHECK(cmd_report(c, text).succeeded == 20);
  CHECK(text.find("model-a") != std::string::npos);
  CHECK(text == read_file(dir.path() / "summary.txt"));

  // Missing reports are skipped and an oversized top-k is clamped.
  fs::remove(dir.path() / "reports" / (slugify(trajectories.front().id) + ".json"));
  auto big = c;
  big.sft_top_k = 100;
  const auto skipped = cmd_export_sft(big);
  CHECK(skipped.exit_code == 0);
  REQUIRE(skipped.warnings.size() == 2);
  CHECK(skipped.warnings[0] == "MissingReport: " + trajectories.front().id + " skipped");
  CHECK(skipped.warnings[1].find("clamped") != std::string::npos);
}

TEST_CASE("episode failures are isolated and set the exit code") {
  testing::ScratchDir dir("aborts");
  auto c = demo_config(dir.path());
  const auto bank = testing::demo_bank();
  Script script = corpus::build_script(bank.personas(), corpus::Options{});
  const auto sampled = sample_personas(bank, c.sample, c.seed);
  const std::string victim = slugify(episode_id("model-b", sampled.front().id, 0)) + ":";
  std::erase_if(script, [&](const auto& kv) { return kv.first.rfind(victim, 0) == 0; });
  c.backends.at(0).script = script;

  const auto sim = cmd_simulate(c);
  CHECK(sim.exit_code == 1);
  CHECK(sim.succeeded == 19);
  CHECK(sim.failed == 1);
  CHECK(line_count(dir.path() / "aborted.jsonl") == 1);
  const json row = json::parse(split_lines(read_file(dir.path() / "aborted.jsonl")).front());
  CHECK(row["status"] == "aborted");

  // Nothing can be scored by a script with no judge lines.
  std::erase_if(script, [](const auto& kv) { return kv.first.find(":judge.") != std::string::npos; });
  c.backends.at(0).script = script;
  const auto ev = cmd_evaluate(c);
  CHECK(ev.exit_code == 2);
  CHECK(ev.failed == 19);
  std::string text;
  CHECK_THROWS_AS(cmd_report(c, text), Error);
}
