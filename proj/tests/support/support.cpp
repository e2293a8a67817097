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

#include "support.hpp"

#include <atomic>
#include <chrono>

#include "rolesim/agents.hpp"
#include "rolesim/clock.hpp"
#include "rolesim/environment.hpp"
#include "rolesim/prompts.hpp"
#include "rolesim/text.hpp"

namespace rolesim::testing {

namespace fs = std::filesystem;

fs::path demo_dir() { return fs::path(ROLESIM_DEMO_DIR); }

PersonaBank demo_bank() { return load_bank(demo_dir() / "personas.jsonl"); }

ScratchDir::ScratchDir(std::string_view label) {
  static std::atomic<int> counter{0};
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  path_ = fs::temp_directory_path() /
          ("rolesim-" + std::string(label) + "-" + std::to_string(stamp) + "-" +
           std::to_string(counter++));
  fs::create_directories(path_);
}

ScratchDir::~ScratchDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::unique_ptr<Gateway> scripted_gateway(Script script, int embedding_dim) {
  auto gw = std::make_unique<Gateway>();
  BackendConfig c;
  c.name = kReplay;
  c.kind = BackendKind::kScripted;
  c.script = std::move(script);
  c.embedding_dim = embedding_dim;
  c.backoff.initial = std::chrono::milliseconds(1);
  c.backoff.cap = std::chrono::milliseconds(2);
  gw->add_backend(std::move(c));
  gw->set_sleeper([](std::chrono::milliseconds) {});
  return gw;
}

Script script_from(const json& doc) { return parse_script(doc); }

ModelBinding replay_binding(std::string model_id, double temperature) {
  return ModelBinding{std::move(model_id), kReplay, temperature, 512};
}

Persona sample_persona(std::string id, std::string name) {
  Persona p;
  p.id = std::move(id);
  p.name = name;
  p.narrative = name + " is a 40-year-old bookbinder who lives above the shop.";
  p.facts.demographics = "40-year-old living in Leeds";
  p.facts.occupation = "a bookbinder";
  p.facts.personality = {"careful and funny"};
  p.facts.values = {"craftsmanship"};
  p.facts.interests = {"birdwatching"};
  p.facts.experiences = {"apprenticed in Florence"};
  return p;
}

SimulationConfig corpus_simulation_config(const std::string& protagonist_model, bool early_stop,
                                          int max_turns) {
  corpus::Options defaults;
  SimulationConfig s;
  s.turn_control.max_turns = max_turns;
  s.turn_control.early_stop_enabled = early_stop;
  s.protagonist = replay_binding(protagonist_model, 0.7);
  s.npc = replay_binding(defaults.npc_model, 0.7);
  s.environment = replay_binding(defaults.environment_model, 0.7);
  s.embedding_backend = kReplay;
  return s;
}

EvaluationConfig corpus_evaluation_config(const corpus::Options& options) {
  EvaluationConfig e;
  for (const auto& j : options.judges) e.judges.push_back(replay_binding(j));
  e.referee = replay_binding(options.arbiter);
  e.concurrent_judges = false;
  return e;
}

std::vector<Trajectory> run_corpus(const std::vector<Persona>& personas,
                                   const corpus::Options& options, bool early_stop) {
  auto gw = scripted_gateway(corpus::build_script(personas, options));
  std::vector<Trajectory> out;
  for (const auto& p : personas) {
    const Scene scene = setup_scenario(p, *gw, replay_binding(options.environment_model),
                                       "scene__" + p.id, slugify(p.id));
    for (const auto& model : options.protagonists) {
      for (int r = 0; r < options.repeats; ++r) {
        EpisodeSpec spec{episode_id(model, p.id, r), p, scene, r};
        VirtualClock clock;
        out.push_back(run_episode(spec, *gw, clock,
                                  corpus_simulation_config(model, early_stop, options.max_turns)));
      }
    }
  }
  return out;
}

namespace {

constexpr std::array<const char*, 12> kWords = {"garden", "letter", "river",  "train",
                                                "market", "bread",  "winter", "music",
                                                "window", "bridge", "coffee", "lamp"};

std::string random_sentence(SeededRng& rng) {
  std::string s = "\"I keep thinking about the";
  for (int i = 0; i < 3; ++i) {
    s += ' ';
    s += kWords[rng.below(kWords.size())];
  }
  return s + ".\"";
}

ActionEvent synthetic_event(int round, std::string actor, EventKind kind, std::string content,
                            const Persona& persona, bool protagonist, SeededRng& rng) {
  ActionEvent e;
  e.round = round;
  e.actor = std::move(actor);
  e.kind = kind;
  e.content = content;
  e.raw_text = std::move(content);
  e.timestamp = "2025-01-01T00:00:00Z";
  PromptContext& c = e.prompt;
  c.template_name = kind == EventKind::kReaction ? "reaction" : (round == 1 ? "action" : "dialogue");
  c.persona = protagonist ? persona_summary(persona) : "Name: Sam\n\nA neighbor.";
  c.bdi = BdiState{"I am myself.", "A quiet afternoon.", "Talk.", "Say hello."};
  c.view = "Event: a visit\nRound " + std::to_string(round) + " of the afternoon.";
  if (protagonist && rng.below(2) == 1) c.memories = {random_sentence(rng)};
  if (kind == EventKind::kReaction) {
    c.incoming = "Sam: hello";
    c.impact = "Addressed directly.";
  }
  e.prompt_text = prompts::flatten(assemble_prompt(c));
  return e;
}

}  // namespace

Trajectory synthetic_trajectory(const std::string& id, const Persona& persona,
                                const std::string& model, int rounds, SeededRng& rng) {
  Trajectory t;
  t.id = id;
  t.persona = persona;
  t.protagonist_model_id = model;
  t.npc_model_id = "npc";
  t.environment_model_id = "env";
  t.prompt_version = std::string(prompts::asset_version());
  t.scene.scene_id = "scene__" + persona.id;
  t.scene.persona_id = persona.id;
  t.scene.npcs = {NpcSketch{"sam", "Sam", "A neighbor.", "Chat."}};
  for (int r = 1; r <= rounds; ++r) {
    Round round;
    round.index = r;
    const bool protagonist_acts = r % 2 == 1;
    const std::string actor = protagonist_acts ? std::string(kProtagonistId) : "sam";
    const std::string responder = protagonist_acts ? "sam" : std::string(kProtagonistId);
    round.action = synthetic_event(r, actor, EventKind::kDialogue, random_sentence(rng), persona,
                                   protagonist_acts, rng);
    round.reaction = synthetic_event(r, responder, EventKind::kReaction, random_sentence(rng),
                                     persona, !protagonist_acts, rng);
    round.reaction.target = actor;
    round.influence = Influence{responder, "Addressed."};
    round.summary = "They talked.";
    t.rounds.push_back(std::move(round));
  }
  t.stop_reason = StopReason::kMaxTurns;
  return t;
}

EvaluationReport flat_report(const Trajectory& t, double score) {
  EvaluationReport r;
  r.trajectory_id = t.id;
  r.persona_id = t.persona.id;
  r.model_id = t.protagonist_model_id;
  r.repeat = t.repeat;
  r.mean.values.fill(score);
  r.final_scores.values.fill(score);
  r.overall = score;
  return r;
}

JudgeScore judge(std::string id, std::array<double, 8> values) {
  JudgeScore s;
  s.judge_id = std::move(id);
  s.vector.values = values;
  s.attempts = 1;
  return s;
}

}  // namespace rolesim::testing
