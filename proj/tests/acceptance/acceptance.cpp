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


// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "rolesim/commands.hpp"
#include "rolesim/datagen.hpp"
#include "rolesim/environment.hpp"
#include "rolesim/error.hpp"
#include "rolesim/evaluation.hpp"
#include "rolesim/memory.hpp"
#include "rolesim/rng.hpp"
#include "rolesim/run_config.hpp"
#include "rolesim/scripted_corpus.hpp"
#include "rolesim/simulation.hpp"
#include "rolesim/text.hpp"
#include "support.hpp"

using namespace rolesim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Records the first few mismatches; pass flips on the first one.
class Tally {
 public:
  void check(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    ++failures_;
    if (notes_.size() < 3) notes_.push_back(what);
  }
  long checks() const { return checks_; }
  Outcome done(std::string summary) const {
    Outcome o;
    o.pass = failures_ == 0;
    o.detail = std::move(summary);
    if (!o.pass) {
      o.detail += fmt::format("; {} of {} checks failed", failures_, checks_);
      for (const auto& n : notes_) o.detail += "; " + n;
    }
    return o;
  }

 private:
  long checks_ = 0;
  long failures_ = 0;
  std::vector<std::string> notes_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<int> random_scores(SeededRng& rng, std::size_t n) {
  std::vector<int> v(n);
  for (auto& x : v) x = static_cast<int>(rng.below(5)) + 1;
  return v;
}

// ---------------------------------------------------------------------------

Outcome mean_exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  SeededRng rng(101);
  Tally tally;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t k = 1 + rng.below(7);
    std::vector<JudgeScore> scores;
    std::array<long, 8> sums{};
    for (std::size_t j = 0; j < k; ++j) {
      const auto v = random_scores(rng, 8);
      std::array<double, 8> a{};
      for (std::size_t m = 0; m < 8; ++m) {
        a[m] = v[m];
        sums[m] += v[m];
      }
      scores.push_back(testing::judge("j" + std::to_string(j), a));
    }
    const MetricVector got = aggregate_mean(scores);
    for (std::size_t m = 0; m < 8; ++m) {
      const double want = static_cast<double>(sums[m]) / static_cast<double>(k);
      tally.check(got.values[m] == want, fmt::format("trial {} metric {}", trial, m));
    }
    // Every rotation and one random shuffle give the same vector.
    auto perm = scores;
    for (std::size_t r = 0; r < k; ++r) {
      std::rotate(perm.begin(), perm.begin() + 1, perm.end());
      tally.check(aggregate_mean(perm) == got, fmt::format("trial {} rotation {}", trial, r));
    }
    for (std::size_t i = k; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    tally.check(aggregate_mean(perm) == got, fmt::format("trial {} shuffle", trial));
  }
  const double secs = seconds_since(t0);
  tally.check(secs < 5.0, fmt::format("runtime {:.2f}s", secs));
  return tally.done(fmt::format("10000 tuples, {} checks, {:.2f}s", tally.checks(), secs));
}

// Scores are carried in half units so boundary tuples stay integral:
// variance > t  <=>  3*sum(X^2) - (sum X)^2 > 36*t with X = 2x.
bool dispute_oracle(const std::array<int, 3>& halves, double t) {
  long s = 0, q = 0;
  for (int x : halves) {
    s += x;
    q += static_cast<long>(x) * x;
  }
  return static_cast<double>(3 * q - s * s) > 36.0 * t;
}

Outcome dispute_oracle_agreement() {
  SeededRng rng(202);
  const std::array<double, 3> thresholds{0.5, 1.0, 2.0};
  std::vector<std::array<int, 3>> tuples;
  for (int i = 0; i < 1000; ++i) {
    tuples.push_back({2 * static_cast<int>(1 + rng.below(5)), 2 * static_cast<int>(1 + rng.below(5)),
                      2 * static_cast<int>(1 + rng.below(5))});
  }
  // Variance exactly 0.5: (1, 1, 2.5) and (2.5, 4, 4). Exactly 2: (1, 1, 4), (2, 5, 5).
  // No tuple of dyadic scores has variance exactly 1; (2, 2, 4) and (1, 2, 4) straddle it.
  const std::vector<std::array<int, 3>> boundary{{2, 2, 5}, {5, 8, 8}, {2, 2, 8}, {4, 10, 10},
                                                 {4, 4, 8}, {2, 4, 8}, {2, 5, 2}, {8, 2, 2}};
  tuples.insert(tuples.end(), boundary.begin(), boundary.end());
  Tally tally;
  long disputed = 0;
  long exact_boundary = 0;
  for (const auto& t : tuples) {
    std::array<std::array<double, 8>, 3> vals{};
    for (std::size_t j = 0; j < 3; ++j) {
      for (std::size_t m = 0; m < 8; ++m) vals[j][m] = t[j] / 2.0;
    }
    // Each metric gets a different judge order.
    std::vector<JudgeScore> scores;
    for (std::size_t j = 0; j < 3; ++j) scores.push_back(testing::judge("j" + std::to_string(j), vals[j]));
    for (std::size_t m = 1; m < 8; ++m) {
      for (std::size_t j = 0; j < 3; ++j) scores[j].vector.values[m] = t[(j + m) % 3] / 2.0;
    }
    for (double th : thresholds) {
      const bool want = dispute_oracle(t, th);
      const auto got = detect_disagreement(scores, th);
      tally.check(got.size() == (want ? 8u : 0u),
                  fmt::format("({}, {}, {}) at {}", t[0] / 2.0, t[1] / 2.0, t[2] / 2.0, th));
      disputed += want ? 1 : 0;
      long s = t[0] + t[1] + t[2];
      long q = static_cast<long>(t[0]) * t[0] + static_cast<long>(t[1]) * t[1] +
               static_cast<long>(t[2]) * t[2];
      if (static_cast<double>(3 * q - s * s) == 36.0 * th) ++exact_boundary;
    }
  }
  tally.check(exact_boundary >= 4, "boundary tuples missing");
  return tally.done(fmt::format("{} tuples x 3 thresholds, {} disputed, {} at exact boundary",
                                tuples.size(), disputed, exact_boundary));
}

Outcome arbitration_contract() {
  const auto bank = testing::demo_bank();
  const std::vector<Persona> personas(bank.personas().begin(), bank.personas().begin() + 4);
  corpus::Options copts;
  copts.inject_transient = false;
  const auto base = testing::run_corpus(personas, copts, true);

  SeededRng rng(303);
  Tally tally;
  long disputes = 0;
  for (int i = 0; i < 100; ++i) {
    Trajectory t = base[static_cast<std::size_t>(i) % base.size()];
    t.id = "fixture-" + std::to_string(i);
    const std::string scope = slugify(t.id);
    const std::size_t n = 2 + rng.below(3);
    std::vector<std::vector<int>> s(n);
    for (auto& v : s) v = random_scores(rng, 8);

    json script = json::object();
    EvaluationConfig config;
    config.referee = testing::replay_binding("referee");
    config.threshold = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      const std::string id = "judge-" + std::to_string(j);
      config.judges.push_back(testing::replay_binding(id));
      json doc = json::object();
      for (Metric m : kMetrics) doc[std::string(to_string(m))] = s[j][static_cast<std::size_t>(m)];
      script[scope + ":judge." + id + ".score"] = {doc.dump()};
      script[scope + ":judge." + id + ".critic"] = json::array();
    }
    script[scope + ":arbiter.arbitrate"] = json::array();

    // Oracle: n*sum(x^2) - S^2 > n^2 * t, critics are the judges at the extremes.
    std::map<std::size_t, int> referee;
    std::array<long, 8> sums{};
    const std::string& content = t.rounds[rng.below(t.rounds.size())].action.content;
    for (std::size_t m = 0; m < 8; ++m) {
      long sum = 0, sq = 0;
      int lo = 6, hi = 0;
      for (std::size_t j = 0; j < n; ++j) {
        sum += s[j][m];
        sq += s[j][m] * s[j][m];
        lo = std::min(lo, s[j][m]);
        hi = std::max(hi, s[j][m]);
      }
      sums[m] = sum;
      const long nn = static_cast<long>(n);
      if (nn * sq - sum * sum <= nn * nn) continue;
      ++disputes;
      const int ref = 1 + static_cast<int>(rng.below(5));
      referee[m] = ref;
      for (std::size_t j = 0; j < n; ++j) {
        if (s[j][m] != lo && s[j][m] != hi) continue;
        const std::size_t off = rng.below(content.size() / 2);
        const std::string quote = content.substr(off, 8 + rng.below(content.size() - off - 7));
        script[scope + ":judge.judge-" + std::to_string(j) + ".critic"].push_back(
            json{{"justification", fmt::format("Rated {} on this metric.", s[j][m])},
                 {"evidence", {quote}}}.dump());
      }
      script[scope + ":arbiter.arbitrate"].push_back(
          json{{"score", ref}, {"rationale", "weighed both critics"}}.dump());
    }

    auto gw = testing::scripted_gateway(testing::script_from(script));
    const EvaluationReport r = evaluate_trajectory(t, config, *gw);
    double fsum = 0.0;
    for (std::size_t m = 0; m < 8; ++m) {
      const double mean = static_cast<double>(sums[m]) / static_cast<double>(n);
      const double want = referee.count(m) ? referee[m] : mean;
      tally.check(r.mean.values[m] == mean, fmt::format("fixture {} mean {}", i, m));
      tally.check(r.final_scores.values[m] == want, fmt::format("fixture {} final {}", i, m));
      fsum += want;
    }
    tally.check(r.arbitrations.size() == referee.size(), fmt::format("fixture {} arbitrations", i));
    tally.check(r.overall == fsum / 8.0, fmt::format("fixture {} overall", i));
  }
  return tally.done(fmt::format("100 fixtures, {} disputed metrics arbitrated", disputes));
}

std::optional<StopReason> rule_oracle(int covered, int stall, int round, const TurnControlConfig& c) {
  std::optional<StopReason> r;
  if (round >= c.max_turns) r = StopReason::kMaxTurns;
  if (!c.early_stop_enabled) return r;
  if (covered >= 1 && stall >= c.stall_rounds) r = StopReason::kStalled;
  if (covered >= c.dim_quorum) r = StopReason::kQuorumCovered;
  if (covered == 5) r = StopReason::kAllCovered;
  return r;
}

Scene stream_scene() {
  Scene s;
  s.scene_id = "scene__stream";
  s.persona_id = "p-test";
  s.event_description = "A street market.";
  s.time = "morning";
  s.place = "the square";
  s.npcs = {NpcSketch{"sam", "Sam", "A vendor.", "Sell."}, NpcSketch{"lee", "Lee", "A buyer.", "Buy."}};
  return s;
}

Outcome turn_control_table() {
  Tally tally;
  long cells = 0;
  for (int quorum : {3, 4, 5}) {
    for (int stall_rounds : {1, 2, 3}) {
      for (bool early : {true, false}) {
        TurnControlConfig c;
        c.dim_quorum = quorum;
        c.stall_rounds = stall_rounds;
        c.early_stop_enabled = early;
        for (int covered = 0; covered <= 5; ++covered) {
          for (int stall = 0; stall <= 3; ++stall) {
            for (int round = 1; round <= 10; ++round) {
              ++cells;
              tally.check(decide_turn(covered, stall, round, c) == rule_oracle(covered, stall, round, c),
                          fmt::format("q{} s{} e{} ({}, {}, {})", quorum, stall_rounds, early, covered,
                                      stall, round));
            }
          }
        }
      }
    }
  }

  static const std::vector<std::string> kWords{"garden", "letter", "river", "train", "market",
                                               "bread",  "winter", "music", "window", "lamp"};
  SeededRng rng(404);
  long gained_total = 0;
  for (int stream = 0; stream < 1000; ++stream) {
    const int rounds = 1 + static_cast<int>(rng.below(10));
    std::vector<std::vector<ActionEvent>> events(static_cast<std::size_t>(rounds) + 1);
    std::vector<std::map<Dimension, std::pair<std::string, bool>>> claims(events.size());
    json script = json::object();
    for (int r = 1; r <= rounds; ++r) {
      ActionEvent a;
      a.round = r;
      a.actor = rng.below(4) == 0 ? "lee" : kProtagonistId;
      for (int w = 0; w < 6; ++w) a.content += (w ? " " : "") + kWords[rng.below(kWords.size())];
      ActionEvent b;
      b.round = r;
      b.actor = "sam";
      b.content = "Sam shrugs.";
      events[r] = {a, b};
      if (a.actor != kProtagonistId) continue;
      json dims = json::object();
      for (Dimension d : kDimensions) {
        if (rng.below(3) != 0) {
          dims[std::string(to_string(d))] = {{"new_evidence", false}};
          continue;
        }
        const bool real = rng.below(2) == 0;
        const std::size_t off = rng.below(a.content.size() - 4);
        const std::string quote = real ? a.content.substr(off, 4 + rng.below(a.content.size() - off - 3))
                                       : "zebra " + std::to_string(stream);
        claims[r][d] = {quote, real};
        dims[std::string(to_string(d))] = {{"new_evidence", true}, {"quote", quote}};
      }
      script["s:env.turn_control.r" + std::to_string(r)] = {json{{"dimensions", dims}}.dump()};
    }
    auto gw = testing::scripted_gateway(testing::script_from(script));
    TurnControlConfig config;
    config.early_stop_enabled = rng.below(2) == 0;
    EnvironmentController env(stream_scene(), testing::sample_persona(), *gw,
                              testing::replay_binding("env"), "s", config);
    CheckpointCoverage cov;
    for (int r = 1; r <= rounds; ++r) {
      const auto d = env.check_turn_control(cov, events[r], r);
      const CheckpointCoverage& after = d.coverage_after;
      bool gained = false;
      for (Dimension dim : kDimensions) {
        const auto& before_ev = cov.evidence(dim);
        const auto& after_ev = after.evidence(dim);
        std::vector<Evidence> want = before_ev;
        if (auto it = claims[r].find(dim); it != claims[r].end() && it->second.second) {
          want.push_back(Evidence{r, trim(it->second.first)});
          gained = true;
        }
        tally.check(after_ev == want, fmt::format("stream {} round {} evidence", stream, r));
        tally.check(!cov.covered(dim, 1) || after.covered(dim, 1),
                    fmt::format("stream {} round {} coverage lost", stream, r));
      }
      gained_total += gained ? 1 : 0;
      tally.check(after.stall() == (gained ? 0 : cov.stall() + 1),
                  fmt::format("stream {} round {} stall", stream, r));
      tally.check(after.covered_count(1) >= cov.covered_count(1),
                  fmt::format("stream {} round {} count", stream, r));
      const auto want = rule_oracle(after.covered_count(1), after.stall(), r, config);
      tally.check(d.reason == want && d.stop == want.has_value(),
                  fmt::format("stream {} round {} decision", stream, r));
      cov = after;
    }
  }
  return tally.done(fmt::format("{} table cells over 18 configs, 1000 streams ({} rounds with new evidence)",
                                cells, gained_total));
}

long total_rounds(const std::vector<Trajectory>& ts) {
  long n = 0;
  for (const auto& t : ts) n += static_cast<long>(t.rounds.size());
  return n;
}

Outcome early_stop_efficiency() {
  testing::ScratchDir with("early"), without("full");
  RunConfig a = load_run_config(testing::demo_dir() / "demo.conf");
  a.out_dir = with.path();
  RunConfig b = a;
  b.out_dir = without.path();
  RunOverrides o;
  o.no_early_stop = true;
  apply(b, o);
  Tally tally;
  for (const RunConfig* c : {&a, &b}) {
    tally.check(cmd_simulate(*c).exit_code == 0, "simulate failed");
    tally.check(cmd_evaluate(*c).exit_code == 0, "evaluate failed");
  }
  const auto ta = read_trajectories(a.out_dir / "trajectories.jsonl");
  const auto tb = read_trajectories(b.out_dir / "trajectories.jsonl");
  tally.check(ta.size() == 20 && tb.size() == 20, "expected 20 episodes per run");
  const long ra = total_rounds(ta), rb = total_rounds(tb);
  const double reduction = rb > 0 ? 1.0 - static_cast<double>(ra) / static_cast<double>(rb) : 0.0;
  tally.check(reduction >= 0.30, fmt::format("reduction {:.3f}", reduction));
  std::map<std::string, MetricVector> finals;
  for (const auto& r : read_reports(a.out_dir / "reports")) finals[r.trajectory_id] = r.final_scores;
  const auto rep_b = read_reports(b.out_dir / "reports");
  tally.check(rep_b.size() == finals.size() && !finals.empty(), "report counts differ");
  for (const auto& r : rep_b) {
    tally.check(finals.count(r.trajectory_id) && finals[r.trajectory_id] == r.final_scores,
                "finals differ for " + r.trajectory_id);
  }
  return tally.done(fmt::format("{} rounds with early stop vs {} without, reduction {:.1f}%", ra, rb,
                                100.0 * reduction));
}

Outcome end_to_end_determinism() {
  const auto t0 = std::chrono::steady_clock::now();
  testing::ScratchDir one("run1"), two("run2");
  Tally tally;
  for (const fs::path& dir : {one.path(), two.path()}) {
    RunConfig c = load_run_config(testing::demo_dir() / "demo.conf");
    c.out_dir = dir;
    tally.check(cmd_simulate(c).exit_code == 0, "simulate failed");
    tally.check(cmd_evaluate(c).exit_code == 0, "evaluate failed");
    tally.check(cmd_export_sft(c).exit_code == 0, "export-sft failed");
    tally.check(cmd_export_dpo(c).exit_code == 0, "export-dpo failed");
  }
  std::vector<fs::path> files{"trajectories.jsonl", "scenes.jsonl", "summary.txt", "summary.json",
                              "sft.jsonl", "dpo.jsonl"};
  std::vector<fs::path> reports;
  for (const auto& e : fs::directory_iterator(one.path() / "reports")) {
    reports.push_back(fs::path("reports") / e.path().filename());
  }
  std::size_t two_reports = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(two.path() / "reports")) ++two_reports;
  tally.check(reports.size() == two_reports && reports.size() == 20, "report file counts differ");
  files.insert(files.end(), reports.begin(), reports.end());
  std::uintmax_t bytes = 0;
  for (const auto& f : files) {
    const bool ok = fs::exists(one.path() / f) && fs::exists(two.path() / f);
    tally.check(ok, "missing " + f.generic_string());
    if (!ok) continue;
    const std::string x = read_file(one.path() / f);
    tally.check(!x.empty(), "empty " + f.generic_string());
    tally.check(x == read_file(two.path() / f), "differs: " + f.generic_string());
    bytes += x.size();
  }
  const double secs = seconds_since(t0);
  tally.check(secs < 60.0, fmt::format("runtime {:.1f}s", secs));
  return tally.done(fmt::format("{} files ({} bytes) identical across two runs, {:.2f}s", files.size(),
                                bytes, secs));
}

Outcome datagen_counting() {
  SeededRng rng(707);
  Tally tally;
  long instances = 0, pairs = 0, no_pairs = 0;
  for (int pool_i = 0; pool_i < 50; ++pool_i) {
    const std::size_t n_personas = 1 + rng.below(4);
    const std::size_t n_models = pool_i % 5 == 0 ? 1 : 2 + rng.below(2);
    std::vector<Trajectory> ts;
    std::vector<EvaluationReport> reports;
    for (std::size_t p = 0; p < n_personas; ++p) {
      const Persona persona = testing::sample_persona("p" + std::to_string(p), "Ada Park");
      for (std::size_t m = 0; m < n_models; ++m) {
        const std::string model = "m" + std::to_string(m);
        const int rounds = 1 + static_cast<int>(rng.below(8));
        ts.push_back(testing::synthetic_trajectory(model + "__p" + std::to_string(p), persona, model,
                                                   rounds, rng));
        reports.push_back(testing::flat_report(ts.back(), 1.0 + 0.25 * static_cast<double>(rng.below(17))));
      }
    }
    const std::size_t k = rng.below(ts.size() + 1);
    // Oracle ranking: overall descending, id ascending.
    std::vector<std::size_t> order(ts.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      if (reports[x].overall != reports[y].overall) return reports[x].overall > reports[y].overall;
      return ts[x].id < ts[y].id;
    });
    std::size_t want = 0;
    for (std::size_t i = 0; i < k; ++i) {
      for (const auto& r : ts[order[i]].rounds) {
        want += r.action.actor == kProtagonistId ? 1 : 0;
        want += r.reaction.actor == kProtagonistId ? 1 : 0;
      }
    }
    const auto pool = build_pool(ts, reports);
    const auto sft = export_sft(pool, k);
    tally.check(sft.size() == want, fmt::format("pool {} sft {} vs {}", pool_i, sft.size(), want));
    instances += static_cast<long>(sft.size());
    try {
      const auto res = build_dpo_pairs(pool, 1 + rng.below(20));
      tally.check(n_models >= 2, fmt::format("pool {} single model yielded pairs", pool_i));
      for (const auto& pr : res.pairs) {
        tally.check(pr.chosen_score > pr.rejected_score, fmt::format("pool {} pair order", pool_i));
      }
      pairs += static_cast<long>(res.pairs.size());
    } catch (const Error& e) {
      tally.check(n_models == 1 && e.code() == ErrorCode::kNoPairs,
                  fmt::format("pool {}: {}", pool_i, e.what()));
      no_pairs += 1;
    }
  }
  return tally.done(fmt::format("50 pools, {} SFT instances, {} DPO steps, {} single-model pools gave NoPairs",
                                instances, pairs, no_pairs));
}

Outcome pearson_oracle() {
  SeededRng rng(808);
  Tally tally;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> x(8), y(8), neg(8);
    for (std::size_t k = 0; k < 8; ++k) {
      x[k] = 1.0 + 4.0 * rng.unit();
      y[k] = i % 2 ? 1.0 + static_cast<double>(rng.below(5)) : 10.0 * rng.symmetric();
      neg[k] = -x[k];
    }
    if (*std::max_element(y.begin(), y.end()) == *std::min_element(y.begin(), y.end())) y[0] += 1.0;
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < 8; ++k) {
      mx += x[k] / 8.0;
      my += y[k] / 8.0;
    }
    double cov = 0, vx = 0, vy = 0;
    for (std::size_t k = 0; k < 8; ++k) {
      cov += (x[k] - mx) * (y[k] - my) / 8.0;
      vx += (x[k] - mx) * (x[k] - mx) / 8.0;
      vy += (y[k] - my) * (y[k] - my) / 8.0;
    }
    const double want = cov / (std::sqrt(vx) * std::sqrt(vy));
    const double got = pearson(x, y);
    worst = std::max(worst, std::abs(got - want));
    tally.check(std::abs(got - want) <= 1e-9, fmt::format("pair {} off by {:g}", i, got - want));
    tally.check(pearson(x, x) == 1.0, fmt::format("pair {} self", i));
    tally.check(pearson(x, neg) == -1.0, fmt::format("pair {} negated", i));
  }
  return tally.done(fmt::format("1000 pairs, max deviation {:.2e}", worst));
}

Outcome retrieval_oracle() {
  SeededRng rng(909);
  Tally tally;
  long ties = 0;
  for (int s = 0; s < 500; ++s) {
    const std::size_t dim = 2 + rng.below(4);
    const std::size_t n = rng.below(201);
    auto vec = [&] {
      std::vector<double> v(dim);
      do {
        for (auto& x : v) x = static_cast<double>(rng.below(5)) - 2.0;
      } while (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }));
      return v;
    };
    MemoryStore store;
    for (std::size_t i = 0; i < n; ++i) {
      store.append(MemoryRecord{1 + static_cast<int>(rng.below(6)), "protagonist",
                                "record " + std::to_string(i), vec()});
    }
    const auto q = vec();
    const std::size_t k = rng.below(12);
    // Integer components make dot products and norms exact.
    struct Row {
      double sim;
      int round;
      std::size_t idx;
    };
    std::vector<Row> rows;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& e = store.records()[i].embedding;
      double dot = 0, na = 0, nb = 0;
      for (std::size_t d = 0; d < dim; ++d) {
        dot += q[d] * e[d];
        na += q[d] * q[d];
        nb += e[d] * e[d];
      }
      rows.push_back(Row{dot / std::sqrt(na * nb), store.records()[i].round, i});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      if (a.sim != b.sim) return a.sim > b.sim;
      return a.round < b.round;
    });
    for (std::size_t i = 1; i < rows.size(); ++i) ties += rows[i].sim == rows[i - 1].sim ? 1 : 0;
    const auto got = retrieve(store, q, k);
    const std::size_t take = std::min(k, n);
    tally.check(got.size() == take, fmt::format("store {} size", s));
    for (std::size_t i = 0; i < std::min(take, got.size()); ++i) {
      tally.check(got[i] == store.records()[rows[i].idx], fmt::format("store {} rank {}", s, i));
    }
  }
  return tally.done(fmt::format("500 stores, {} tied neighbours exercised the tie-break", ties));
}

Outcome structural_invariants() {
  const auto bank = testing::demo_bank();
  Tally tally;
  long trajectories = 0, rounds = 0;
  for (int quorum : {4, 5}) {
    for (bool early : {true, false}) {
      corpus::Options o;
      o.quorum_round = quorum;
      const auto ts = testing::run_corpus(bank.personas(), o, early);
      for (const auto& t : ts) {
        const auto v = check_trajectory_invariants(t, o.max_turns);
        tally.check(v.empty(), t.id + ": " + (v.empty() ? "" : v.front()));
        ++trajectories;
        rounds += static_cast<long>(t.rounds.size());
      }
    }
  }
  return tally.done(fmt::format("{} trajectories, {} rounds, zero violations", trajectories, rounds));
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::off);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"mean aggregation exactness", mean_exactness},
      {"dispute detection oracle", dispute_oracle_agreement},
      {"arbitration contract", arbitration_contract},
      {"turn-control decision table", turn_control_table},
      {"early-stop efficiency", early_stop_efficiency},
      {"end-to-end determinism", end_to_end_determinism},
      {"datagen counting", datagen_counting},
      {"pearson oracle", pearson_oracle},
      {"memory retrieval oracle", retrieval_oracle},
      {"structural invariants", structural_invariants},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", index, name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", index - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
