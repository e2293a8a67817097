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

#include "rolesim/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "rolesim/prompts.hpp"
#include "rolesim/text.hpp"

namespace rolesim {

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::kKA: return "KA";
    case Metric::kBA: return "BA";
    case Metric::kEE: return "EE";
    case Metric::kPT: return "PT";
    case Metric::kIM: return "IM";
    case Metric::kBC: return "BC";
    case Metric::kAD: return "AD";
    case Metric::kIR: return "IR";
  }
  return "KA";
}

std::optional<Metric> metric_from_string(std::string_view s) {
  for (Metric m : kMetrics) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::kKA: return "Knowledge Accuracy";
    case Metric::kBA: return "Behavioral Accuracy";
    case Metric::kEE: return "Emotional Expression";
    case Metric::kPT: return "Personality Traits";
    case Metric::kIM: return "Immersion";
    case Metric::kBC: return "Behavioral Coherence";
    case Metric::kAD: return "Adaptability";
    case Metric::kIR: return "Interaction Richness";
  }
  return "";
}

std::string_view metric_definition(Metric m) {
  switch (m) {
    case Metric::kKA:
      return "Measures factual correctness consistent with the character's background.";
    case Metric::kBA:
      return "Assesses the alignment between the model's actions and the predefined personality "
             "traits.";
    case Metric::kEE:
      return "Evaluates the vividness and appropriateness of affective communication.";
    case Metric::kPT:
      return "Measures the model's ability to maintain stable personality features across "
             "interactions.";
    case Metric::kIM:
      return "Quantifies the model's ability to remain in character, maintaining narrative "
             "consistency.";
    case Metric::kBC:
      return "Measures causal and contextual alignment between past and ongoing actions.";
    case Metric::kAD:
      return "Evaluates how flexibly the model adjusts to evolving contexts while preserving "
             "persona consistency.";
    case Metric::kIR:
      return "Measures the breadth and depth of its social responses, reflecting creative and "
             "varied role-play performance.";
  }
  return "";
}

std::string render_rubric() {
  std::string out;
  for (Metric m : kMetrics) {
    if (!out.empty()) out += '\n';
    out += "- " + std::string(to_string(m)) + " (" + std::string(metric_name(m)) + "): " +
           std::string(metric_definition(m));
  }
  return out;
}

json to_json(const MetricVector& v) {
  json j = json::object();
  for (Metric m : kMetrics) j[std::string(to_string(m))] = v[m];
  return j;
}

MetricVector metric_vector_from_json(const json& j) {
  MetricVector v;
  for (Metric m : kMetrics) v[m] = j.at(std::string(to_string(m))).get<double>();
  return v;
}

std::string render_transcript(const Trajectory& t) {
  auto name = [&](const std::string& id) { return character_name(t.scene, t.persona, id); };
  std::string out;
  for (const auto& r : t.rounds) {
    if (!out.empty()) out += "\n\n";
    out += "Round " + std::to_string(r.index) + "\n" + name(r.action.actor) + ": " +
           r.action.content + "\n" + name(r.reaction.actor) + ": " + r.reaction.content;
  }
  return out;
}

std::string render_scene(const Trajectory& t) {
  const Scene& s = t.scene;
  std::string out = s.event_description + "\nTime: " + s.time + "\nPlace: " + s.place;
  out += "\nProtagonist: " + t.persona.name;
  for (const auto& n : s.npcs) out += "\nSupporting character: " + n.name + ". " + n.sketch;
  return out;
}

bool excerpt_in_trajectory(const Trajectory& t, std::string_view excerpt) {
  if (is_blank(excerpt)) return false;
  for (const auto& r : t.rounds) {
    if (contains(r.action.content, excerpt) || contains(r.reaction.content, excerpt)) return true;
  }
  return false;
}

namespace {

std::optional<long> integer_value(const json& v) {
  if (v.is_number_integer()) return v.get<long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 1e9) return static_cast<long>(d);
  }
  return std::nullopt;
}

[[noreturn]] void out_of_range(std::string_view metric, long value) {
  fail_field(ErrorCode::kScoreOutOfRange, std::string(metric),
             "score " + std::to_string(value) + " for " + std::string(metric) +
                 " is outside [1, 5]");
}

std::string judge_tag(const Trajectory& t, const ModelBinding& judge, std::string_view op) {
  return scoped_tag(slugify(t.id), "judge." + slugify(judge.model_id) + "." + std::string(op));
}

}  // namespace

MetricVector parse_judge_output(std::string_view text) {
  auto doc = extract_json_object(text);
  if (!doc) fail(ErrorCode::kUnparseableScore, "judge output is not a JSON object");
  MetricVector v;
  for (Metric m : kMetrics) {
    const std::string key(to_string(m));
    auto it = doc->find(key);
    if (it == doc->end()) fail_field(ErrorCode::kUnparseableScore, key, "judge output lacks " + key);
    auto value = integer_value(*it);
    if (!value) fail_field(ErrorCode::kUnparseableScore, key, key + " is not an integer score");
    if (*value < kMinScore || *value > kMaxScore) out_of_range(key, *value);
    v[m] = static_cast<double>(*value);
  }
  return v;
}

JudgeScore judge_score(const Trajectory& t, const ModelBinding& judge, Gateway& gateway) {
  require(t.status == "complete" && !t.rounds.empty(),
          "trajectory " + t.id + " is not complete and cannot be scored");
  auto messages = prompts::render_messages("judge_score", {{"persona", persona_summary(t.persona)},
                                                           {"scene", render_scene(t)},
                                                           {"transcript", render_transcript(t)},
                                                           {"rubric", render_rubric()}});
  CompletionRequest request{judge.model_id, std::move(messages), judge.temperature,
                            judge.max_tokens, judge_tag(t, judge, "score")};
  for (int pass = 0;; ++pass) {
    const CompletionResult result = gateway.complete(judge.backend, request);
    try {
      JudgeScore s;
      s.judge_id = judge.model_id;
      s.vector = parse_judge_output(result.filtered_text);
      s.raw_output = result.text;
      s.attempts = pass + 1;
      return s;
    } catch (const Error& e) {
      if (pass >= 1) throw;
      spdlog::warn("{}: judge {} output rejected ({}), re-prompting", t.id, judge.model_id,
                   e.what());
    }
  }
}

MetricVector aggregate_mean(std::span<const JudgeScore> scores) {
  if (scores.empty()) fail(ErrorCode::kNoScores, "no judge scores to aggregate");
  MetricVector out;
  const double k = static_cast<double>(scores.size());
  for (Metric m : kMetrics) {
    double sum = 0.0;
    for (const auto& s : scores) sum += s.vector[m];
    out[m] = sum / k;
  }
  return out;
}

double population_variance(std::span<const double> xs) {
  require(!xs.empty(), "variance of an empty sequence");
  const double n = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return ss / n;
}

std::vector<Metric> detect_disagreement(std::span<const JudgeScore> scores, double threshold) {
  require(scores.size() >= 2, "disagreement needs at least two judges");
  require(threshold > 0.0, "dispute threshold must be positive");
  std::vector<Metric> out;
  std::vector<double> xs(scores.size());
  for (Metric m : kMetrics) {
    for (std::size_t i = 0; i < scores.size(); ++i) xs[i] = scores[i].vector[m];
    if (population_variance(xs) > threshold) out.push_back(m);
  }
  return out;
}

std::vector<std::size_t> disagreeing_judges(std::span<const JudgeScore> scores, Metric metric) {
  std::vector<std::size_t> out;
  if (scores.empty()) return out;
  double lo = scores[0].vector[metric];
  double hi = lo;
  for (const auto& s : scores) {
    lo = std::min(lo, s.vector[metric]);
    hi = std::max(hi, s.vector[metric]);
  }
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double v = scores[i].vector[metric];
    if (v == lo || v == hi) out.push_back(i);
  }
  return out;
}

std::vector<CriticStatement> collect_critics(const Trajectory& t, Metric metric,
                                             const std::vector<CriticRequest>& judges,
                                             Gateway& gateway,
                                             std::vector<std::string>& warnings) {
  const std::string key(to_string(metric));
  const std::string transcript = render_transcript(t);
  std::vector<CriticStatement> out;
  for (const auto& j : judges) {
    auto messages = prompts::render_messages(
        "critic_statement", {{"metric", key + " (" + std::string(metric_name(metric)) + ")"},
                             {"metric_definition", std::string(metric_definition(metric))},
                             {"score", std::to_string(j.score)},
                             {"transcript", transcript}});
    CompletionRequest request{j.judge.model_id, std::move(messages), j.judge.temperature,
                              j.judge.max_tokens, judge_tag(t, j.judge, "critic")};
    std::optional<json> doc;
    for (int pass = 0; pass < 2; ++pass) {
      const auto result = gateway.complete(j.judge.backend, request);
      doc = extract_json_object(result.filtered_text);
      if (doc && string_member(*doc, "justification")) break;
      doc.reset();
    }
    auto warn = [&](const std::string& msg) {
      spdlog::warn("{}: {}", t.id, msg);
      warnings.push_back(msg);
    };
    if (!doc) {
      warn(key + " critic from " + j.judge.model_id + " rejected: no justification");
      continue;
    }
    CriticStatement c;
    c.judge_id = j.judge.model_id;
    c.metric = metric;
    c.score = j.score;
    c.justification = trim(*string_member(*doc, "justification"));
    if (auto it = doc->find("evidence"); it != doc->end() && it->is_array()) {
      for (const auto& e : *it) {
        if (!e.is_string()) continue;
        const std::string excerpt = trim(e.get<std::string>());
        if (excerpt_in_trajectory(t, excerpt)) {
          c.evidence.push_back(excerpt);
        } else {
          // EvidenceNotFound is reported, not thrown.
          warn(std::string(to_string(ErrorCode::kEvidenceNotFound)) + ": " + j.judge.model_id +
               " cited an excerpt absent from the trajectory for " + key + ": \"" + excerpt + "\"");
        }
      }
    }
    if (c.evidence.empty()) {
      warn(key + " critic from " + j.judge.model_id + " rejected: no valid evidence");
      continue;
    }
    out.push_back(std::move(c));
  }
  return out;
}

Arbitration arbitrate(Metric metric, const std::vector<CriticStatement>& critics,
                      const ModelBinding& referee, Gateway& gateway, std::string_view tag_scope) {
  const std::string key(to_string(metric));
  require(critics.size() >= 2, "arbitration on " + key + " needs at least two critic statements");
  std::string rendered;
  for (std::size_t i = 0; i < critics.size(); ++i) {
    const CriticStatement& c = critics[i];
    require(c.metric == metric, "critic statement for another metric");
    require(!is_blank(c.justification) && !c.evidence.empty(),
            "critic statement from " + c.judge_id + " lacks justification or evidence");
    if (!rendered.empty()) rendered += "\n\n";
    rendered += "Critic " + std::to_string(i + 1) + " (rating " + std::to_string(c.score) +
                "):\n" + c.justification + "\nEvidence:";
    for (const auto& e : c.evidence) rendered += "\n- \"" + e + "\"";
  }
  auto messages = prompts::render_messages(
      "arbitration", {{"metric", key + " (" + std::string(metric_name(metric)) + ")"},
                      {"metric_definition", std::string(metric_definition(metric))},
                      {"critics", rendered}});
  CompletionRequest request{referee.model_id, std::move(messages), referee.temperature,
                            referee.max_tokens, scoped_tag(tag_scope, "arbiter.arbitrate")};
  for (int pass = 0;; ++pass) {
    const auto result = gateway.complete(referee.backend, request);
    try {
      auto doc = extract_json_object(result.filtered_text);
      auto score = doc && doc->contains("score") ? integer_value((*doc)["score"]) : std::nullopt;
      auto rationale = doc ? string_member(*doc, "rationale") : std::nullopt;
      if (!score || !rationale) {
        fail_field(ErrorCode::kUnparseableArbitration, key, "referee output unparseable for " + key);
      }
      const long value = score.value_or(0);
      if (value < kMinScore || value > kMaxScore) out_of_range(key, value);
      return Arbitration{metric, referee.model_id, static_cast<int>(value), *rationale, critics};
    } catch (const Error& e) {
      if (pass >= 1) throw;
      spdlog::warn("referee output for {} rejected ({}), retrying", key, e.what());
    }
  }
}

void validate(const EvaluationConfig& config) {
  if (config.judges.empty()) fail_field(ErrorCode::kConfigError, "judges", "judge roster is empty");
  std::set<std::string> ids;
  for (const auto& j : config.judges) {
    if (j.model_id.empty() || j.backend.empty()) {
      fail_field(ErrorCode::kConfigError, "judges", "judge without model or backend");
    }
    if (!ids.insert(slugify(j.model_id)).second) {
      fail_field(ErrorCode::kConfigError, "judges", "judge '" + j.model_id + "' listed twice");
    }
  }
  if (config.referee.model_id.empty() || config.referee.backend.empty()) {
    fail_field(ErrorCode::kConfigError, "arbiter", "no referee model");
  }
  if (!(config.threshold > 0.0)) {
    fail_field(ErrorCode::kConfigError, "threshold", "dispute threshold must be positive");
  }
}

MetricVector finalize_scores(const MetricVector& mean, const std::vector<Arbitration>& arbitrations) {
  MetricVector out = mean;
  for (const auto& a : arbitrations) out[a.metric] = a.score;
  return out;
}

double overall_score(const MetricVector& v) {
  double sum = 0.0;
  for (double x : v.values) sum += x;
  return sum / static_cast<double>(v.values.size());
}

EvaluationReport evaluate_trajectory(const Trajectory& t, const EvaluationConfig& config,
                                     Gateway& gateway) {
  validate(config);
  EvaluationReport report;
  report.trajectory_id = t.id;
  report.persona_id = t.persona.id;
  report.model_id = t.protagonist_model_id;
  report.repeat = t.repeat;
  report.threshold = config.threshold;

  if (config.concurrent_judges && config.judges.size() > 1) {
    std::vector<std::future<JudgeScore>> pending;
    for (const auto& j : config.judges) {
      pending.push_back(std::async(std::launch::async, [&t, &j, &gateway] {
        return judge_score(t, j, gateway);
      }));
    }
    // Drain every future before rethrowing so no task outlives the call.
    std::exception_ptr first;
    for (auto& f : pending) {
      try {
        report.judge_scores.push_back(f.get());
      } catch (...) {
        if (!first) first = std::current_exception();
      }
    }
    if (first) std::rethrow_exception(first);
  } else {
    for (const auto& j : config.judges) report.judge_scores.push_back(judge_score(t, j, gateway));
  }

  report.mean = aggregate_mean(report.judge_scores);
  if (report.judge_scores.size() >= 2) {
    report.disputed = detect_disagreement(report.judge_scores, config.threshold);
  }
  for (Metric m : report.disputed) {
    std::vector<CriticRequest> critics;
    for (std::size_t i : disagreeing_judges(report.judge_scores, m)) {
      critics.push_back(CriticRequest{config.judges[i],
                                      static_cast<int>(report.judge_scores[i].vector[m])});
    }
    auto statements = collect_critics(t, m, critics, gateway, report.warnings);
    if (statements.size() < 2) {
      fail_field(ErrorCode::kInsufficientCritics, std::string(to_string(m)),
                 t.id + ": dispute on " + std::string(to_string(m)) + " kept " +
                     std::to_string(statements.size()) + " valid critic statements");
    }
    report.arbitrations.push_back(arbitrate(m, statements, config.referee, gateway, slugify(t.id)));
  }
  report.final_scores = finalize_scores(report.mean, report.arbitrations);
  report.overall = overall_score(report.final_scores);
  return report;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    fail(ErrorCode::kLengthMismatch, "pearson inputs have lengths " + std::to_string(xs.size()) +
                                         " and " + std::to_string(ys.size()));
  }
  require(xs.size() >= 2, "pearson needs at least two points");
  const double n = static_cast<double>(xs.size());
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) fail(ErrorCode::kConstantSequence, "pearson input is constant");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

json to_json(const CriticStatement& c) {
  return json{{"judge_id", c.judge_id},
              {"metric", to_string(c.metric)},
              {"score", c.score},
              {"justification", c.justification},
              {"evidence", c.evidence}};
}

namespace {

CriticStatement critic_from_json(const json& j) {
  CriticStatement c;
  c.judge_id = j.at("judge_id").get<std::string>();
  auto m = metric_from_string(j.at("metric").get<std::string>());
  if (!m) fail(ErrorCode::kParseError, "unknown metric in critic statement");
  c.metric = *m;
  c.score = j.at("score").get<int>();
  c.justification = j.at("justification").get<std::string>();
  c.evidence = j.at("evidence").get<std::vector<std::string>>();
  return c;
}

Metric metric_at(const json& j) {
  auto m = metric_from_string(j.get<std::string>());
  if (!m) fail(ErrorCode::kParseError, "unknown metric '" + j.get<std::string>() + "'");
  return *m;
}

}  // namespace

json to_json(const EvaluationReport& r) {
  json judges = json::array();
  for (const auto& s : r.judge_scores) {
    judges.push_back({{"judge_id", s.judge_id},
                      {"scores", to_json(s.vector)},
                      {"raw_output", s.raw_output},
                      {"attempts", s.attempts}});
  }
  json disputed = json::array();
  for (Metric m : r.disputed) disputed.push_back(to_string(m));
  json arbitrations = json::array();
  for (const auto& a : r.arbitrations) {
    json critics = json::array();
    for (const auto& c : a.critics) critics.push_back(to_json(c));
    arbitrations.push_back({{"metric", to_string(a.metric)},
                            {"referee_id", a.referee_id},
                            {"score", a.score},
                            {"rationale", a.rationale},
                            {"critics", critics}});
  }
  return json{{"trajectory_id", r.trajectory_id},
              {"persona_id", r.persona_id},
              {"model_id", r.model_id},
              {"repeat", r.repeat},
              {"threshold", r.threshold},
              {"judge_scores", judges},
              {"mean", to_json(r.mean)},
              {"disputed", disputed},
              {"arbitrations", arbitrations},
              {"final", to_json(r.final_scores)},
              {"overall", r.overall},
              {"warnings", r.warnings}};
}

EvaluationReport report_from_json(const json& j) {
  EvaluationReport r;
  r.trajectory_id = j.at("trajectory_id").get<std::string>();
  r.persona_id = j.at("persona_id").get<std::string>();
  r.model_id = j.at("model_id").get<std::string>();
  r.repeat = j.at("repeat").get<int>();
  r.threshold = j.at("threshold").get<double>();
  for (const auto& s : j.at("judge_scores")) {
    r.judge_scores.push_back(JudgeScore{s.at("judge_id").get<std::string>(),
                                        metric_vector_from_json(s.at("scores")),
                                        s.at("raw_output").get<std::string>(),
                                        s.at("attempts").get<int>()});
  }
  r.mean = metric_vector_from_json(j.at("mean"));
  for (const auto& m : j.at("disputed")) r.disputed.push_back(metric_at(m));
  for (const auto& a : j.at("arbitrations")) {
    Arbitration arb;
    arb.metric = metric_at(a.at("metric"));
    arb.referee_id = a.at("referee_id").get<std::string>();
    arb.score = a.at("score").get<int>();
    arb.rationale = a.at("rationale").get<std::string>();
    for (const auto& c : a.at("critics")) arb.critics.push_back(critic_from_json(c));
    r.arbitrations.push_back(std::move(arb));
  }
  r.final_scores = metric_vector_from_json(j.at("final"));
  r.overall = j.at("overall").get<double>();
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  return r;
}

namespace {

SummaryCell mean_std(const std::vector<double>& xs) {
  SummaryCell c;
  if (xs.empty()) return c;
  double sum = 0.0;
  for (double x : xs) sum += x;
  c.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - c.mean) * (x - c.mean);
    c.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return c;
}

}  // namespace

std::vector<ModelSummary> summarize_reports(const std::vector<EvaluationReport>& reports) {
  // model -> repeat -> reports
  std::map<std::string, std::map<int, std::vector<const EvaluationReport*>>> grouped;
  for (const auto& r : reports) grouped[r.model_id][r.repeat].push_back(&r);
  std::vector<ModelSummary> out;
  for (const auto& [model, by_repeat] : grouped) {
    ModelSummary s;
    s.model_id = model;
    s.repeats = static_cast<int>(by_repeat.size());
    std::array<std::vector<double>, 8> per_metric;
    std::vector<double> overall;
    for (const auto& [repeat, group] : by_repeat) {
      MetricVector sum;
      double osum = 0.0;
      for (const EvaluationReport* r : group) {
        for (Metric m : kMetrics) sum[m] += r->final_scores[m];
        osum += r->overall;
        s.arbitrations += static_cast<int>(r->arbitrations.size());
        ++s.trajectories;
      }
      const double n = static_cast<double>(group.size());
      for (Metric m : kMetrics) per_metric[static_cast<std::size_t>(m)].push_back(sum[m] / n);
      overall.push_back(osum / n);
    }
    for (std::size_t i = 0; i < kMetrics.size(); ++i) s.metrics[i] = mean_std(per_metric[i]);
    s.overall = mean_std(overall);
    out.push_back(std::move(s));
  }
  return out;
}

std::string render_summary(const std::vector<ModelSummary>& summary) {
  std::string out = fmt::format("{:<28}", "Model");
  for (Metric m : kMetrics) out += fmt::format(" {:>11}", to_string(m));
  out += fmt::format(" {:>11}\n", "Overall");
  int arbitrations = 0;
  for (const auto& s : summary) {
    out += fmt::format("{:<28}", s.model_id);
    for (const auto& c : s.metrics) out += fmt::format(" {:>11}", fmt::format("{:.2f}±{:.2f}", c.mean, c.stddev));
    out += fmt::format(" {:>11}\n", fmt::format("{:.2f}±{:.2f}", s.overall.mean, s.overall.stddev));
    arbitrations += s.arbitrations;
  }
  out += fmt::format("\nValues are mean ± standard deviation across repeats.\n"
                     "Arbitrated metric scores: {}.\n",
                     arbitrations);
  return out;
}

json to_json(const std::vector<ModelSummary>& summary) {
  json out = json::array();
  for (const auto& s : summary) {
    json metrics = json::object();
    for (std::size_t i = 0; i < kMetrics.size(); ++i) {
      metrics[std::string(to_string(kMetrics[i]))] = {{"mean", s.metrics[i].mean},
                                                      {"std", s.metrics[i].stddev}};
    }
    out.push_back({{"model_id", s.model_id},
                   {"repeats", s.repeats},
                   {"trajectories", s.trajectories},
                   {"arbitrations", s.arbitrations},
                   {"metrics", metrics},
                   {"overall", {{"mean", s.overall.mean}, {"std", s.overall.stddev}}}});
  }
  return out;
}

}  // namespace rolesim
