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

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rolesim/gateway.hpp"
#include "rolesim/simulation.hpp"

namespace rolesim {

enum class Metric { kKA, kBA, kEE, kPT, kIM, kBC, kAD, kIR };

inline constexpr std::array<Metric, 8> kMetrics = {Metric::kKA, Metric::kBA, Metric::kEE,
                                                   Metric::kPT, Metric::kIM, Metric::kBC,
                                                   Metric::kAD, Metric::kIR};

inline constexpr int kMinScore = 1;
inline constexpr int kMaxScore = 5;

std::string_view to_string(Metric m);  // "KA"
std::optional<Metric> metric_from_string(std::string_view s);
std::string_view metric_name(Metric m);  // "Knowledge Accuracy"
std::string_view metric_definition(Metric m);
std::string render_rubric();

/// One value per metric, indexed by Metric.
struct MetricVector {
  std::array<double, 8> values{};

  double& operator[](Metric m) { return values[static_cast<std::size_t>(m)]; }
  double operator[](Metric m) const { return values[static_cast<std::size_t>(m)]; }
  bool operator==(const MetricVector&) const = default;
};

json to_json(const MetricVector& v);
MetricVector metric_vector_from_json(const json& j);

struct JudgeScore {
  std::string judge_id;
  MetricVector vector;
  std::string raw_output;
  int attempts = 1;

  bool operator==(const JudgeScore&) const = default;
};

struct CriticStatement {
  std::string judge_id;
  Metric metric = Metric::kKA;
  int score = 0;
  std::string justification;
  std::vector<std::string> evidence;

  bool operator==(const CriticStatement&) const = default;
};

struct Arbitration {
  Metric metric = Metric::kKA;
  std::string referee_id;
  int score = 0;
  std::string rationale;
  std::vector<CriticStatement> critics;

  bool operator==(const Arbitration&) const = default;
};

struct EvaluationReport {
  std::string trajectory_id;
  std::string persona_id;
  std::string model_id;
  int repeat = 0;
  double threshold = 1.0;
  std::vector<JudgeScore> judge_scores;
  MetricVector mean;
  std::vector<Metric> disputed;
  std::vector<Arbitration> arbitrations;
  MetricVector final_scores;
  double overall = 0.0;
  std::vector<std::string> warnings;

  bool operator==(const EvaluationReport&) const = default;
};

json to_json(const CriticStatement& c);
json to_json(const EvaluationReport& r);
EvaluationReport report_from_json(const json& j);

/// The trajectory as judges see it: one block per round, "Name: content".
std::string render_transcript(const Trajectory& t);
std::string render_scene(const Trajectory& t);

/// True when `excerpt` is non-blank and occurs in some event content.
bool excerpt_in_trajectory(const Trajectory& t, std::string_view excerpt);

/// Parses a judge's output. Throws UnparseableScore when a metric is missing
/// or not an integer and ScoreOutOfRange(metric) outside [1, 5].
MetricVector parse_judge_output(std::string_view text);

/// Scores a complete trajectory on all eight metrics, re-prompting once on
/// an unparseable or out-of-range reply.
///
/// Errors: InvalidArgument for an aborted trajectory; ScoreOutOfRange;
/// UnparseableScore; gateway errors propagate.
JudgeScore judge_score(const Trajectory& t, const ModelBinding& judge, Gateway& gateway);

/// Per-metric arithmetic mean in judge order. Throws NoScores when empty.
MetricVector aggregate_mean(std::span<const JudgeScore> scores);

/// Sum of squared deviations over K. Throws InvalidArgument when empty.
double population_variance(std::span<const double> xs);

/// Metrics whose population variance across judges is strictly above
/// `threshold`. Requires at least two judges and threshold > 0.
std::vector<Metric> detect_disagreement(std::span<const JudgeScore> scores, double threshold);

/// Judges holding the lowest or highest score on `metric`.
std::vector<std::size_t> disagreeing_judges(std::span<const JudgeScore> scores, Metric metric);

struct CriticRequest {
  ModelBinding judge;
  int score = 0;
};

/// One statement per disagreeing judge. Excerpts not found in the trajectory
/// are dropped with a warning; a statement left with no excerpt, or with no
/// justification after one re-prompt, is rejected.
std::vector<CriticStatement> collect_critics(const Trajectory& t, Metric metric,
                                             const std::vector<CriticRequest>& judges,
                                             Gateway& gateway,
                                             std::vector<std::string>& warnings);

/// The referee's reconciled score from the critic statements alone.
///
/// Errors: InvalidArgument with fewer than two valid critics;
/// ScoreOutOfRange or UnparseableArbitration after one retry.
Arbitration arbitrate(Metric metric, const std::vector<CriticStatement>& critics,
                      const ModelBinding& referee, Gateway& gateway, std::string_view tag_scope);

struct EvaluationConfig {
  std::vector<ModelBinding> judges;
  ModelBinding referee;
  double threshold = 1.0;
  bool concurrent_judges = true;
};

/// Throws ConfigError for an empty or duplicated roster, a missing referee or
/// a non-positive threshold.
void validate(const EvaluationConfig& config);

/// Full pipeline for one trajectory: judges, mean, disputes, critics and
/// arbitration. Final scores take the referee score on disputed metrics and
/// the mean elsewhere; overall is the mean of the finals.
///
/// Errors: InsufficientCritics when a dispute keeps fewer than two valid
/// statements; judge and referee errors propagate.
EvaluationReport evaluate_trajectory(const Trajectory& t, const EvaluationConfig& config,
                                     Gateway& gateway);

/// Final scores from the mean and the arbitrations.
MetricVector finalize_scores(const MetricVector& mean, const std::vector<Arbitration>& arbitrations);
double overall_score(const MetricVector& v);

/// Sample Pearson correlation.
/// Errors: LengthMismatch; InvalidArgument below two points; ConstantSequence.
double pearson(std::span<const double> xs, std::span<const double> ys);

struct SummaryCell {
  double mean = 0.0;
  double stddev = 0.0;
};

struct ModelSummary {
  std::string model_id;
  int repeats = 0;
  int trajectories = 0;
  int arbitrations = 0;
  std::array<SummaryCell, 8> metrics{};
  SummaryCell overall;
};

/// Per model: the mean of each repeat across personas, then mean and sample
/// standard deviation across repeats (0 with a single repeat).
std::vector<ModelSummary> summarize_reports(const std::vector<EvaluationReport>& reports);
std::string render_summary(const std::vector<ModelSummary>& summary);
json to_json(const std::vector<ModelSummary>& summary);

}  // namespace rolesim
