#pragma once

// Execution / solution accuracy and leaderboard rendering.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "t2m/corpus.hpp"
#include "t2m/error.hpp"
#include "t2m/harness.hpp"

namespace t2m::evaluator {

T2M_DEFINE_ERROR(EmptySet);
T2M_DEFINE_ERROR(MissingExpected);

inline constexpr double kAbsTol = 1e-6;
inline constexpr double kRelTol = 1e-4;
inline constexpr int kSchemaVersion = 1;

// |got - expected| <= max(kAbsTol, kRelTol * |expected|)
bool compare_objective(double got, double expected, corpus::Objective objective);

struct InstanceOutcome {
  std::string id;
  std::string source;
  std::string strategy;
  corpus::Objective objective = corpus::Objective::Satisfy;
  bool executed = false;
  bool solution_correct = false;
  // Left out of every aggregate: no expected result to compare with.
  bool excluded = false;
  // The ground truth failed on its own; a corpus bug, not a candidate failure.
  bool corpus_fault = false;
  harness::Status status = harness::Status::Unknown;
  std::optional<harness::ErrorCategory> error_category;
  std::string error;
  std::optional<double> objective_value;
  std::optional<double> expected_objective;
  std::optional<bool> verifier_verdict;
  // Satisfaction only: assignments equal the stored output values.
  std::optional<bool> matches_stored_output;
  std::string detail;
};

nlohmann::ordered_json outcome_to_json(const InstanceOutcome& o);
InstanceOutcome outcome_from_json(const nlohmann::ordered_json& j);

// Scores one solve of a generated model. Satisfaction instances go through
// verify_satisfaction on `toolchain`.
InstanceOutcome judge_instance(const harness::SolveResult& result, const corpus::ProblemInstance& instance,
                               std::string strategy, harness::Toolchain& toolchain,
                               const harness::SolverConfig& config);

// Outcome of a run that produced no model at all.
InstanceOutcome generation_failure(const corpus::ProblemInstance& instance, std::string strategy,
                                   const std::string& message);

// Fractions over the non-excluded outcomes. Throw EmptySet when there are none.
double execution_accuracy(const std::vector<InstanceOutcome>& outcomes);
double solution_accuracy(const std::vector<InstanceOutcome>& outcomes);

// 100 * fraction at two decimals, e.g. "63.08".
std::string format_percent(double fraction);

struct Aggregate {
  std::string source;  // "TOTAL" in totals rows
  std::string strategy;
  int n = 0;
  int executed = 0;
  int correct = 0;

  double e_acc() const { return n ? static_cast<double>(executed) / n : 0.0; }
  double s_acc() const { return n ? static_cast<double>(correct) / n : 0.0; }
};

struct EvaluationReport {
  std::vector<InstanceOutcome> outcomes;  // sorted by (strategy, source, id)
  std::vector<Aggregate> rows;            // per (strategy, source)
  std::vector<Aggregate> totals;          // per strategy
  std::vector<InstanceOutcome> exclusions;
};

EvaluationReport build_report(std::vector<InstanceOutcome> outcomes);

enum class Format { Json, Markdown, Csv };
Format parse_format(std::string_view name);
std::string emit_leaderboard(const EvaluationReport& report, Format format);

}  // namespace t2m::evaluator
