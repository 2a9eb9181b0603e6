#include "cwm/core/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace cwm {

double compute_accuracy(std::span<const PredictionOutcome> outcomes) {
  if (outcomes.empty()) throw std::invalid_argument("empty evaluation");
  double total = 0.0;
  for (const auto& o : outcomes) {
    if (o.error) continue;
    total += (static_cast<double>(o.state_match) + static_cast<double>(o.reward_match) +
              static_cast<double>(o.done_match)) /
             3.0;
  }
  return total / static_cast<double>(outcomes.size());
}

EvaluationReport make_report(std::vector<PredictionOutcome> outcomes, double wall_time) {
  EvaluationReport report;
  report.accuracy = compute_accuracy(outcomes);
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].error || !outcomes[i].full_match()) {
      report.first_mismatch = outcomes[i].index;
      break;
    }
  }
  report.outcomes = std::move(outcomes);
  report.wall_time = wall_time;
  return report;
}

double normalized_return(double r_cwm, double r_true, double r_rand) {
  if (r_true == r_rand) throw std::domain_error("degenerate normalization");
  return (r_cwm - r_rand) / (r_true - r_rand);
}

bool strict_accuracy(std::span<const UnitTestResult> results) {
  if (results.empty()) throw std::invalid_argument("strict accuracy needs at least one test result");
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed(); });
}

bool pass_at_budget(std::span<const bool> per_attempt_solved) {
  return std::any_of(per_attempt_solved.begin(), per_attempt_solved.end(),
                     [](bool solved) { return solved; });
}

}  // namespace cwm
