#pragma once

#include <span>
#include <vector>

#include "cwm/core/types.hpp"

namespace cwm {

/// Mean over transitions of (state + reward + done matches) / 3.
/// Throws std::invalid_argument("empty evaluation") for an empty list.
double compute_accuracy(std::span<const PredictionOutcome> outcomes);

/// Builds a report whose accuracy and first_mismatch are derived from `outcomes`.
EvaluationReport make_report(std::vector<PredictionOutcome> outcomes, double wall_time);

/// (r_cwm - r_rand) / (r_true - r_rand). Throws std::domain_error when the
/// oracle and random returns coincide.
double normalized_return(double r_cwm, double r_true, double r_rand);

/// True iff every unit test passed. Requires a non-empty list.
bool strict_accuracy(std::span<const UnitTestResult> results);

/// True iff any attempt solved the problem.
bool pass_at_budget(std::span<const bool> per_attempt_solved);

}  // namespace cwm
