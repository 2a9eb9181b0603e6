#pragma once

#include <string>
#include <string_view>

#include "cwm/core/types.hpp"

namespace cwm {

struct ToleranceConfig {
  double atol = 1e-4;
  double rtol = 1e-4;
};

struct MatchFlags {
  bool state = false;
  bool reward = false;
  bool done = false;
};

/// |x - y| <= atol + rtol * |y|, with y the ground truth.
bool within_tolerance(double x, double truth, const ToleranceConfig& tol);

/// Compares a predicted step against the recorded transition. Discrete
/// observations and the done flag must match exactly; continuous observations
/// and the reward use the tolerance rule on every element. A length mismatch
/// is a state mismatch.
MatchFlags match_transition(const Prediction& predicted, const Transition& truth,
                            const SpaceSpec& observation_space, const ToleranceConfig& tol = {});

/// Strips trailing whitespace from every line and drops trailing blank lines.
std::string normalize_output(std::string_view text);

UnitTestResult judge_output(std::string actual, std::string_view expected);

}  // namespace cwm
