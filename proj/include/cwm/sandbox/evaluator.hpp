#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cwm/core/matching.hpp"
#include "cwm/core/types.hpp"
#include "cwm/sandbox/runtime.hpp"

namespace cwm::sandbox {

/// Score of one candidate program. A program is buggy when it fails to load or
/// any execution raises; buggy programs score 0 and carry the first error.
struct ProgramEvaluation {
  double value = 0.0;
  std::optional<ExecError> error;
  std::optional<EvaluationReport> report;  // world-model tasks
  std::vector<UnitTestResult> tests;       // stdin/stdout problems

  bool buggy() const { return error.has_value(); }
};

/// Loads `source` and predicts every buffer transition; value is the accuracy.
ProgramEvaluation evaluate_cwm_program(ProgramRuntime& runtime, const std::string& source, const EnvTask& task,
                                       const ToleranceConfig& tol = {});

/// Runs `source` on every test of `problem`; value is the fraction passed.
/// Wrong output is not a bug; raising or timing out is.
ProgramEvaluation evaluate_io_program(ProgramRuntime& runtime, const std::string& source, const IOProblem& problem,
                                      double per_case_timeout = 4.0);

}  // namespace cwm::sandbox
