#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cwm/core/types.hpp"

namespace cwm::sandbox {

struct StepQuery {
  Value s;
  Value a;
};

/// The realized prefix of an open-loop plan. `error`, when set, is the failure
/// that cut the plan short after `steps.size()` successful steps.
struct PlanOutcome {
  std::vector<Prediction> steps;
  std::optional<ExecError> error;
};

/// Something that can load a candidate program and execute it. Implemented over
/// a worker process (WorkerRuntime) and in process for tests (NativeRuntime).
class ProgramRuntime {
 public:
  virtual ~ProgramRuntime() = default;

  /// Replaces any previously loaded program.
  virtual std::optional<ExecError> load(const std::string& source) = 0;

  virtual std::vector<Fallible<Prediction>> predict_batch(const std::vector<StepQuery>& items) = 0;
  virtual Fallible<Prediction> step_from(const Value& s, const Value& a) = 0;
  virtual PlanOutcome run_plan(const Value& s0, const std::vector<Value>& actions) = 0;

  /// Runs a stdin/stdout program once per input; independent of load().
  virtual std::vector<Fallible<std::string>> run_io(const std::string& source,
                                                     const std::vector<std::string>& inputs,
                                                     double per_case_timeout) = 0;
};

}  // namespace cwm::sandbox
