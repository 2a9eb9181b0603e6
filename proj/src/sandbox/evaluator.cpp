#include "cwm/sandbox/evaluator.hpp"

#include <chrono>

#include "cwm/core/metrics.hpp"

namespace cwm::sandbox {

ProgramEvaluation evaluate_cwm_program(ProgramRuntime& runtime, const std::string& source, const EnvTask& task,
                                       const ToleranceConfig& tol) {
  const auto started = std::chrono::steady_clock::now();
  ProgramEvaluation eval;
  if (auto err = runtime.load(source)) {
    eval.error = std::move(err);
    return eval;
  }

  const auto& transitions = task.buffer.transitions;
  std::vector<StepQuery> queries;
  queries.reserve(transitions.size());
  for (const auto& t : transitions) queries.push_back({t.s, t.a});
  auto results = runtime.predict_batch(queries);

  std::vector<PredictionOutcome> outcomes(transitions.size());
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    auto& o = outcomes[i];
    o.index = i;
    if (i >= results.size()) {
      o.error = ExecError{ErrorClass::protocol, "missing prediction", ""};
    } else if (auto* err = std::get_if<ExecError>(&results[i])) {
      o.error = *err;
    } else {
      const auto& p = std::get<Prediction>(results[i]);
      auto flags = match_transition(p, transitions[i], task.observation_space, tol);
      o.state_match = flags.state;
      o.reward_match = flags.reward;
      o.done_match = flags.done;
      o.predicted = p;
    }
    if (o.error && !eval.error) eval.error = o.error;
  }

  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  if (outcomes.empty()) {
    eval.report = EvaluationReport{0.0, {}, std::nullopt, wall};
  } else {
    eval.report = make_report(std::move(outcomes), wall);
  }
  eval.value = eval.error ? 0.0 : eval.report->accuracy;
  return eval;
}

ProgramEvaluation evaluate_io_program(ProgramRuntime& runtime, const std::string& source, const IOProblem& problem,
                                      double per_case_timeout) {
  ProgramEvaluation eval;
  std::vector<std::string> inputs;
  inputs.reserve(problem.tests.size());
  for (const auto& t : problem.tests) inputs.push_back(t.input);
  auto outputs = runtime.run_io(source, inputs, per_case_timeout);

  std::size_t passed = 0;
  for (std::size_t i = 0; i < problem.tests.size(); ++i) {
    UnitTestResult r;
    if (i >= outputs.size()) {
      r.status = UnitTestResult::Status::error;
      r.error = ExecError{ErrorClass::protocol, "missing test result", ""};
    } else if (auto* err = std::get_if<ExecError>(&outputs[i])) {
      r.status = err->cls == ErrorClass::timeout ? UnitTestResult::Status::timeout : UnitTestResult::Status::error;
      r.error = *err;
    } else {
      r = judge_output(std::get<std::string>(outputs[i]), problem.tests[i].expected);
    }
    if (r.passed()) ++passed;
    if (r.error && !eval.error) eval.error = r.error;
    eval.tests.push_back(std::move(r));
  }
  if (!eval.error && !problem.tests.empty()) {
    eval.value = static_cast<double>(passed) / static_cast<double>(problem.tests.size());
  }
  return eval;
}

}  // namespace cwm::sandbox
