#include "cwm/baselines/zero_shot.hpp"

#include <memory>

#include <spdlog/spdlog.h>

#include "cwm/core/metrics.hpp"
#include "cwm/llm/code_parse.hpp"

namespace cwm::baselines {

ZeroShotResult zero_shot_pass_at_k(const IOProblem& problem, int k, llm::Gateway& gateway,
                                   sandbox::ProgramRuntime& runtime, std::uint64_t seed, double per_case_timeout) {
  if (k < 1) throw ValidationError("k must be >= 1");
  ZeroShotResult result;
  auto& trace = result.trace;
  trace.method = "zero-shot-cot";
  trace.seed = seed;
  trace.config = json{{"k", k}, {"io_case_timeout", per_case_timeout}};
  trace.task = problem.name;
  trace.budget = k;
  trace.termination = search::Termination::budget;

  const auto prompt = llm::render_zero_shot(problem.statement);
  // std::vector<bool> is not contiguous, so keep the flags in a plain array.
  auto solved = std::make_unique<bool[]>(static_cast<std::size_t>(k));
  std::size_t attempts = 0;
  for (int i = 0; i < k; ++i) {
    llm::CompletionResponse response;
    try {
      response = gateway.complete(prompt, ActionType::generate, seed + static_cast<std::uint64_t>(i));
    } catch (const llm::GatewayError& e) {
      spdlog::error("zero-shot on '{}' aborted after {} calls: {}", problem.name, trace.llm_calls_used, e.what());
      trace.termination = search::Termination::aborted;
      trace.abort_reason = e.what();
      break;
    }
    ++trace.llm_calls_used;

    ZeroShotAttempt attempt;
    try {
      attempt.program = llm::parse_code(response.text);
      attempt.evaluation = sandbox::evaluate_io_program(runtime, *attempt.program, problem, per_case_timeout);
      attempt.solved = !attempt.evaluation.tests.empty() && strict_accuracy(attempt.evaluation.tests);
    } catch (const llm::ParseError& e) {
      attempt.evaluation.error = ExecError{ErrorClass::parse, e.what(), ""};
    }

    search::ExpansionRecord record;
    record.step = i;
    record.node = static_cast<std::size_t>(i);
    record.action = ActionType::generate;
    record.value = attempt.evaluation.value;
    record.is_buggy = attempt.evaluation.buggy();
    if (attempt.evaluation.error) record.error_class = attempt.evaluation.error->cls;
    trace.expansions.push_back(std::move(record));

    solved[attempts++] = attempt.solved;
    if (attempt.solved && !trace.best_node) {
      trace.best_node = static_cast<std::size_t>(i);
      trace.best_value = 1.0;
      trace.best_program = *attempt.program;
    }
    result.attempts.push_back(std::move(attempt));
  }
  result.solved = pass_at_budget(std::span<const bool>(solved.get(), attempts));
  return result;
}

}  // namespace cwm::baselines
