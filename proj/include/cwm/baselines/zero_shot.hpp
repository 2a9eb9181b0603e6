#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cwm/llm/gateway.hpp"
#include "cwm/sandbox/evaluator.hpp"
#include "cwm/search/trace.hpp"

namespace cwm::baselines {

struct ZeroShotAttempt {
  std::optional<std::string> program;  // empty when nothing could be parsed
  bool solved = false;
  sandbox::ProgramEvaluation evaluation;
};

struct ZeroShotResult {
  std::vector<ZeroShotAttempt> attempts;
  bool solved = false;
  search::SearchTrace trace;
};

/// k independent chain-of-thought attempts, each judged on every test.
ZeroShotResult zero_shot_pass_at_k(const IOProblem& problem, int k, llm::Gateway& gateway,
                                   sandbox::ProgramRuntime& runtime, std::uint64_t seed = 0,
                                   double per_case_timeout = 4.0);

}  // namespace cwm::baselines
