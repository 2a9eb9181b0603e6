#pragma once

#include <optional>

#include "cwm/llm/gateway.hpp"
#include "cwm/sandbox/evaluator.hpp"
#include "cwm/sandbox/runtime.hpp"
#include "cwm/search/config.hpp"
#include "cwm/search/expansion.hpp"
#include "cwm/search/trace.hpp"
#include "cwm/search/tree.hpp"
#include "cwm/search/value_estimator.hpp"

namespace cwm::search {

struct SearchResult {
  /// Best program found; empty when no healthy program was produced.
  std::string program;
  std::optional<sandbox::ProgramEvaluation> best_eval;
  SearchTrace trace;
  SearchTree tree;
  ValueEstimator estimator;
};

/// Healthy node with the highest evaluation value; earliest wins ties.
std::optional<NodeId> best_node(const SearchTree& tree);

/// Runs the search until a program scores 1.0, the budget of LLM calls is
/// spent, nothing is left to expand, or the gateway fails (the partial result
/// is returned with termination "aborted").
SearchResult run_search(const TaskView& task, const SearchConfig& config, llm::Gateway& gateway,
                        sandbox::ProgramRuntime& runtime);

}  // namespace cwm::search
