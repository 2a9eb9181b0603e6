#include "cwm/search/gif_mcts.hpp"

#include <spdlog/spdlog.h>

namespace cwm::search {

std::optional<NodeId> best_node(const SearchTree& tree) {
  std::optional<NodeId> best;
  for (const auto& n : tree.nodes()) {
    if (!n.parent || n.is_buggy) continue;
    if (!best || n.eval_value > tree.node(*best).eval_value) best = n.id;
  }
  return best;
}

SearchResult run_search(const TaskView& task, const SearchConfig& config, llm::Gateway& gateway,
                        sandbox::ProgramRuntime& runtime) {
  config.validate();
  SearchResult result{"", std::nullopt, {}, SearchTree(config), ValueEstimator(config)};
  auto& tree = result.tree;
  auto& estimator = result.estimator;
  auto& trace = result.trace;
  trace.seed = config.seed;
  trace.config = config.to_json();
  trace.task = task.name();
  trace.budget = config.budget;
  trace.termination = Termination::budget;

  std::optional<sandbox::ProgramEvaluation> best_eval;
  for (int step = 0; step < config.budget; ++step) {
    auto path = tree.select(estimator);
    if (path.empty()) {
      trace.termination = Termination::exhausted;
      break;
    }
    const auto [at, arm_index] = path.back();
    const ActionType action = tree.node(at).arms[arm_index].type;

    // The estimator learns from what it would have predicted for this arm.
    std::optional<double> v_global;
    std::optional<double> v_local;
    if (action != ActionType::fix) {
      v_global = estimator.global_mean(action);
      v_local = tree.local_mean(at, action).value_or(*v_global);
    }

    Expansion expansion;
    try {
      expansion = expand_node(tree, at, action, task, gateway, runtime, config, config.seed + static_cast<std::uint64_t>(step));
    } catch (const llm::GatewayError& e) {
      spdlog::error("search on '{}' aborted after {} calls: {}", task.name(), trace.llm_calls_used, e.what());
      trace.termination = Termination::aborted;
      trace.abort_reason = e.what();
      break;
    }
    ++trace.llm_calls_used;

    const bool buggy = expansion.child.is_buggy;
    const double value = expansion.child.eval_value;
    const NodeId child = tree.attach(at, arm_index, std::move(expansion.child));
    tree.visit(path);
    if (!buggy || !config.enabled(ActionType::fix)) tree.backpropagate(child, value);
    if (v_global) estimator.update(action, *v_global, *v_local, value);

    ExpansionRecord record;
    record.step = step;
    record.node = child;
    record.parent = at;
    for (const auto& s : path) record.path.push_back(s.node);
    record.action = action;
    record.value = value;
    record.is_buggy = buggy;
    if (const auto& err = tree.node(child).error) record.error_class = err->cls;
    trace.expansions.push_back(std::move(record));
    spdlog::debug("step {}: {} at node {} -> node {} value {:.4f}{}", step, to_string(action), at, child, value,
                  buggy ? " (buggy)" : "");

    if (auto b = best_node(tree); b && *b == child) best_eval = std::move(expansion.evaluation);
    if (!buggy && value >= 1.0) {
      trace.termination = Termination::solved;
      break;
    }
  }

  trace.best_node = best_node(tree);
  if (trace.best_node) {
    const auto& b = tree.node(*trace.best_node);
    trace.best_value = b.eval_value;
    trace.best_program = b.program();
    result.program = trace.best_program;
    result.best_eval = std::move(best_eval);
  }
  return result;
}

}  // namespace cwm::search
