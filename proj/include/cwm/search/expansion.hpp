#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "cwm/core/types.hpp"
#include "cwm/llm/gateway.hpp"
#include "cwm/llm/prompts.hpp"
#include "cwm/sandbox/evaluator.hpp"
#include "cwm/search/config.hpp"
#include "cwm/search/tree.hpp"

namespace cwm::search {

/// The task a search optimizes: a world-model environment or a stdin/stdout
/// problem. Holds a reference; the task must outlive the view.
class TaskView {
 public:
  TaskView(const EnvTask& env) : task_(&env) {}         // NOLINT(google-explicit-constructor)
  TaskView(const IOProblem& problem) : task_(&problem) {}  // NOLINT(google-explicit-constructor)

  llm::TaskKind kind() const;
  const std::string& name() const;
  const std::string& description() const;
  const EnvTask* env() const;
  const IOProblem* problem() const;

  sandbox::ProgramEvaluation evaluate(sandbox::ProgramRuntime& runtime, const std::string& program,
                                      const SearchConfig& config) const;

  /// The example shown to an improve prompt: the first mispredicted
  /// transition, or the first failing feedback-eligible test (falling back to
  /// the first eligible test when they all pass).
  std::optional<llm::MismatchExample> improve_example(const std::optional<EvaluationReport>& report,
                                                      const std::vector<UnitTestResult>& tests) const;

 private:
  std::variant<const EnvTask*, const IOProblem*> task_;
};

llm::MismatchExample describe_mismatch(const Transition& truth, const Prediction& predicted);

/// Error class, message and the trailing traceback lines, as shown to fix prompts.
std::string format_error_feedback(const ExecError& error);

struct Expansion {
  SearchNode child;
  sandbox::ProgramEvaluation evaluation;
  llm::PromptBundle prompt;
  std::string completion;
};

/// Builds the prompt for `action` at `at`, makes exactly one gateway call,
/// parses the program, splits it into state and rollout and evaluates it. The
/// returned node is not yet attached. GatewayError propagates.
Expansion expand_node(const SearchTree& tree, NodeId at, ActionType action, const TaskView& task,
                      llm::Gateway& gateway, sandbox::ProgramRuntime& runtime, const SearchConfig& config,
                      std::optional<std::uint64_t> seed);

/// Turns a completion into a program. Generate replies that continue a
/// pre-filled fence are appended to `source`; everything else is a whole
/// program. Throws llm::ParseError.
std::string program_from_completion(ActionType action, const std::string& source, const llm::PromptBundle& prompt,
                                    const llm::CompletionResponse& response);

/// Prompt context for an expansion of `source` (the node's full program).
llm::PromptContext make_context(ActionType action, const TaskView& task, const std::string& source,
                                const sandbox::ProgramEvaluation& eval);

}  // namespace cwm::search
