#include "cwm/search/expansion.hpp"

#include <fmt/format.h>

#include "cwm/llm/code_parse.hpp"

namespace cwm::search {

namespace {

constexpr std::string_view kNoCode = "# no code could be extracted from the previous reply\n";

std::string format_done(bool d) { return d ? "True" : "False"; }

std::string format_reward(double r) { return format_value(Value::of(r)); }

}  // namespace

llm::TaskKind TaskView::kind() const {
  return std::holds_alternative<const EnvTask*>(task_) ? llm::TaskKind::cwm : llm::TaskKind::io_problem;
}

const EnvTask* TaskView::env() const {
  auto* p = std::get_if<const EnvTask*>(&task_);
  return p ? *p : nullptr;
}

const IOProblem* TaskView::problem() const {
  auto* p = std::get_if<const IOProblem*>(&task_);
  return p ? *p : nullptr;
}

const std::string& TaskView::name() const { return env() ? env()->name : problem()->name; }

const std::string& TaskView::description() const { return env() ? env()->description : problem()->statement; }

sandbox::ProgramEvaluation TaskView::evaluate(sandbox::ProgramRuntime& runtime, const std::string& program,
                                              const SearchConfig& config) const {
  if (env()) return sandbox::evaluate_cwm_program(runtime, program, *env(), config.tolerance);
  return sandbox::evaluate_io_program(runtime, program, *problem(), config.io_case_timeout);
}

llm::MismatchExample describe_mismatch(const Transition& truth, const Prediction& predicted) {
  auto outputs = [](const Value& s, double r, bool d) {
    return fmt::format("Next state: {}\nReward: {}\nDone: {}", format_value(s), format_reward(r), format_done(d));
  };
  return llm::MismatchExample{
      fmt::format("State: {}\nAction: {}", format_value(truth.s), format_value(truth.a)),
      outputs(truth.s_next, truth.r, truth.d),
      outputs(predicted.s_next, predicted.r, predicted.d),
  };
}

std::optional<llm::MismatchExample> TaskView::improve_example(const std::optional<EvaluationReport>& report,
                                                              const std::vector<UnitTestResult>& tests) const {
  if (const auto* e = env()) {
    if (!report || !report->first_mismatch) return std::nullopt;
    const auto& outcome = report->outcomes.at(*report->first_mismatch);
    const auto& truth = e->buffer.transitions.at(outcome.index);
    if (!outcome.predicted) return std::nullopt;
    return describe_mismatch(truth, *outcome.predicted);
  }
  const auto& p = *problem();
  const std::size_t eligible = std::min(p.improve_eligible, p.tests.size());
  if (eligible == 0) return std::nullopt;
  std::size_t pick = 0;
  for (std::size_t i = 0; i < eligible && i < tests.size(); ++i) {
    if (!tests[i].passed()) {
      pick = i;
      break;
    }
  }
  std::string actual = pick < tests.size() ? tests[pick].actual : "";
  return llm::MismatchExample{p.tests[pick].input, p.tests[pick].expected, actual};
}

std::string format_error_feedback(const ExecError& error) {
  std::string out = fmt::format("{} error: {}", to_string(error.cls), error.message);
  auto trace = trim_trace(error.trace);
  if (!trace.empty()) out += "\n" + trace;
  return out;
}

llm::PromptContext make_context(ActionType action, const TaskView& task, const std::string& source,
                                const sandbox::ProgramEvaluation& eval) {
  llm::PromptContext ctx;
  ctx.description = task.description();
  switch (action) {
    case ActionType::generate:
      ctx.code = source;
      break;
    case ActionType::improve:
      ctx.code = source;
      ctx.mismatch = task.improve_example(eval.report, eval.tests);
      break;
    case ActionType::fix:
      ctx.code = source.empty() ? std::string(kNoCode) : source;
      if (eval.error) ctx.error = format_error_feedback(*eval.error);
      break;
  }
  return ctx;
}

std::string program_from_completion(ActionType action, const std::string& source, const llm::PromptBundle& prompt,
                                    const llm::CompletionResponse& response) {
  if (action == ActionType::generate && response.prefix_applied) {
    return source + llm::parse_code(response.text, prompt.assistant_prefix);
  }
  // Without a pre-filled fence the reply is a complete program.
  return llm::parse_code(response.text, response.prefix_applied ? prompt.assistant_prefix : "");
}

Expansion expand_node(const SearchTree& tree, NodeId at, ActionType action, const TaskView& task,
                      llm::Gateway& gateway, sandbox::ProgramRuntime& runtime, const SearchConfig& config,
                      std::optional<std::uint64_t> seed) {
  const SearchNode& parent = tree.node(at);
  // Generate continues the parent's committed state; improve and fix rewrite
  // the parent's whole program.
  const std::string source = action == ActionType::generate ? join_lines(parent.state_lines) : parent.program();
  sandbox::ProgramEvaluation parent_eval;
  parent_eval.error = parent.error;
  parent_eval.report = parent.report;
  parent_eval.tests = parent.tests;

  Expansion out;
  out.prompt = llm::render_prompt(action, task.kind(), make_context(action, task, source, parent_eval));
  auto response = gateway.complete(out.prompt, action, seed);
  out.completion = response.text;

  std::string program;
  try {
    program = program_from_completion(action, source, out.prompt, response);
  } catch (const llm::ParseError& e) {
    out.child.is_buggy = true;
    out.child.error = ExecError{ErrorClass::parse, e.what(), ""};
    out.evaluation.error = out.child.error;
    return out;
  }

  auto split = split_state_rollout(parent.state_lines, split_lines(program), config.lines_per_state);
  out.child.state_lines = std::move(split.state);
  out.child.rollout_lines = std::move(split.rollout);
  out.evaluation = task.evaluate(runtime, out.child.program(), config);
  out.child.eval_value = out.evaluation.value;
  out.child.is_buggy = out.evaluation.buggy();
  out.child.error = out.evaluation.error;
  out.child.report = out.evaluation.report;
  out.child.tests = out.evaluation.tests;
  return out;
}

}  // namespace cwm::search
