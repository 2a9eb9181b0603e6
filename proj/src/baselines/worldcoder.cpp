#include "cwm/baselines/worldcoder.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "cwm/llm/code_parse.hpp"

namespace cwm::baselines {

void WorldCoderConfig::validate() const {
  if (budget < 1) throw ValidationError("budget must be >= 1");
  if (!(concentration > 0.0)) throw ValidationError("concentration C must be > 0");
}

json WorldCoderConfig::to_json() const {
  return json{{"budget", budget},
              {"C", concentration},
              {"seed", seed},
              {"atol", evaluation.tolerance.atol},
              {"rtol", evaluation.tolerance.rtol},
              {"io_case_timeout", evaluation.io_case_timeout}};
}

std::pair<double, double> beta_init(double r, double concentration) {
  if (r < 0.0 || r > 1.0) throw ValidationError(fmt::format("score {} outside [0, 1]", r));
  return {1.0 + concentration * r, 1.0 + concentration * (1.0 - r)};
}

double sample_beta(double alpha, double beta, std::mt19937_64& rng) {
  std::gamma_distribution<double> ga(alpha, 1.0);
  std::gamma_distribution<double> gb(beta, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  if (x + y <= 0.0) return 0.5;  // both draws underflowed
  return x / (x + y);
}

std::size_t thompson_select(std::span<const BanditArm> arms, std::mt19937_64& rng) {
  if (arms.empty()) throw ValidationError("thompson_select needs at least one arm");
  std::size_t best = 0;
  double best_draw = -1.0;
  for (std::size_t i = 0; i < arms.size(); ++i) {
    double draw = sample_beta(arms[i].alpha, arms[i].beta, rng);
    if (draw > best_draw) {
      best = i;
      best_draw = draw;
    }
  }
  return best;
}

void beta_update(BanditArm& arm, double child_score, double parent_score) {
  if (child_score > parent_score) {
    arm.alpha += 1.0;
  } else {
    arm.beta += 1.0;
  }
}

namespace {

BanditArm make_arm(const search::TaskView& task, const std::string& program, sandbox::ProgramRuntime& runtime,
                   const WorldCoderConfig& config) {
  BanditArm arm;
  arm.program = program;
  arm.evaluation = task.evaluate(runtime, program, config.evaluation);
  arm.is_buggy = arm.evaluation.buggy();
  arm.score = arm.evaluation.value;
  std::tie(arm.alpha, arm.beta) = beta_init(arm.score, config.concentration);
  return arm;
}

BanditArm unparseable_arm(const std::string& why, const WorldCoderConfig& config) {
  BanditArm arm;
  arm.is_buggy = true;
  arm.evaluation.error = ExecError{ErrorClass::parse, why, ""};
  std::tie(arm.alpha, arm.beta) = beta_init(0.0, config.concentration);
  return arm;
}

}  // namespace

WorldCoderResult worldcoder_search(const search::TaskView& task, const WorldCoderConfig& config,
                                   llm::Gateway& gateway, sandbox::ProgramRuntime& runtime) {
  config.validate();
  WorldCoderResult result;
  auto& trace = result.trace;
  trace.method = "worldcoder";
  trace.seed = config.seed;
  trace.config = config.to_json();
  trace.task = task.name();
  trace.budget = config.budget;
  trace.termination = search::Termination::budget;

  std::mt19937_64 rng(config.seed);
  auto& arms = result.arms;

  for (int step = 0; step < config.budget; ++step) {
    std::optional<std::size_t> parent;
    ActionType action = ActionType::generate;
    std::string source;
    sandbox::ProgramEvaluation parent_eval;
    if (step > 0) {
      parent = thompson_select(arms, rng);
      const auto& p = arms[*parent];
      action = p.is_buggy ? ActionType::fix : ActionType::improve;
      source = p.program;
      parent_eval = p.evaluation;
    }

    auto prompt = llm::render_prompt(action, task.kind(), search::make_context(action, task, source, parent_eval));
    llm::CompletionResponse response;
    try {
      response = gateway.complete(prompt, action, config.seed + static_cast<std::uint64_t>(step));
    } catch (const llm::GatewayError& e) {
      spdlog::error("worldcoder on '{}' aborted after {} calls: {}", task.name(), trace.llm_calls_used, e.what());
      trace.termination = search::Termination::aborted;
      trace.abort_reason = e.what();
      break;
    }
    ++trace.llm_calls_used;

    BanditArm arm;
    try {
      arm = make_arm(task, search::program_from_completion(action, source, prompt, response), runtime, config);
    } catch (const llm::ParseError& e) {
      arm = unparseable_arm(e.what(), config);
    }
    if (parent) beta_update(arms[*parent], arm.score, arms[*parent].score);

    search::ExpansionRecord record;
    record.step = step;
    record.node = arms.size();
    record.parent = parent.value_or(0);
    if (parent) record.path = {*parent};
    record.action = action;
    record.value = arm.score;
    record.is_buggy = arm.is_buggy;
    if (arm.evaluation.error) record.error_class = arm.evaluation.error->cls;
    trace.expansions.push_back(std::move(record));

    const bool solved = !arm.is_buggy && arm.score >= 1.0;
    arms.push_back(std::move(arm));
    if (solved) {
      trace.termination = search::Termination::solved;
      break;
    }
  }

  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < arms.size(); ++i) {
    if (arms[i].is_buggy) continue;
    if (!best || arms[i].score > arms[*best].score) best = i;
  }
  if (best) {
    trace.best_node = *best;
    trace.best_value = arms[*best].score;
    trace.best_program = arms[*best].program;
    result.program = arms[*best].program;
    result.best_eval = arms[*best].evaluation;
  }
  return result;
}

}  // namespace cwm::baselines
