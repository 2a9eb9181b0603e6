#include "cwm/planning/episodes.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "cwm/core/metrics.hpp"

namespace cwm::planning {

Value RandomPolicy::act(const Value&, std::mt19937_64& rng) { return random_action(actions_, rng); }

Value MctsPolicy::act(const Value& state, std::mt19937_64& rng) {
  auto decision = mcts_plan(*model_, state, num_actions_, config_, rng);
  return Value::of(static_cast<double>(decision.action));
}

Value CemPolicy::act(const Value& state, std::mt19937_64& rng) {
  if (queue_.empty()) {
    auto plan = cem_plan(*model_, state, actions_, config_, rng);
    queue_.assign(plan.begin(), plan.end());
  }
  Value a = std::move(queue_.front());
  queue_.pop_front();
  return a;
}

json EpisodeResult::to_json() const {
  json steps_json = json::array();
  for (const auto& s : log) {
    json j{{"s", value_to_json(s.s)}, {"a", value_to_json(s.a)}, {"r", s.r},
           {"s_next", value_to_json(s.s_next)}, {"d", s.d}};
    if (s.fallback) j["fallback"] = *s.fallback;
    steps_json.push_back(std::move(j));
  }
  return json{{"return", total_return}, {"steps", steps}, {"terminated", terminated}, {"log", std::move(steps_json)}};
}

EpisodeResult run_episode(const fixtures::FixtureEnv& env, Policy& policy, int max_steps, std::mt19937_64& rng) {
  EpisodeResult result;
  policy.reset();
  Value s = env.initial_state();
  for (int t = 0; t < max_steps; ++t) {
    EpisodeStep step;
    step.s = s;
    try {
      step.a = policy.act(s, rng);
      if (!env.action_space().contains(step.a)) {
        throw ModelError(ExecError{ErrorClass::runtime, fmt::format("planner chose an invalid action {}", format_value(step.a)), ""});
      }
    } catch (const std::runtime_error& e) {
      step.fallback = e.what();
      step.a = random_action(env.action_space(), rng);
      spdlog::debug("step {}: policy failed ({}), playing a random action", t, e.what());
    }
    auto p = env.step(s, step.a);
    step.r = p.r;
    step.s_next = p.s_next;
    step.d = p.d;
    result.total_return += p.r;
    ++result.steps;
    s = std::move(p.s_next);
    result.log.push_back(std::move(step));
    if (result.log.back().d) {
      result.terminated = true;
      break;
    }
  }
  return result;
}

PlannerKind planner_for(const SpaceSpec& action_space) {
  return action_space.is_discrete() ? PlannerKind::mcts : PlannerKind::cem;
}

std::unique_ptr<Policy> make_planner_policy(WorldModel& model, const SpaceSpec& action_space,
                                            const PlannerSettings& settings) {
  if (planner_for(action_space) == PlannerKind::mcts) {
    return std::make_unique<MctsPolicy>(model, action_space.as_discrete().n, settings.mcts);
  }
  return std::make_unique<CemPolicy>(model, action_space, settings.cem);
}

namespace {

double mean_return(const std::vector<EpisodeResult>& eps) {
  if (eps.empty()) return 0.0;
  double s = 0.0;
  for (const auto& e : eps) s += e.total_return;
  return s / static_cast<double>(eps.size());
}

std::vector<EpisodeResult> play(const fixtures::FixtureEnv& env, Policy& policy, int episodes, std::uint64_t seed,
                                int max_steps) {
  std::vector<EpisodeResult> out;
  for (int i = 0; i < episodes; ++i) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(i));
    out.push_back(run_episode(env, policy, max_steps, rng));
  }
  return out;
}

json returns_json(const std::vector<EpisodeResult>& eps) {
  json j = json::array();
  for (const auto& e : eps) j.push_back(e.total_return);
  return j;
}

}  // namespace

json CwmPlanningReport::to_json(bool with_logs) const {
  json j{{"normalized_return", normalized_return},
         {"standard_error", standard_error},
         {"mean_return_cwm", mean_cwm},
         {"mean_return_true", mean_true},
         {"mean_return_random", mean_random},
         {"returns_cwm", returns_json(cwm_episodes)},
         {"returns_true", returns_json(true_episodes)},
         {"returns_random", returns_json(random_episodes)},
         {"model_unusable", model_unusable}};
  if (!note.empty()) j["note"] = note;
  if (with_logs) {
    json logs = json::array();
    for (const auto& e : cwm_episodes) logs.push_back(e.to_json());
    j["cwm_episode_logs"] = std::move(logs);
  }
  return j;
}

CwmPlanningReport evaluate_cwm(const std::string& program, const fixtures::FixtureEnv& env,
                               sandbox::ProgramRuntime& runtime, const PlannerSettings& settings, int episodes,
                               std::uint64_t seed) {
  if (episodes < 1) throw ValidationError("need at least one episode");
  CwmPlanningReport report;

  FixtureModel oracle(env);
  auto oracle_policy = make_planner_policy(oracle, env.action_space(), settings);
  report.true_episodes = play(env, *oracle_policy, episodes, seed, settings.max_steps);
  RandomPolicy random(env.action_space());
  report.random_episodes = play(env, random, episodes, seed, settings.max_steps);
  report.mean_true = mean_return(report.true_episodes);
  report.mean_random = mean_return(report.random_episodes);

  if (auto err = runtime.load(program)) {
    report.model_unusable = true;
    report.note = fmt::format("model unusable: {} error: {}", to_string(err->cls), err->message);
    report.mean_cwm = report.mean_random;
    report.normalized_return = 0.0;
    return report;
  }
  RuntimeModel cwm(runtime);
  auto cwm_policy = make_planner_policy(cwm, env.action_space(), settings);
  report.cwm_episodes = play(env, *cwm_policy, episodes, seed, settings.max_steps);
  report.mean_cwm = mean_return(report.cwm_episodes);

  report.normalized_return = normalized_return(report.mean_cwm, report.mean_true, report.mean_random);
  const double scale = std::abs(report.mean_true - report.mean_random);
  if (episodes > 1) {
    std::vector<double> diff(static_cast<std::size_t>(episodes));
    for (int i = 0; i < episodes; ++i) {
      diff[static_cast<std::size_t>(i)] =
          (report.cwm_episodes[static_cast<std::size_t>(i)].total_return -
           report.true_episodes[static_cast<std::size_t>(i)].total_return) / scale;
    }
    double m = std::accumulate(diff.begin(), diff.end(), 0.0) / episodes;
    double ss = 0.0;
    for (double d : diff) ss += (d - m) * (d - m);
    report.standard_error = std::sqrt(ss / (episodes - 1)) / std::sqrt(static_cast<double>(episodes));
  }
  return report;
}

}  // namespace cwm::planning
