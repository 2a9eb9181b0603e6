#include "cwm/planning/cem_planner.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

#include <fmt/format.h>

namespace cwm::planning {

void CemPlannerConfig::validate() const {
  if (horizon < 1 || iterations < 1 || samples < 1 || elites < 1) {
    throw ValidationError("CEM horizon, iterations, samples and elites must all be >= 1");
  }
  if (elites > samples) throw ValidationError(fmt::format("CEM elites ({}) exceed samples ({})", elites, samples));
  if (std_floor < 0.0) throw ValidationError("CEM std floor must be >= 0");
  if (threads < 1) throw ValidationError("CEM threads must be >= 1");
}

json CemPlannerConfig::to_json() const {
  return json{{"horizon", horizon},   {"iterations", iterations}, {"samples", samples},
              {"elites", elites},     {"std_floor", std_floor},   {"threads", threads}};
}

std::vector<double> initial_std(const BoxSpace& bounds) {
  std::vector<double> out(bounds.low.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = 0.5 * std::max(std::abs(bounds.low[i]), std::abs(bounds.high[i]));
  }
  return out;
}

namespace {

std::vector<std::optional<double>> score_all(const PlanScorer& score, const std::vector<std::vector<double>>& plans,
                                             int threads) {
  std::vector<std::optional<double>> scores(plans.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < plans.size(); ++i) scores[i] = score(plans[i]);
    return scores;
  }
  // Contiguous chunks; each slot is written by exactly one task.
  const std::size_t chunk = (plans.size() + static_cast<std::size_t>(threads) - 1) / static_cast<std::size_t>(threads);
  std::vector<std::future<void>> tasks;
  for (std::size_t begin = 0; begin < plans.size(); begin += chunk) {
    const std::size_t end = std::min(plans.size(), begin + chunk);
    tasks.push_back(std::async(std::launch::async, [&, begin, end] {
      for (std::size_t i = begin; i < end; ++i) scores[i] = score(plans[i]);
    }));
  }
  for (auto& t : tasks) t.get();
  return scores;
}

}  // namespace

CemResult cem_optimize(const PlanScorer& score, int horizon, const BoxSpace& bounds, const CemPlannerConfig& config,
                       std::mt19937_64& rng) {
  config.validate();
  if (horizon < 1) throw ValidationError("CEM horizon must be >= 1");
  const std::size_t dims = bounds.low.size();
  const std::size_t length = dims * static_cast<std::size_t>(horizon);

  CemResult result;
  result.initial_std = initial_std(bounds);
  result.mean.assign(length, 0.0);
  result.std.resize(length);
  for (std::size_t i = 0; i < length; ++i) result.std[i] = result.initial_std[i % dims];

  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> plans(static_cast<std::size_t>(config.samples), std::vector<double>(length));
  for (int iter = 0; iter < config.iterations; ++iter) {
    for (auto& plan : plans) {
      for (std::size_t i = 0; i < length; ++i) {
        double x = result.mean[i] + result.std[i] * normal(rng);
        plan[i] = std::clamp(x, bounds.low[i % dims], bounds.high[i % dims]);
      }
    }
    auto scores = score_all(score, plans, config.threads);

    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i]) {
        order.push_back(i);
      } else {
        ++result.failed_plans;
      }
    }
    if (order.empty()) throw PlannerError("model unusable: every candidate plan failed");
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return *scores[a] > *scores[b]; });
    const std::size_t k = std::min(order.size(), static_cast<std::size_t>(config.elites));

    for (std::size_t i = 0; i < length; ++i) {
      double m = 0.0;
      for (std::size_t e = 0; e < k; ++e) m += plans[order[e]][i];
      m /= static_cast<double>(k);
      double var = 0.0;
      for (std::size_t e = 0; e < k; ++e) var += (plans[order[e]][i] - m) * (plans[order[e]][i] - m);
      result.mean[i] = m;
      result.std[i] = std::max(std::sqrt(var / static_cast<double>(k)), config.std_floor);
    }
    result.best_per_iteration.push_back(*scores[order.front()]);
    if (iter + 1 == config.iterations) {
      result.best_plan = plans[order.front()];
      result.best_score = *scores[order.front()];
    }
  }
  return result;
}

std::vector<Value> cem_plan(WorldModel& model, const Value& state, const SpaceSpec& action_space,
                            const CemPlannerConfig& config, std::mt19937_64& rng, CemResult* details) {
  if (action_space.is_discrete()) throw ValidationError("CEM needs a box action space");
  const auto& bounds = action_space.as_box();
  const std::size_t dims = bounds.low.size();
  auto to_actions = [dims](const std::vector<double>& flat) {
    std::vector<Value> actions;
    for (std::size_t t = 0; t + dims <= flat.size(); t += dims) {
      actions.push_back(Value::of(std::vector<double>(flat.begin() + static_cast<std::ptrdiff_t>(t),
                                                      flat.begin() + static_cast<std::ptrdiff_t>(t + dims))));
    }
    return actions;
  };
  PlanScorer scorer = [&](const std::vector<double>& flat) -> std::optional<double> {
    auto outcome = model.rollout(state, to_actions(flat));
    if (outcome.error) return std::nullopt;
    double ret = 0.0;
    for (const auto& p : outcome.steps) ret += p.r;
    return ret;
  };
  // A single model cannot be shared across threads.
  auto cfg = config;
  cfg.threads = 1;
  auto result = cem_optimize(scorer, config.horizon, bounds, cfg, rng);
  auto actions = to_actions(result.best_plan);
  if (details) *details = std::move(result);
  return actions;
}

}  // namespace cwm::planning
