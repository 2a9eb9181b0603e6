#pragma once

#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "cwm/core/json_io.hpp"
#include "cwm/planning/model.hpp"

namespace cwm::planning {

struct CemPlannerConfig {
  int horizon = 100;  // T
  int iterations = 20;
  int samples = 1000;  // N
  int elites = 100;    // K
  double std_floor = 1e-6;
  /// Threads used to score plans; the random draws stay on the calling thread.
  int threads = 1;

  void validate() const;
  json to_json() const;
};

/// Half the largest absolute bound of each action dimension.
std::vector<double> initial_std(const BoxSpace& bounds);

/// Scores one flattened plan (horizon x action dims, row-major). nullopt
/// marks a plan the model could not evaluate. Must be thread safe when
/// threads > 1.
using PlanScorer = std::function<std::optional<double>(const std::vector<double>& plan)>;

struct CemResult {
  std::vector<double> best_plan;  // flattened, from the final iteration
  double best_score = 0.0;
  std::vector<double> mean;  // Gaussian after the last refit
  std::vector<double> std;
  std::vector<double> initial_std;
  /// Best elite score of every iteration.
  std::vector<double> best_per_iteration;
  int failed_plans = 0;
};

/// Cross-entropy optimization over plans of `horizon` steps in `bounds`.
/// Samples start from a zero-mean Gaussian, are clipped to the bounds, and
/// the top K refit the mean and per-dimension std (floored). Throws
/// PlannerError("model unusable") when every plan of an iteration fails.
CemResult cem_optimize(const PlanScorer& score, int horizon, const BoxSpace& bounds, const CemPlannerConfig& config,
                       std::mt19937_64& rng);

/// Plans `config.horizon` actions from `state` by scoring rollouts of `model`.
/// Returns the plan as one Value per step.
std::vector<Value> cem_plan(WorldModel& model, const Value& state, const SpaceSpec& action_space,
                            const CemPlannerConfig& config, std::mt19937_64& rng, CemResult* details = nullptr);

}  // namespace cwm::planning
