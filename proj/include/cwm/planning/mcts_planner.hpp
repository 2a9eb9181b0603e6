#pragma once

#include <random>
#include <vector>

#include "cwm/core/json_io.hpp"
#include "cwm/planning/model.hpp"

namespace cwm::planning {

struct MctsPlannerConfig {
  int iterations = 25;
  int max_actions = 100;
  double exploration = 1.0;  // C
  double epsilon = 1.0;
  double gamma = 0.99;
  double temperature = 0.01;

  void validate() const;
  json to_json() const;
};

struct MctsDecision {
  std::int64_t action = 0;
  /// Per root action: mean discounted return and visit count (0 if never tried).
  std::vector<double> values;
  std::vector<int> visits;
  std::vector<double> probabilities;
  int simulations = 0;
  int model_errors = 0;
};

/// Softmax of `values` at temperature T, computed stably. Entries flagged
/// false in `mask` get probability 0.
std::vector<double> softmax(const std::vector<double>& values, const std::vector<bool>& mask, double temperature);

/// Plans one action in a discrete action space with `num_actions` actions.
/// Builds a fresh UCT tree from `state`; leaves are valued by a uniformly
/// random rollout. The action is drawn from a softmax over the root children.
MctsDecision mcts_plan(WorldModel& model, const Value& state, std::int64_t num_actions,
                       const MctsPlannerConfig& config, std::mt19937_64& rng);

}  // namespace cwm::planning
