#pragma once

#include <map>
#include <optional>
#include <vector>

#include "cwm/core/json_io.hpp"
#include "cwm/core/types.hpp"
#include "cwm/search/config.hpp"

namespace cwm::search {

/// Predicts the value of an unexplored generate or improve arm as a weighted
/// blend of a global running mean for that action type (v_G) and the mean of
/// the parent's already expanded children of the same type (v_L). The two
/// weights per action type are fitted online by gradient descent.
class ValueEstimator {
 public:
  struct Weights {
    double global = 1.0;  // w_G
    double local = 1.0;   // w_L
  };

  struct Step {
    ActionType action;
    double v_global;
    double v_local;
    double observed;
    double predicted;
    Weights after;
  };

  ValueEstimator(Prior generate, Prior improve, double learning_rate);
  explicit ValueEstimator(const SearchConfig& config);

  /// v_G: (prior.value * prior.count + sum of observations) / (prior.count + n).
  double global_mean(ActionType action) const;
  /// v_L falls back to v_G when the arm has no expanded siblings.
  double estimate(ActionType action, std::optional<double> local_mean) const;
  /// One squared-error gradient step on the weights, then records `observed`
  /// in the global statistics.
  void update(ActionType action, double v_global, double v_local, double observed);

  Weights weights(ActionType action) const;
  void set_weights(ActionType action, Weights w);
  double learning_rate() const { return learning_rate_; }
  const std::vector<Step>& log() const { return log_; }

  static double blend(const Weights& w, double v_global, double v_local);

 private:
  struct Stats {
    double sum = 0.0;
    double count = 0.0;
    Weights w;
  };
  Stats& stats(ActionType action);
  const Stats& stats(ActionType action) const;

  std::map<ActionType, Stats> stats_;
  double learning_rate_;
  std::vector<Step> log_;
};

}  // namespace cwm::search
