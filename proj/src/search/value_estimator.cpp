#include "cwm/search/value_estimator.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace cwm::search {

namespace {
constexpr double kMinWeightSum = 1e-6;
}

ValueEstimator::ValueEstimator(Prior generate, Prior improve, double learning_rate) : learning_rate_(learning_rate) {
  stats_[ActionType::generate] = Stats{generate.value * generate.count, generate.count, {}};
  stats_[ActionType::improve] = Stats{improve.value * improve.count, improve.count, {}};
}

ValueEstimator::ValueEstimator(const SearchConfig& config)
    : ValueEstimator(config.prior_generate, config.prior_improve, config.learning_rate) {}

ValueEstimator::Stats& ValueEstimator::stats(ActionType action) {
  auto it = stats_.find(action);
  if (it == stats_.end()) throw ValidationError(fmt::format("no value estimate for '{}' arms", to_string(action)));
  return it->second;
}

const ValueEstimator::Stats& ValueEstimator::stats(ActionType action) const {
  return const_cast<ValueEstimator*>(this)->stats(action);
}

double ValueEstimator::blend(const Weights& w, double v_global, double v_local) {
  return (w.global * v_global + w.local * v_local) / (w.global + w.local);
}

double ValueEstimator::global_mean(ActionType action) const {
  const auto& s = stats(action);
  return s.count > 0.0 ? s.sum / s.count : 0.0;
}

double ValueEstimator::estimate(ActionType action, std::optional<double> local_mean) const {
  double vg = global_mean(action);
  return blend(stats(action).w, vg, local_mean.value_or(vg));
}

void ValueEstimator::update(ActionType action, double v_global, double v_local, double observed) {
  auto& s = stats(action);
  auto& w = s.w;
  const double sum = w.global + w.local;
  const double predicted = blend(w, v_global, v_local);
  const double err = predicted - observed;
  // d/dw of (pred - obs)^2, with pred = (wG vG + wL vL) / (wG + wL).
  const double d_global = 2.0 * err * w.local * (v_global - v_local) / (sum * sum);
  const double d_local = 2.0 * err * w.global * (v_local - v_global) / (sum * sum);
  w.global = std::max(0.0, w.global - learning_rate_ * d_global);
  w.local = std::max(0.0, w.local - learning_rate_ * d_local);
  if (w.global + w.local < kMinWeightSum) {
    w.global = w.local = kMinWeightSum / 2.0;
  }
  s.sum += observed;
  s.count += 1.0;
  log_.push_back(Step{action, v_global, v_local, observed, predicted, w});
}

ValueEstimator::Weights ValueEstimator::weights(ActionType action) const { return stats(action).w; }

void ValueEstimator::set_weights(ActionType action, Weights w) {
  if (w.global < 0.0 || w.local < 0.0 || w.global + w.local < kMinWeightSum) {
    throw ValidationError("estimator weights must be >= 0 with a positive sum");
  }
  stats(action).w = w;
}

}  // namespace cwm::search
