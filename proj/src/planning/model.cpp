#include "cwm/planning/model.hpp"

#include <fmt/format.h>

namespace cwm::planning {

ModelError::ModelError(ExecError error)
    : std::runtime_error(fmt::format("{} error: {}", to_string(error.cls), error.message)), error_(std::move(error)) {}

sandbox::PlanOutcome WorldModel::rollout(const Value& s0, const std::vector<Value>& actions) {
  sandbox::PlanOutcome out;
  Value s = s0;
  for (const auto& a : actions) {
    try {
      out.steps.push_back(step(s, a));
    } catch (const ModelError& e) {
      out.error = e.error();
      break;
    }
    s = out.steps.back().s_next;
    if (out.steps.back().d) break;
  }
  return out;
}

Prediction FixtureModel::step(const Value& s, const Value& a) {
  try {
    return env_->step(s, a);
  } catch (const std::invalid_argument& e) {
    throw ModelError(ExecError{ErrorClass::runtime, e.what(), ""});
  }
}

Prediction RuntimeModel::step(const Value& s, const Value& a) {
  auto r = runtime_->step_from(s, a);
  if (auto* err = std::get_if<ExecError>(&r)) throw ModelError(*err);
  return std::get<Prediction>(std::move(r));
}

sandbox::PlanOutcome RuntimeModel::rollout(const Value& s0, const std::vector<Value>& actions) {
  return runtime_->run_plan(s0, actions);
}

Value random_action(const SpaceSpec& space, std::mt19937_64& rng) {
  if (space.is_discrete()) {
    std::uniform_int_distribution<std::int64_t> pick(0, space.as_discrete().n - 1);
    return Value::of(static_cast<double>(pick(rng)));
  }
  const auto& box = space.as_box();
  std::vector<double> a(box.low.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::uniform_real_distribution<double> u(box.low[i], box.high[i]);
    a[i] = u(rng);
  }
  return Value::of(std::move(a));
}

}  // namespace cwm::planning
