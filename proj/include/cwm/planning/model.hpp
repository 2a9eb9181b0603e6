#pragma once

#include <memory>
#include <random>
#include <stdexcept>
#include <vector>

#include "cwm/core/types.hpp"
#include "cwm/fixtures/fixtures.hpp"
#include "cwm/sandbox/runtime.hpp"

namespace cwm::planning {

/// A world model failed to answer (the program raised, timed out, ...).
class ModelError : public std::runtime_error {
 public:
  explicit ModelError(ExecError error);
  const ExecError& error() const { return error_; }

 private:
  ExecError error_;
};

/// A planner gave up, e.g. because every candidate plan failed.
class PlannerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// What planners need from a model: single steps and open-loop rollouts.
class WorldModel {
 public:
  virtual ~WorldModel() = default;
  /// Throws ModelError.
  virtual Prediction step(const Value& s, const Value& a) = 0;
  /// Steps through `actions` from `s0`, stopping after the first done.
  virtual sandbox::PlanOutcome rollout(const Value& s0, const std::vector<Value>& actions);
};

/// A fixture used directly as the model: the oracle planner.
class FixtureModel final : public WorldModel {
 public:
  explicit FixtureModel(const fixtures::FixtureEnv& env) : env_(&env) {}
  Prediction step(const Value& s, const Value& a) override;

 private:
  const fixtures::FixtureEnv* env_;
};

/// A synthesized program already loaded into `runtime`.
class RuntimeModel final : public WorldModel {
 public:
  explicit RuntimeModel(sandbox::ProgramRuntime& runtime) : runtime_(&runtime) {}
  Prediction step(const Value& s, const Value& a) override;
  sandbox::PlanOutcome rollout(const Value& s0, const std::vector<Value>& actions) override;

 private:
  sandbox::ProgramRuntime* runtime_;
};

/// Uniform random action from a discrete or box space.
Value random_action(const SpaceSpec& space, std::mt19937_64& rng);

}  // namespace cwm::planning
