#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "cwm/core/types.hpp"

namespace cwm::fixtures {

/// A small deterministic reference environment. `step` is a pure function of
/// (state, action); out-of-space inputs throw std::invalid_argument.
class FixtureEnv {
 public:
  virtual ~FixtureEnv() = default;

  virtual std::string_view name() const = 0;
  virtual SpaceSpec action_space() const = 0;
  virtual SpaceSpec observation_space() const = 0;
  virtual Value initial_state() const = 0;
  virtual Prediction step(const Value& state, const Value& action) const = 0;
};

/// Positions 0..size-1 on a line. Action 0 moves left, 1 moves right (both
/// clamp at the ends). Reaching `goal` pays +1 and ends the episode.
class LineWorld final : public FixtureEnv {
 public:
  explicit LineWorld(int size = 10, int goal = 9);

  std::string_view name() const override { return "lineworld"; }
  SpaceSpec action_space() const override { return SpaceSpec::discrete(2); }
  SpaceSpec observation_space() const override { return SpaceSpec::discrete(size_); }
  Value initial_state() const override { return Value::of(0.0); }
  Prediction step(const Value& state, const Value& action) const override;

  int size() const { return size_; }
  int goal() const { return goal_; }

 private:
  int size_;
  int goal_;
};

/// A 3x4 cliff-walking grid, cells numbered row-major. Start is 8 (bottom
/// left), goal is 11 (bottom right), cells 9 and 10 are the cliff. Actions:
/// 0 up, 1 right, 2 down, 3 left; moves clamp at the walls. Every move costs
/// -1; entering the cliff costs -100 and teleports back to the start without
/// ending the episode; entering the goal ends it.
class MiniCliff final : public FixtureEnv {
 public:
  static constexpr int kRows = 3;
  static constexpr int kCols = 4;
  static constexpr int kStart = 8;
  static constexpr int kGoal = 11;

  std::string_view name() const override { return "minicliff"; }
  SpaceSpec action_space() const override { return SpaceSpec::discrete(4); }
  SpaceSpec observation_space() const override { return SpaceSpec::discrete(kRows * kCols); }
  Value initial_state() const override { return Value::of(static_cast<double>(kStart)); }
  Prediction step(const Value& state, const Value& action) const override;

  static bool is_cliff(int cell) { return cell == 9 || cell == 10; }
};

/// "lineworld" or "minicliff"; nullptr for anything else.
std::unique_ptr<FixtureEnv> make_fixture(std::string_view name);

/// Every (state, action) pair of a discrete fixture with its successor.
std::vector<Transition> transition_table(const FixtureEnv& env);

}  // namespace cwm::fixtures
