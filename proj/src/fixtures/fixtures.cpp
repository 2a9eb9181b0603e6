#include "cwm/fixtures/fixtures.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace cwm::fixtures {

namespace {

int discrete_input(const SpaceSpec& space, const Value& v, std::string_view what) {
  if (auto why = space.violation(v); !why.empty()) {
    throw std::invalid_argument(fmt::format("invalid {}: {}", what, why));
  }
  return static_cast<int>(v.elems.front());
}

}  // namespace

LineWorld::LineWorld(int size, int goal) : size_(size), goal_(goal) {
  if (size < 2 || goal < 0 || goal >= size) {
    throw std::invalid_argument(fmt::format("bad LineWorld(size={}, goal={})", size, goal));
  }
}

Prediction LineWorld::step(const Value& state, const Value& action) const {
  int pos = discrete_input(observation_space(), state, "state");
  int act = discrete_input(action_space(), action, "action");
  pos = act == 0 ? std::max(pos - 1, 0) : std::min(pos + 1, size_ - 1);
  bool done = pos == goal_;
  return Prediction{Value::of(static_cast<double>(pos)), done ? 1.0 : 0.0, done};
}

Prediction MiniCliff::step(const Value& state, const Value& action) const {
  int cell = discrete_input(observation_space(), state, "state");
  int act = discrete_input(action_space(), action, "action");
  int row = cell / kCols;
  int col = cell % kCols;
  switch (act) {
    case 0: row = std::max(row - 1, 0); break;
    case 1: col = std::min(col + 1, kCols - 1); break;
    case 2: row = std::min(row + 1, kRows - 1); break;
    default: col = std::max(col - 1, 0); break;
  }
  int next = row * kCols + col;
  if (is_cliff(next)) return Prediction{Value::of(static_cast<double>(kStart)), -100.0, false};
  return Prediction{Value::of(static_cast<double>(next)), -1.0, next == kGoal};
}

std::unique_ptr<FixtureEnv> make_fixture(std::string_view name) {
  if (name == "lineworld") return std::make_unique<LineWorld>();
  if (name == "minicliff") return std::make_unique<MiniCliff>();
  return nullptr;
}

std::vector<Transition> transition_table(const FixtureEnv& env) {
  auto obs = env.observation_space();
  auto act = env.action_space();
  if (!obs.is_discrete() || !act.is_discrete()) {
    throw std::invalid_argument("transition tables need discrete spaces");
  }
  std::vector<Transition> table;
  for (std::int64_t s = 0; s < obs.as_discrete().n; ++s) {
    for (std::int64_t a = 0; a < act.as_discrete().n; ++a) {
      auto sv = Value::of(static_cast<double>(s));
      auto av = Value::of(static_cast<double>(a));
      auto p = env.step(sv, av);
      table.push_back(Transition{sv, av, p.r, p.s_next, p.d});
    }
  }
  return table;
}

}  // namespace cwm::fixtures
