#include <map>
#include <stdexcept>
#include <tuple>

#include <doctest.h>

#include "cwm/core/json_io.hpp"
#include "cwm/fixtures/fixtures.hpp"
#include "support.hpp"

using namespace cwm;
using cwm::fixtures::LineWorld;
using cwm::fixtures::MiniCliff;

namespace {

constexpr int kCliff = -1;

// Successor of each cell under up, right, down, left, worked out by hand.
// kCliff marks a move into the cliff (back to 8 with -100).
constexpr int kMiniCliffNext[12][4] = {
    {0, 1, 4, 0},           {1, 2, 5, 0},           {2, 3, 6, 1},       {3, 3, 7, 2},
    {0, 5, 8, 4},           {1, 6, kCliff, 4},      {2, 7, kCliff, 5},  {3, 7, 11, 6},
    {4, kCliff, 8, 8},      {5, kCliff, kCliff, 8}, {6, 11, kCliff, kCliff}, {7, 11, 11, kCliff},
};

std::map<std::pair<int, int>, Transition> buffer_rows(const std::string& env) {
  std::map<std::pair<int, int>, Transition> rows;
  auto text = read_file(test::fixtures_dir() / env / "buffer.jsonl");
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    auto t = transition_from_json(json::parse(text.substr(start, nl - start)));
    rows[{static_cast<int>(t.s.elems[0]), static_cast<int>(t.a.elems[0])}] = t;
    start = nl + 1;
  }
  return rows;
}

}  // namespace

TEST_CASE("LineWorld moves, clamps and pays at the goal") {
  LineWorld env;
  CHECK(env.step(Value::of(2), Value::of(1)) == Prediction{Value::of(3), 0.0, false});
  CHECK(env.step(Value::of(2), Value::of(0)) == Prediction{Value::of(1), 0.0, false});
  CHECK(env.step(Value::of(0), Value::of(0)) == Prediction{Value::of(0), 0.0, false});
  CHECK(env.step(Value::of(8), Value::of(1)) == Prediction{Value::of(9), 1.0, true});
  CHECK(env.step(Value::of(9), Value::of(1)) == Prediction{Value::of(9), 1.0, true});
  CHECK_THROWS_AS(env.step(Value::of(2), Value::of(2)), std::invalid_argument);
  CHECK_THROWS_AS(env.step(Value::of(10), Value::of(0)), std::invalid_argument);
  CHECK_THROWS_AS(LineWorld(5, 5), std::invalid_argument);

  LineWorld short_line(4, 3);
  CHECK(short_line.step(Value::of(2), Value::of(1)).d);
}

TEST_CASE("MiniCliff matches the hand-written table on all 48 pairs") {
  MiniCliff env;
  int checked = 0;
  for (int s = 0; s < 12; ++s) {
    for (int a = 0; a < 4; ++a) {
      auto p = env.step(Value::of(s), Value::of(a));
      int want = kMiniCliffNext[s][a];
      if (want == kCliff) {
        CHECK(p == Prediction{Value::of(8), -100.0, false});
      } else {
        CHECK(p == Prediction{Value::of(want), -1.0, want == 11});
      }
      ++checked;
    }
  }
  CHECK(checked == 48);
}

TEST_CASE("transition tables cover every pair: 20 + 48 = 68") {
  auto lw = fixtures::transition_table(LineWorld{});
  auto mc = fixtures::transition_table(MiniCliff{});
  CHECK(lw.size() == 20);
  CHECK(mc.size() == 48);
  for (const auto& t : lw) {
    int s = static_cast<int>(t.s.elems[0]);
    int a = static_cast<int>(t.a.elems[0]);
    int want = a == 0 ? std::max(s - 1, 0) : std::min(s + 1, 9);
    CHECK(t.s_next == Value::of(want));
    CHECK(t.d == (want == 9));
  }
  CHECK(fixtures::make_fixture("lineworld") != nullptr);
  CHECK(fixtures::make_fixture("cartpole") == nullptr);
}

TEST_CASE("fixture buffers agree with the native dynamics") {
  for (const char* name : {"lineworld", "minicliff"}) {
    auto env = fixtures::make_fixture(name);
    auto rows = buffer_rows(name);
    CHECK(rows.size() == fixtures::transition_table(*env).size());
    for (const auto& [key, t] : rows) {
      auto p = env->step(t.s, t.a);
      CHECK(p.s_next == t.s_next);
      CHECK(p.r == t.r);
      CHECK(p.d == t.d);
    }
  }
}
