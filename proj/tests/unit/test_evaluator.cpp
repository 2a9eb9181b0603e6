#include <doctest.h>

#include "cwm/core/json_io.hpp"
#include "cwm/sandbox/evaluator.hpp"
#include "cwm/sandbox/native_runtime.hpp"
#include "support.hpp"

using namespace cwm;
using namespace cwm::sandbox;

namespace {

std::string program(const std::string& directive) { return "# cwm-native: " + directive + "\n"; }

EnvTask lineworld_task(std::vector<Transition> rows) {
  EnvTask t;
  t.name = "lineworld";
  t.description = "line";
  t.action_space = SpaceSpec::discrete(2);
  t.observation_space = SpaceSpec::discrete(10);
  t.buffer.transitions = std::move(rows);
  return t;
}

Transition row(int s, int a, double r, int s2, bool d) { return {Value::of(s), Value::of(a), r, Value::of(s2), d}; }

}  // namespace

TEST_CASE("world-model programs score their accuracy") {
  NativeRuntime rt;
  auto task = lineworld_task({row(2, 1, 0, 3, false), row(8, 1, 1, 9, true)});
  auto e = evaluate_cwm_program(rt, program("lineworld"), task);
  CHECK(e.value == 1.0);
  CHECK_FALSE(e.buggy());
  REQUIRE(e.report.has_value());
  CHECK(e.report->outcomes.size() == 2);

  // Offset +1 gets the state of the first row right and nothing else of the
  // second except the state: (3/3 + 1/3 ... ) worked out per component.
  e = evaluate_cwm_program(rt, program("offset delta=1"), task);
  // row 1: state 3 ok, reward 0 ok, done false ok -> 1; row 2: state 9 ok, reward 0 vs 1 no, done no -> 1/3
  CHECK(e.value == doctest::Approx((1.0 + 1.0 / 3.0) / 2.0));
  CHECK(e.report->first_mismatch == std::optional<std::size_t>(1));
}

TEST_CASE("a program that matches half the buffer scores one half") {
  NativeRuntime rt;
  // Constant (0, 0, false) is right on every component of the first two rows
  // and wrong on every component of the last two.
  auto task = lineworld_task({row(1, 0, 0, 0, false), row(0, 0, 0, 0, false), row(8, 1, 1, 9, true), row(8, 1, 1, 9, true)});
  auto e = evaluate_cwm_program(rt, program("constant state=0 reward=0 done=false"), task);
  CHECK(e.value == 0.5);
}

TEST_CASE("any execution error makes the program buggy") {
  NativeRuntime rt;
  auto task = lineworld_task({row(2, 1, 0, 3, false), row(4, 1, 0, 5, false)});
  auto e = evaluate_cwm_program(rt, program("step-error at=4"), task);
  CHECK(e.buggy());
  CHECK(e.value == 0.0);
  CHECK(e.error->message.find("ZeroDivisionError") != std::string::npos);

  e = evaluate_cwm_program(rt, "def (", task);
  CHECK(e.buggy());
  CHECK(e.error->cls == ErrorClass::syntax);
  CHECK_FALSE(e.report.has_value());
}

TEST_CASE("stdin/stdout programs score the fraction of passed tests") {
  NativeRuntime rt;
  IOProblem p;
  p.name = "sum";
  p.tests = {{"1 2\n", "3\n"}, {"5\n", "5\n"}, {"2 2\n", "4\n"}};
  p.improve_eligible = 2;

  auto e = evaluate_io_program(rt, program("io-sum"), p);
  CHECK(e.value == 1.0);
  CHECK_FALSE(e.buggy());

  e = evaluate_io_program(rt, program("io-echo"), p);
  CHECK(e.value == doctest::Approx(1.0 / 3.0));
  CHECK_FALSE(e.buggy());
  CHECK(e.tests[0].status == UnitTestResult::Status::wrong_output);
  CHECK(e.tests[1].passed());

  e = evaluate_io_program(rt, program("io-silent"), p);
  CHECK(e.value == 0.0);
  CHECK_FALSE(e.buggy());

  e = evaluate_io_program(rt, program("io-loop"), p, 0.1);
  CHECK(e.buggy());
  CHECK(e.tests[0].status == UnitTestResult::Status::timeout);

  e = evaluate_io_program(rt, program("io-error"), p);
  CHECK(e.buggy());
  CHECK(e.tests[0].status == UnitTestResult::Status::error);
}
