#include <doctest.h>

#include "cwm/core/json_io.hpp"
#include "cwm/fixtures/fixtures.hpp"
#include "cwm/sandbox/native_runtime.hpp"
#include "support.hpp"

using namespace cwm;
using namespace cwm::sandbox;

namespace {

const ExecError* error_of(const Fallible<Prediction>& p) { return std::get_if<ExecError>(&p); }

Prediction ok(const Fallible<Prediction>& p) {
  REQUIRE(std::holds_alternative<Prediction>(p));
  return std::get<Prediction>(p);
}

std::string program(const std::string& directive) { return "# cwm-native: " + directive + "\nclass Environment:\n    pass\n"; }

}  // namespace

TEST_CASE("directives") {
  auto d = find_directive("import math\n# cwm-native: constant state=[1,2] reward=-0.5 done=true\n");
  REQUIRE(d.has_value());
  CHECK(d->model == "constant");
  CHECK(d->get("state", "") == "[1,2]");
  CHECK(d->number("reward", 0) == -0.5);
  CHECK(d->number("absent", 7) == 7);
  CHECK_FALSE(find_directive("print(1)\n").has_value());
}

TEST_CASE("the fixture programs reproduce the fixture dynamics") {
  NativeRuntime rt;
  REQUIRE_FALSE(rt.load(read_file(test::fixtures_dir() / "lineworld" / "program.py")).has_value());
  CHECK(ok(rt.step_from(Value::of(2), Value::of(1))) == Prediction{Value::of(3), 0.0, false});
  CHECK(ok(rt.step_from(Value::of(8), Value::of(1))) == Prediction{Value::of(9), 1.0, true});
  // Deterministic: the same call gives the same answer.
  CHECK(ok(rt.step_from(Value::of(5), Value::of(0))) == ok(rt.step_from(Value::of(5), Value::of(0))));

  auto bad = rt.step_from(Value::of(2), Value::of(5));
  REQUIRE(error_of(bad));
  CHECK(error_of(bad)->cls == ErrorClass::runtime);

  for (const char* name : {"lineworld", "minicliff"}) {
    REQUIRE_FALSE(rt.load(read_file(test::fixtures_dir() / name / "program.py")).has_value());
    auto env = fixtures::make_fixture(name);
    for (const auto& t : fixtures::transition_table(*env)) {
      CHECK(ok(rt.step_from(t.s, t.a)) == Prediction{t.s_next, t.r, t.d});
    }
  }
}

TEST_CASE("plans stop at the first terminal step") {
  NativeRuntime rt;
  REQUIRE_FALSE(rt.load(program("lineworld size=10 goal=3")).has_value());
  std::vector<Value> rights(10, Value::of(1));
  auto out = rt.run_plan(Value::of(0), rights);
  CHECK_FALSE(out.error.has_value());
  REQUIRE(out.steps.size() == 3);
  CHECK(out.steps.back().d);
  double total = 0;
  for (const auto& s : out.steps) total += s.r;
  CHECK(total == 1.0);
  CHECK(rt.run_plan(Value::of(0), {}).steps.empty());

  REQUIRE_FALSE(rt.load(program("step-error at=2")).has_value());
  out = rt.run_plan(Value::of(0), rights);
  CHECK(out.steps.size() == 2);
  REQUIRE(out.error.has_value());
  CHECK(out.error->message.find("ZeroDivisionError") != std::string::npos);
}

TEST_CASE("a dozen misbehaving programs are classified") {
  struct Case {
    std::string source;
    bool at_load;
    ErrorClass cls;
    std::string fragment;
  };
  const std::vector<Case> cases{
      {"def (", true, ErrorClass::syntax, "line 1"},
      {program("syntax-error line=7"), true, ErrorClass::syntax, "line 7"},
      {program("no-such-model"), true, ErrorClass::syntax, "unknown native model"},
      {program("init-error"), true, ErrorClass::runtime, "__init__"},
      {program("missing-member name=set_state"), true, ErrorClass::runtime, "missing member set_state"},
      {program("missing-member name=step"), true, ErrorClass::runtime, "missing member step"},
      {program("lineworld size=1"), true, ErrorClass::runtime, "LineWorld"},
      {program("step-error"), false, ErrorClass::runtime, "ZeroDivisionError"},
      {program("bad-signature"), false, ErrorClass::runtime, "4 values"},
      {program("slow-step ms=5000"), false, ErrorClass::timeout, "CPU limit"},
      {program("hang"), false, ErrorClass::timeout, "CPU limit"},
      {program("crash"), false, ErrorClass::resource, "exited"},
  };
  NativeRuntime rt;
  for (const auto& c : cases) {
    CAPTURE(c.source);
    auto load_error = rt.load(c.source);
    std::optional<ExecError> error = load_error;
    if (!c.at_load) {
      REQUIRE_FALSE(load_error.has_value());
      auto p = rt.step_from(Value::of(2), Value::of(1));
      if (auto* e = error_of(p)) error = *e;
    }
    REQUIRE(error.has_value());
    CHECK(error->cls == c.cls);
    CHECK(error->message.find(c.fragment) != std::string::npos);
  }
}

TEST_CASE("predict_batch isolates failing items") {
  NativeRuntime rt;
  REQUIRE_FALSE(rt.load(program("step-error at=4")).has_value());
  std::vector<StepQuery> items{{Value::of(3), Value::of(1)}, {Value::of(4), Value::of(1)}, {Value::of(5), Value::of(0)}};
  auto out = rt.predict_batch(items);
  REQUIRE(out.size() == 3);
  CHECK(ok(out[0]) == Prediction{Value::of(4), 0.0, false});
  CHECK(error_of(out[1]));
  CHECK(ok(out[2]) == Prediction{Value::of(4), 0.0, false});
}

TEST_CASE("continuous and constant models") {
  NativeRuntime rt;
  REQUIRE_FALSE(rt.load(program("pointmass dim=2 bound=1")).has_value());
  auto p = ok(rt.step_from(Value::of({0.5, -0.5}), Value::of({1.0, 0.25})));
  CHECK(p.s_next == Value::of({1.0, -0.25}));
  CHECK(p.r == doctest::Approx(-(1.0 + 0.0625)));
  CHECK(error_of(rt.step_from(Value::of({0.0}), Value::of({0.0}))));

  REQUIRE_FALSE(rt.load(program("constant state=-1 reward=0 done=true")).has_value());
  CHECK(ok(rt.step_from(Value::of(3), Value::of(0))) == Prediction{Value::of(-1), 0.0, true});
  REQUIRE_FALSE(rt.load(program("offset delta=2")).has_value());
  CHECK(ok(rt.step_from(Value::of(3), Value::of(0))) == Prediction{Value::of(5), 0.0, false});
}

TEST_CASE("stdin/stdout programs") {
  NativeRuntime rt;
  auto run = [&](const std::string& directive, const std::string& input) {
    return rt.run_io(program(directive), {input}, 0.5).front();
  };
  CHECK(std::get<std::string>(run("io-echo", "5")) == "5\n");
  CHECK(std::get<std::string>(run("io-sum", "1 2 3\n")) == "6\n");
  CHECK(std::get<std::string>(run("io-silent", "1")).empty());
  CHECK(std::get<std::string>(run("io-const text=hi", "")) == "hi\n");
  CHECK(std::get<ExecError>(run("io-loop", "")).cls == ErrorClass::timeout);
  CHECK(std::get<ExecError>(run("io-error", "")).cls == ErrorClass::runtime);
  CHECK(std::get<ExecError>(rt.run_io("print(1)", {"x"}, 1.0).front()).cls == ErrorClass::syntax);
}
