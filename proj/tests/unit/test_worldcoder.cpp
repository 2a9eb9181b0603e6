#include <cmath>

#include <boost/math/special_functions/beta.hpp>
#include <doctest.h>

#include "cwm/baselines/worldcoder.hpp"
#include "cwm/llm/mock_backend.hpp"
#include "cwm/sandbox/native_runtime.hpp"

using namespace cwm;
using namespace cwm::baselines;

namespace {

BanditArm arm(double a, double b) {
  BanditArm x;
  x.alpha = a;
  x.beta = b;
  return x;
}

// P(X > Y) for independent X ~ Beta(a1, b1), Y ~ Beta(a2, b2), by midpoint
// integration of F_Y(x) f_X(x).
double prob_first_wins(double a1, double b1, double a2, double b2) {
  const int n = 20000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = (i + 0.5) / n;
    sum += boost::math::ibeta(a2, b2, x) * boost::math::ibeta_derivative(a1, b1, x);
  }
  return sum / n;
}

EnvTask lineworld_task() {
  EnvTask t;
  t.name = "lineworld";
  t.description = "A line.";
  t.action_space = SpaceSpec::discrete(2);
  t.observation_space = SpaceSpec::discrete(10);
  for (int s = 0; s < 9; ++s) {
    t.buffer.transitions.push_back({Value::of(s), Value::of(1), s + 1 == 9 ? 1.0 : 0.0, Value::of(s + 1), s + 1 == 9});
  }
  return t;
}

struct Run {
  std::shared_ptr<llm::MockBackend> backend;
  WorldCoderResult result;
};

Run run(std::vector<llm::ScriptRecord> script, int budget, std::uint64_t seed = 0) {
  auto task = lineworld_task();
  Run out;
  out.backend = std::make_shared<llm::MockBackend>(std::move(script));
  llm::Gateway gateway(out.backend);
  sandbox::NativeRuntime runtime;
  WorldCoderConfig config;
  config.budget = budget;
  config.seed = seed;
  out.result = worldcoder_search(search::TaskView(task), config, gateway, runtime);
  return out;
}

const std::string kHalfRight = "# cwm-native: offset delta=1\n```\n";

}  // namespace

TEST_CASE("beta priors from scores") {
  CHECK(beta_init(1.0, 5.0) == std::pair<double, double>{6.0, 1.0});
  CHECK(beta_init(0.0, 5.0) == std::pair<double, double>{1.0, 6.0});
  CHECK(beta_init(0.5, 5.0) == std::pair<double, double>{3.5, 3.5});
  CHECK_THROWS_AS(beta_init(1.5, 5.0), ValidationError);
}

TEST_CASE("beta draws follow the beta distribution") {
  std::mt19937_64 rng(1);
  for (auto [a, b] : {std::pair{6.0, 1.0}, std::pair{1.0, 6.0}, std::pair{3.5, 3.5}, std::pair{0.5, 2.0}}) {
    const int n = 20000;
    std::vector<double> draws;
    for (int i = 0; i < n; ++i) draws.push_back(sample_beta(a, b, rng));
    for (double p : {0.1, 0.25, 0.5, 0.75, 0.9}) {
      const double q = boost::math::ibeta_inv(a, b, p);
      const double below = static_cast<double>(std::count_if(draws.begin(), draws.end(), [&](double x) { return x <= q; })) / n;
      CHECK(std::fabs(below - p) < 0.015);
    }
  }
}

TEST_CASE("thompson sampling") {
  std::mt19937_64 rng(7);
  std::vector<BanditArm> one{arm(1, 1)};
  CHECK(thompson_select(one, rng) == 0);
  CHECK_THROWS_AS(thompson_select(std::vector<BanditArm>{}, rng), ValidationError);

  std::vector<BanditArm> two{arm(6, 1), arm(1, 6)};
  int first = 0;
  for (int i = 0; i < 10000; ++i) first += thompson_select(two, rng) == 0;
  const double rate = first / 10000.0;
  CHECK(rate > 0.95);
  // P(X <= Y) = integral of 6x^5 (1-x)^6 = 6 B(6, 7) = 1/924.
  const double exact = prob_first_wins(6, 1, 1, 6);
  CHECK(exact == doctest::Approx(1.0 - 1.0 / 924.0).epsilon(1e-6));
  CHECK(std::fabs(rate - exact) < 0.02);

  std::vector<BanditArm> same{arm(3.5, 3.5), arm(3.5, 3.5)};
  first = 0;
  for (int i = 0; i < 10000; ++i) first += thompson_select(same, rng) == 0;
  CHECK(first / 10000.0 > 0.48);
  CHECK(first / 10000.0 < 0.52);
}

TEST_CASE("bandit updates") {
  auto a = arm(3.5, 3.5);
  beta_update(a, 0.8, 0.5);
  CHECK(a.alpha == 4.5);
  CHECK(a.beta == 3.5);
  beta_update(a, 0.2, 0.5);
  CHECK(a.beta == 4.5);
  beta_update(a, 0.5, 0.5);
  CHECK(a.beta == 5.5);
  CHECK(a.alpha == 4.5);
}

TEST_CASE("budget one returns the single generated program") {
  auto r = run({{ActionType::generate, std::nullopt, kHalfRight}}, 1);
  REQUIRE(r.result.trace.expansions.size() == 1);
  CHECK(r.result.trace.expansions[0].action == ActionType::generate);
  CHECK(r.result.program == "# cwm-native: offset delta=1");
  CHECK(r.result.trace.method == "worldcoder");
  CHECK(r.result.arms.size() == 1);
}

TEST_CASE("a perfect improvement ends the run at call two") {
  auto r = run({{ActionType::generate, std::nullopt, kHalfRight},
                {ActionType::improve, std::nullopt, "```python\n# cwm-native: lineworld\n```\n"}},
               20);
  CHECK(r.result.trace.llm_calls_used == 2);
  CHECK(r.result.trace.termination == search::Termination::solved);
  CHECK(r.result.best_eval->value == 1.0);
  CHECK(r.backend->requests()[1].action == ActionType::improve);
  CHECK(r.backend->requests()[1].prompt.user.find("offset delta=1") != std::string::npos);
}

TEST_CASE("buggy arms get the fix prompt") {
  auto r = run({{ActionType::generate, std::nullopt, "# cwm-native: step-error at=2\n```\n"},
                {ActionType::fix, std::nullopt, "```python\n# cwm-native: lineworld\n```\n"}},
               5);
  REQUIRE(r.backend->calls() == 2);
  CHECK(r.backend->requests()[1].action == ActionType::fix);
  CHECK(r.backend->requests()[1].prompt.user.find("ZeroDivisionError") != std::string::npos);
  CHECK(r.result.trace.termination == search::Termination::solved);
}

TEST_CASE("the arm pool grows by one per call and is seed-deterministic") {
  std::vector<llm::ScriptRecord> script{{ActionType::generate, std::nullopt, kHalfRight},
                                        {ActionType::improve, std::nullopt, "```python\n# cwm-native: offset delta=0\n```\n"},
                                        {ActionType::fix, std::nullopt, "```python\n# cwm-native: offset delta=1\n```\n"}};
  auto a = run(script, 15, 3);
  auto b = run(script, 15, 3);
  CHECK(a.result.arms.size() == 15);
  CHECK(search::trace_to_json(a.result.trace).dump() == search::trace_to_json(b.result.trace).dump());
  // Every call after the first updates exactly one arm's posterior.
  double pseudo = 0.0;
  for (const auto& x : a.result.arms) pseudo += x.alpha + x.beta - 2.0 - 5.0;
  CHECK(pseudo == doctest::Approx(14.0));
}
