// Acceptance gate: one PASS/FAIL line per headline criterion. Everything runs
// in-process against the native runtime, the fixtures and scripted mock
// gateways. Tolerances are pinned below.
//
// Usage: acceptance [--known-failure NAME]...
// A known failure still prints FAIL; it is only left out of the exit code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>
#include <unistd.h>

#include "cwm/baselines/worldcoder.hpp"
#include "cwm/bench/commands.hpp"
#include "cwm/bench/manifest.hpp"
#include "cwm/bench/results.hpp"
#include "cwm/core/json_io.hpp"
#include "cwm/core/metrics.hpp"
#include "cwm/fixtures/fixtures.hpp"
#include "cwm/llm/mock_backend.hpp"
#include "cwm/planning/cem_planner.hpp"
#include "cwm/planning/episodes.hpp"
#include "cwm/sandbox/native_runtime.hpp"
#include "cwm/search/gif_mcts.hpp"
#include "cwm/search/tree.hpp"
#include "cwm/search/uct.hpp"

using namespace cwm;
namespace fs = std::filesystem;

namespace {

constexpr double kAccuracyTol = 1e-12;
constexpr double kAccuracySeconds = 1.0;
constexpr double kNormalizedTarget = 1.0092;
constexpr double kNormalizedTol = 5e-4;
constexpr double kE2eSeconds = 10.0;
constexpr double kThompsonRate = 0.95;
constexpr double kThompsonTol = 0.02;
constexpr double kCemTol = 1e-2;
constexpr double kCemSeconds = 30.0;
constexpr int kMctsSeeds = 50;

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt_double(double x, int precision = 6) {
  std::ostringstream os;
  os.precision(precision);
  os << x;
  return os.str();
}

fs::path fixtures_dir() { return CWM_FIXTURES_DIR; }

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("cwm-acceptance-" + std::to_string(::getpid()) + "-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

EnvTask lineworld_task() {
  EnvTask t;
  t.name = "lineworld";
  t.description = "A line of ten cells; reach cell 9.";
  t.action_space = SpaceSpec::discrete(2);
  t.observation_space = SpaceSpec::discrete(10);
  t.buffer.transitions = fixtures::transition_table(fixtures::LineWorld());
  return t;
}

// ---------------------------------------------------------------------------

Verdict accuracy_oracle() {
  std::mt19937_64 rng(11);
  std::bernoulli_distribution coin(0.5), err(0.1);
  std::uniform_int_distribution<int> len(1, 80);
  double worst = 0.0;
  const auto t0 = Clock::now();
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<PredictionOutcome> xs(static_cast<std::size_t>(len(rng)));
    long matched = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      auto& o = xs[i];
      o.index = i;
      if (err(rng)) {
        o.error = ExecError{ErrorClass::runtime, "boom", ""};
        continue;
      }
      o.state_match = coin(rng);
      o.reward_match = coin(rng);
      o.done_match = coin(rng);
      matched += o.state_match + o.reward_match + o.done_match;
    }
    const double oracle = static_cast<double>(matched) / (3.0 * static_cast<double>(xs.size()));
    worst = std::max(worst, std::fabs(compute_accuracy(xs) - oracle));
  }
  const double secs = seconds_since(t0);
  return {worst <= kAccuracyTol && secs < kAccuracySeconds,
          "max |diff| " + fmt_double(worst) + " over 1000 lists, " + fmt_double(secs, 3) + "s"};
}

Verdict normalized_fixture() {
  const double r = normalized_return(-90.2, -100.0, -1169.2);
  return {std::fabs(r - kNormalizedTarget) <= kNormalizedTol, "got " + fmt_double(r)};
}

// Grows random trees, then checks every arm chosen along the selected path
// against a scan of value + C sqrt(ln N / (n + eps)).
Verdict uct_argmax() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int mismatches = 0, checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    search::SearchConfig c;
    search::SearchTree t(c);
    search::ValueEstimator est(c);
    const int steps = 1 + static_cast<int>(unit(rng) * 30);
    for (int step = 0; step <= steps; ++step) {
      auto path = t.select(est);
      if (path.empty()) break;
      if (step == steps) {
        for (const auto& p : path) {
          const auto& n = t.node(p.node);
          std::size_t expect = 0;
          double best = -std::numeric_limits<double>::infinity();
          bool any = false;
          for (std::size_t i = 0; i < n.arms.size(); ++i) {
            const auto& arm = n.arms[i];
            int same = 0;
            for (const auto& other : n.arms) same += other.child && other.type == arm.type;
            double value;
            if (arm.child) {
              if (!t.selectable(*arm.child)) continue;
              value = t.node_value(*arm.child);
            } else if (arm.type == ActionType::fix) {
              const int k = t.node(n.chain_root).failed_fixes;
              if (k >= c.max_fixes) continue;
              value = 0.99 * (1.0 - k / 3.0);
            } else {
              value = est.estimate(arm.type, t.local_mean(n.id, arm.type));
            }
            const double s = value + c.exploration * std::sqrt(std::log(std::max(1, n.visits)) / (same + c.epsilon));
            if (!any || s > best) {
              best = s;
              expect = i;
              any = true;
            }
          }
          ++checked;
          mismatches += p.arm != expect;
        }
        break;
      }
      auto [at, arm] = path.back();
      const ActionType type = t.node(at).arms[arm].type;
      const bool bad = unit(rng) < 0.3;
      const double v = unit(rng) < 0.3 ? 0.5 : unit(rng) * 0.99;
      search::SearchNode child;
      if (bad) {
        child.is_buggy = true;
        child.error = ExecError{ErrorClass::runtime, "boom", ""};
      } else {
        child.eval_value = v;
        child.state_lines = {"x = 1"};
      }
      search::NodeId id = t.attach(at, arm, std::move(child));
      t.visit(path);
      if (!bad) t.backpropagate(id, v);
      if (type != ActionType::fix) est.update(type, est.global_mean(type), 0.5, bad ? 0.0 : v);
    }
  }
  return {mismatches == 0 && checked >= 1000,
          std::to_string(mismatches) + " mismatches in " + std::to_string(checked) + " selections over 1000 trees"};
}

Verdict buggy_schedule() {
  const std::vector<double> expect{0.99, 0.66, 0.33, 0.0};
  bool values_ok = true;
  std::string got;
  for (int k = 0; k <= 3; ++k) {
    const double v = search::buggy_temp_value(k, 3);
    got += (k ? "," : "") + fmt_double(v, 4);
    values_ok = values_ok && std::fabs(v - expect[static_cast<std::size_t>(k)]) <= 1e-12;
  }

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  search::SearchConfig c;
  search::SearchTree t(c);
  search::ValueEstimator est(c);
  int violations = 0, steps = 0;
  for (; steps < 1000; ++steps) {
    auto path = t.select(est);
    if (path.empty()) break;
    for (const auto& p : path) {
      const auto& n = t.node(p.node);
      violations += n.is_buggy && !n.fixed && t.chain_exhausted(p.node);
    }
    auto [at, arm] = path.back();
    const ActionType type = t.node(at).arms[arm].type;
    const bool bad = unit(rng) < (type == ActionType::fix ? 0.8 : 0.35);
    const double v = unit(rng) * 0.95;
    search::SearchNode child;
    if (bad) {
      child.is_buggy = true;
      child.error = ExecError{ErrorClass::runtime, "boom", ""};
    } else {
      child.eval_value = v;
      child.state_lines = {"x = 1"};
    }
    search::NodeId id = t.attach(at, arm, std::move(child));
    t.visit(path);
    if (!bad) t.backpropagate(id, v);
    if (type != ActionType::fix) est.update(type, est.global_mean(type), 0.5, bad ? 0.0 : v);
  }
  int exhausted = 0;
  for (const auto& n : t.nodes()) exhausted += n.is_buggy && t.chain_exhausted(n.id);
  return {values_ok && violations == 0 && steps == 1000 && exhausted > 0,
          "temps (" + got + "), " + std::to_string(exhausted) + " exhausted chains, " + std::to_string(violations) +
              " selections of one in " + std::to_string(steps) + " steps"};
}

Verdict end_to_end() {
  const auto t0 = Clock::now();
  std::vector<std::string> traces;
  bool stops = true;
  double accuracy = 0.0;
  int calls = 0;
  for (int i = 0; i < 5; ++i) {
    auto task = lineworld_task();
    llm::Gateway gateway(llm::MockBackend::from_file(fixtures_dir() / "scripts" / "lineworld_e2e.jsonl"));
    sandbox::NativeRuntime runtime;
    search::SearchConfig c;
    c.budget = 10;
    c.seed = 0;
    auto r = search::run_search(search::TaskView(task), c, gateway, runtime);
    calls = r.trace.llm_calls_used;
    accuracy = r.best_eval ? r.best_eval->value : 0.0;
    stops = stops && calls == 3 && r.trace.termination == search::Termination::solved && accuracy == 1.0;
    traces.push_back(search::trace_to_json(r.trace).dump(2));
  }
  const double secs = seconds_since(t0);
  const bool stable = std::all_of(traces.begin(), traces.end(), [&](const std::string& s) { return s == traces[0]; });
  return {stops && stable && secs < kE2eSeconds, "stopped at call " + std::to_string(calls) + ", accuracy " +
                                                      fmt_double(accuracy) + ", traces " +
                                                      (stable ? "identical" : "differ") + ", " + fmt_double(secs, 3) + "s"};
}

// Runs through the CLI flag. The same script without the ablation is the
// control: it must produce improves, or a zero count would prove nothing.
Verdict ablation_wiring() {
  auto improves = [](const std::vector<std::string>& extra, int& calls) {
    const auto out = scratch(extra.empty() ? "control" : "ablation");
    std::vector<std::string> args{"synthesize", "--env",    (fixtures_dir() / "lineworld").string(),
                                  "--method",   "gif-mcts", "--budget",
                                  "50",         "--seed",   "0",
                                  "--backend",  "mock:" + (fixtures_dir() / "scripts" / "lineworld_varied.jsonl").string(),
                                  "--worker",   "native",   "--out",
                                  out.string()};
    args.insert(args.end(), extra.begin(), extra.end());
    std::ostringstream so, se;
    if (bench::run_cli(args, so, se) != 0) throw std::runtime_error("synthesize failed: " + se.str());
    auto runs = bench::find_runs(out);
    if (runs.size() != 1) throw std::runtime_error("expected one run");
    auto m = bench::read_manifest(runs[0]);
    auto trace = json::parse(read_file(runs[0] / m.artifacts.at("trace")));
    calls = trace.at("llm_calls_used").get<int>();
    int n = 0;
    for (const auto& e : trace.at("expansions")) n += e.at("action") == "improve";
    fs::remove_all(out);
    return n;
  };
  int control_calls = 0, calls = 0;
  const int control = improves({}, control_calls);
  const int ablated = improves({"--ablation", "no-improve"}, calls);
  return {ablated == 0 && calls == 50 && control > 0,
          std::to_string(ablated) + " improves in " + std::to_string(calls) + " calls (control run: " +
              std::to_string(control) + ")"};
}

Verdict worldcoder_bandit() {
  using baselines::beta_init;
  const bool priors = beta_init(1.0, 5.0) == std::pair<double, double>{6.0, 1.0} &&
                      beta_init(0.0, 5.0) == std::pair<double, double>{1.0, 6.0} &&
                      beta_init(0.5, 5.0) == std::pair<double, double>{3.5, 3.5};

  std::vector<baselines::BanditArm> arms(2);
  arms[0].alpha = 6;
  arms[0].beta = 1;
  arms[1].alpha = 1;
  arms[1].beta = 6;
  std::mt19937_64 rng(7);
  int first = 0;
  for (int i = 0; i < 10000; ++i) first += baselines::thompson_select(arms, rng) == 0;
  const double rate = first / 10000.0;

  // Independent Monte Carlo oracle: Beta draws from two gammas.
  std::mt19937_64 orng(99);
  auto beta_draw = [&](double a, double b) {
    const double x = std::gamma_distribution<double>(a, 1.0)(orng);
    const double y = std::gamma_distribution<double>(b, 1.0)(orng);
    return x / (x + y);
  };
  int wins = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) wins += beta_draw(6, 1) > beta_draw(1, 6);
  const double oracle = static_cast<double>(wins) / n;

  return {priors && rate > kThompsonRate && std::fabs(rate - oracle) <= kThompsonTol,
          std::string("priors ") + (priors ? "ok" : "wrong") + ", Beta(6,1) chosen " + fmt_double(rate * 100, 4) +
              "% vs oracle " + fmt_double(oracle * 100, 4) + "%"};
}

Verdict cem_toy() {
  const std::vector<double> target{0.3, -1.2, 1.9, 0.0, -0.7, 1.1, -1.9, 0.5, 0.25, -0.05};
  planning::PlanScorer score = [&](const std::vector<double>& plan) -> std::optional<double> {
    double s = 0.0;
    for (std::size_t i = 0; i < plan.size(); ++i) s += (plan[i] - target[i]) * (plan[i] - target[i]);
    return -s;
  };
  planning::CemPlannerConfig c;
  const bool params = c.samples == 1000 && c.elites == 100 && c.iterations == 20;
  BoxSpace bounds{{-2.0}, {2.0}};
  std::mt19937_64 rng(0);
  const auto t0 = Clock::now();
  auto r = planning::cem_optimize(score, 10, bounds, c, rng);
  const double secs = seconds_since(t0);
  double worst = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) worst = std::max(worst, std::fabs(r.mean[i] - target[i]));
  const bool std_ok = r.initial_std.size() == 1 && r.initial_std[0] == 1.0;
  return {params && worst < kCemTol && std_ok && secs < kCemSeconds,
          "max |mean - p*| " + fmt_double(worst, 3) + ", initial std " +
              (r.initial_std.empty() ? std::string("?") : fmt_double(r.initial_std[0])) + ", " + fmt_double(secs, 3) +
              "s"};
}

Verdict mcts_lineworld() {
  fixtures::LineWorld env;
  planning::FixtureModel oracle(env);
  planning::MctsPolicy policy(oracle, 2, planning::MctsPlannerConfig{});
  int nine = 0, reached = 0;
  std::vector<int> lengths;
  for (int seed = 0; seed < kMctsSeeds; ++seed) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    auto e = planning::run_episode(env, policy, planning::kDefaultEpisodeSteps, rng);
    reached += e.terminated;
    nine += e.terminated && e.steps == 9;
    lengths.push_back(e.steps);
  }
  std::sort(lengths.begin(), lengths.end());

  sandbox::NativeRuntime runtime;
  auto report =
      planning::evaluate_cwm("# cwm-native: lineworld size=10 goal=9\n", env, runtime, planning::PlannerSettings{}, 10, 0);
  const bool eval_ok = report.normalized_return == 1.0 && report.standard_error == 0.0;
  return {nine == kMctsSeeds && eval_ok,
          "exactly 9 steps in " + std::to_string(nine) + "/" + std::to_string(kMctsSeeds) + " seeds (goal reached in " +
              std::to_string(reached) + ", median length " + std::to_string(lengths[lengths.size() / 2]) +
              "); ground-truth program normalized return " + fmt_double(report.normalized_return) + " ± " +
              fmt_double(report.standard_error)};
}

Verdict pass_at_twenty() {
  std::vector<bool> attempts(20, false);
  attempts[13] = true;
  bool flags[20];
  for (std::size_t i = 0; i < 20; ++i) flags[i] = attempts[i];
  const bool one = pass_at_budget(std::span<const bool>(flags, 20));
  for (auto& f : flags) f = false;
  const bool none = pass_at_budget(std::span<const bool>(flags, 20));
  return {one && !none, std::string("one success: ") + (one ? "solved" : "unsolved") +
                            ", no success: " + (none ? "solved" : "unsolved")};
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::warn);
  std::set<std::string> known;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--known-failure" && i + 1 < argc) {
      known.insert(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: acceptance [--known-failure NAME]...\n");
      return 2;
    }
  }

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"accuracy-oracle", accuracy_oracle},   {"normalized-return", normalized_fixture},
      {"uct-argmax", uct_argmax},             {"buggy-schedule", buggy_schedule},
      {"e2e-mock-synthesis", end_to_end},     {"ablation-no-improve", ablation_wiring},
      {"worldcoder-bandit", worldcoder_bandit}, {"cem-toy", cem_toy},
      {"mcts-lineworld", mcts_lineworld},     {"pass-at-budget", pass_at_twenty},
  };

  int failed = 0, excused = 0;
  for (const auto& [name, run] : criteria) {
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const bool is_known = known.count(name) > 0;
    std::printf("%s %s: %s%s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str(),
                !v.pass && is_known ? " [known failure]" : "");
    if (!v.pass) (is_known ? excused : failed) += 1;
  }
  std::printf("%zu criteria, %d failed, %d of them known\n", criteria.size(), failed + excused, excused);
  return failed == 0 ? 0 : 1;
}
