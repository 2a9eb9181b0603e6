#include <doctest.h>

#include "cwm/fixtures/fixtures.hpp"
#include "cwm/llm/mock_backend.hpp"
#include "cwm/sandbox/native_runtime.hpp"
#include "cwm/search/gif_mcts.hpp"
#include "support.hpp"

using namespace cwm;
using namespace cwm::search;

namespace {

EnvTask lineworld() {
  EnvTask t;
  t.name = "lineworld";
  t.description = "A line of ten cells; reach cell 9.";
  t.action_space = SpaceSpec::discrete(2);
  t.observation_space = SpaceSpec::discrete(10);
  t.buffer.transitions = fixtures::transition_table(fixtures::LineWorld());
  return t;
}

SearchResult scripted(const std::string& script, SearchConfig config) {
  auto task = lineworld();
  llm::Gateway gateway(llm::MockBackend::from_file(test::fixtures_dir() / "scripts" / script));
  sandbox::NativeRuntime runtime;
  return run_search(TaskView(task), config, gateway, runtime);
}

SearchConfig with_budget(int budget) {
  SearchConfig c;
  c.budget = budget;
  return c;
}

// Generate #0 is close to right, everything after it is poor, so the search
// has a promising node worth refining.
SearchResult varied(SearchConfig config) {
  auto wrong = [](const std::string& tail) { return "# cwm-native: constant state=-1 reward=0 done=true\n" + tail; };
  std::vector<llm::ScriptRecord> script{
      {ActionType::generate, 0, "# cwm-native: lineworld size=10 goal=8\n```\n"},
      {ActionType::generate, std::nullopt, wrong("```\n")},
      {ActionType::improve, std::nullopt, "```python\n" + wrong("```\n")},
      {ActionType::fix, std::nullopt, "```python\n" + wrong("```\n")},
  };
  auto task = lineworld();
  llm::Gateway gateway(std::make_shared<llm::MockBackend>(script));
  sandbox::NativeRuntime runtime;
  return run_search(TaskView(task), config, gateway, runtime);
}

int count(const SearchTrace& trace, ActionType action) {
  int n = 0;
  for (const auto& e : trace.expansions) n += e.action == action;
  return n;
}

}  // namespace

TEST_CASE("the search stops as soon as a perfect program appears") {
  auto r = scripted("lineworld_e2e.jsonl", with_budget(10));
  CHECK(r.trace.llm_calls_used == 3);
  CHECK(r.trace.termination == Termination::solved);
  CHECK(r.trace.best_value == 1.0);
  REQUIRE(r.best_eval.has_value());
  CHECK(r.best_eval->value == 1.0);
  CHECK(r.program == read_file(test::fixtures_dir() / "lineworld" / "program.py"));
  CHECK(r.trace.expansions.size() == 3);
}

TEST_CASE("identical generate scores keep the search at the root") {
  // Every generate scores 1/3, so the global generate mean (pulled up by its
  // 0.5 prior) always beats descending into a 1/3 child.
  auto r = scripted("lineworld_never.jsonl", with_budget(20));
  for (const auto& e : r.trace.expansions) {
    CHECK(e.action == ActionType::generate);
    CHECK(e.parent == 0);
  }
}

TEST_CASE("repeated runs produce identical traces") {
  const std::string first = trace_to_json(scripted("lineworld_e2e.jsonl", with_budget(10)).trace).dump();
  for (int i = 0; i < 4; ++i) CHECK(trace_to_json(scripted("lineworld_e2e.jsonl", with_budget(10)).trace).dump() == first);
  const std::string longer = trace_to_json(varied(with_budget(30)).trace).dump();
  CHECK(trace_to_json(varied(with_budget(30)).trace).dump() == longer);
}

TEST_CASE("a budget of one expands the root once") {
  auto r = scripted("lineworld_never.jsonl", with_budget(1));
  REQUIRE(r.trace.expansions.size() == 1);
  const auto& e = r.trace.expansions[0];
  CHECK(e.action == ActionType::generate);
  CHECK(e.parent == 0);
  CHECK(e.path == std::vector<std::size_t>{0});
  CHECK(r.trace.termination == Termination::budget);
  CHECK(r.tree.size() == 2);
}

TEST_CASE("the budget is spent exactly when nothing solves the task") {
  auto r = varied(with_budget(40));
  CHECK(r.trace.llm_calls_used == 40);
  CHECK(r.tree.size() == 41);
  CHECK(r.trace.termination == Termination::budget);
  CHECK(r.trace.best_value < 1.0);
}

TEST_CASE("ablations remove their action") {
  auto r = scripted("lineworld_never.jsonl", apply_ablation(with_budget(50), "no-improve"));
  CHECK(r.trace.llm_calls_used == 50);
  CHECK(count(r.trace, ActionType::improve) == 0);

  r = varied(apply_ablation(with_budget(30), "no-generate"));
  // The root still has to generate something; nothing else does.
  for (const auto& e : r.trace.expansions) {
    if (e.action == ActionType::generate) CHECK(e.parent == 0);
  }
  CHECK(count(r.trace, ActionType::improve) > 0);

  CHECK(apply_ablation(SearchConfig{}, "no-fix").enabled_actions ==
        std::vector<ActionType>{ActionType::generate, ActionType::improve});
  CHECK_THROWS_AS(apply_ablation(SearchConfig{}, "no-thing"), ValidationError);
}

TEST_CASE("fix expansions repair buggy programs") {
  std::vector<llm::ScriptRecord> script{
      {ActionType::generate, std::nullopt, "# cwm-native: step-error at=3\n```\n"},
      {ActionType::fix, std::nullopt, "```python\n# cwm-native: lineworld\n```\n"},
  };
  auto task = lineworld();
  llm::Gateway gateway(std::make_shared<llm::MockBackend>(script));
  sandbox::NativeRuntime runtime;
  auto r = run_search(TaskView(task), with_budget(10), gateway, runtime);
  REQUIRE(r.trace.expansions.size() == 2);
  CHECK(r.trace.expansions[0].is_buggy);
  CHECK(r.trace.expansions[0].error_class == ErrorClass::runtime);
  CHECK(r.trace.expansions[1].action == ActionType::fix);
  CHECK(r.trace.termination == Termination::solved);
  CHECK(r.tree.node(1).fixed);
}

TEST_CASE("buggy children are kept out of the backups") {
  auto task = lineworld();
  llm::Gateway gateway(llm::MockBackend::sequence({"def (\n```\n"}));
  sandbox::NativeRuntime runtime;
  auto r = run_search(TaskView(task), with_budget(1), gateway, runtime);
  CHECK(r.tree.node(0).value_count == 0);
  CHECK(r.program.empty());
  CHECK_FALSE(r.trace.best_node.has_value());
}

TEST_CASE("a failing gateway aborts and keeps what was found") {
  auto task = lineworld();
  llm::Gateway gateway(llm::MockBackend::sequence({"# cwm-native: offset delta=0\n```\n"}));
  sandbox::NativeRuntime runtime;
  auto r = run_search(TaskView(task), with_budget(10), gateway, runtime);
  CHECK(r.trace.termination == Termination::aborted);
  CHECK(r.trace.llm_calls_used == 1);
  CHECK_FALSE(r.trace.abort_reason.empty());
  CHECK(r.trace.best_node == std::optional<std::size_t>(1));
  CHECK(r.program == "# cwm-native: offset delta=0\n");
}

TEST_CASE("best node") {
  SearchTree t(SearchConfig{});
  CHECK_FALSE(best_node(t).has_value());
  SearchNode a;
  a.eval_value = 0.4;
  SearchNode b;
  b.eval_value = 0.4;
  SearchNode bad;
  bad.is_buggy = true;
  bad.eval_value = 0.9;
  t.attach(0, 0, a);
  t.attach(0, 1, b);
  t.attach(0, 2, bad);
  CHECK(best_node(t) == std::optional<NodeId>(1));
}

TEST_CASE("stdin/stdout problems search the same way") {
  IOProblem p;
  p.name = "apps_sum";
  p.statement = "Print the sum.";
  p.tests = {{"1 2\n", "3\n"}, {"5 5\n", "10\n"}};
  p.improve_eligible = 1;
  llm::Gateway gateway(llm::MockBackend::from_file(test::fixtures_dir() / "scripts" / "apps_sum.jsonl"));
  sandbox::NativeRuntime runtime;
  auto r = run_search(TaskView(p), with_budget(5), gateway, runtime);
  CHECK(r.trace.termination == Termination::solved);
  CHECK(r.best_eval->value == 1.0);
  CHECK(r.trace.llm_calls_used == 2);
}

TEST_CASE("invalid configurations are rejected") {
  auto task = lineworld();
  llm::Gateway gateway(llm::MockBackend::sequence({}));
  sandbox::NativeRuntime runtime;
  SearchConfig c;
  c.budget = 0;
  CHECK_THROWS_AS(run_search(TaskView(task), c, gateway, runtime), ValidationError);
  c = SearchConfig{};
  c.enabled_actions.clear();
  CHECK_THROWS_AS(c.validate(), ValidationError);
}
