#include "cwm/bench/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <mutex>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "cwm/baselines/worldcoder.hpp"
#include "cwm/baselines/zero_shot.hpp"
#include "cwm/bench/ingest.hpp"
#include "cwm/bench/manifest.hpp"
#include "cwm/bench/results.hpp"
#include "cwm/fixtures/fixtures.hpp"
#include "cwm/llm/gateway.hpp"
#include "cwm/planning/episodes.hpp"
#include "cwm/sandbox/evaluator.hpp"
#include "cwm/sandbox/subprocess.hpp"
#include "cwm/sandbox/worker.hpp"
#include "cwm/search/gif_mcts.hpp"
#include "cwm/search/statistics.hpp"

namespace cwm::bench {

namespace fs = std::filesystem;
using clock_type = std::chrono::system_clock;

std::string default_worker_command() {
  const char* env = std::getenv("CWM_WORKER");
  return env && *env ? env : "cwm-worker";
}

namespace {

json evaluation_to_json(const sandbox::ProgramEvaluation& e) {
  json j{{"value", e.value}, {"buggy", e.buggy()}};
  j["error"] = e.error ? error_to_json(*e.error) : json(nullptr);
  if (e.report) {
    // Timings live in the manifest summary; the artifact must hash the same on a rerun.
    j["report"] = report_to_json(*e.report);
    j["report"].erase("wall_time");
  }
  if (!e.tests.empty()) {
    json tests = json::array();
    for (const auto& t : e.tests) tests.push_back(unit_result_to_json(t));
    j["tests"] = std::move(tests);
  }
  return j;
}

std::string space_kind(const EnvTask& task) { return task.action_space.is_discrete() ? "discrete" : "continuous"; }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

/// A task named on the command line, loaded up front so that bad inputs fail
/// before any LLM call is made.
struct LoadedTask {
  fs::path dir;
  std::optional<EnvTask> env;
  std::optional<IOProblem> problem;

  search::TaskView view() const { return env ? search::TaskView(*env) : search::TaskView(*problem); }
  const std::string& name() const { return env ? env->name : problem->name; }
};

std::vector<LoadedTask> load_tasks(const SynthesizeOptions& options) {
  std::vector<LoadedTask> tasks;
  for (const auto& dir : options.envs) tasks.push_back(LoadedTask{dir, ingest_environment(dir), std::nullopt});
  for (const auto& dir : options.problems) tasks.push_back(LoadedTask{dir, std::nullopt, ingest_io_problem(dir)});
  if (tasks.empty()) throw UsageError("no task given: pass --env or --problem");
  return tasks;
}

search::SearchConfig search_config(const SynthesizeOptions& options) {
  search::SearchConfig config;
  config.budget = options.budget;
  config.seed = options.seed;
  for (const auto& ablation : options.ablations) config = search::apply_ablation(config, ablation);
  config.validate();
  return config;
}

void check_method(const std::string& method) {
  if (method != "gif-mcts" && method != "worldcoder" && method != "zero-shot-cot") {
    throw UsageError(fmt::format("unknown method '{}' (expected gif-mcts, worldcoder or zero-shot-cot)", method));
  }
}

RunManifest base_manifest(const std::string& method, const LoadedTask& task) {
  RunManifest m;
  m.method = method;
  m.task = task.name();
  m.task_kind = task.env ? "cwm" : "io";
  m.space_kind = task.env ? space_kind(*task.env) : "";
  return m;
}

struct SynthesisOutput {
  std::string program;
  std::optional<sandbox::ProgramEvaluation> evaluation;
  search::SearchTrace trace;
  std::optional<search::StatsReport> stats;
};

SynthesisOutput synthesize_one(const LoadedTask& task, const SynthesizeOptions& options,
                               const search::SearchConfig& config, llm::Gateway& gateway,
                               sandbox::ProgramRuntime& runtime) {
  SynthesisOutput out;
  if (options.method == "gif-mcts") {
    auto result = search::run_search(task.view(), config, gateway, runtime);
    out.stats = search::tree_statistics(result.tree, search::best_node(result.tree));
    out.program = std::move(result.program);
    out.evaluation = std::move(result.best_eval);
    out.trace = std::move(result.trace);
  } else if (options.method == "worldcoder") {
    baselines::WorldCoderConfig wc;
    wc.budget = options.budget;
    wc.seed = options.seed;
    wc.evaluation = config;
    auto result = baselines::worldcoder_search(task.view(), wc, gateway, runtime);
    out.program = std::move(result.program);
    out.evaluation = std::move(result.best_eval);
    out.trace = std::move(result.trace);
  } else {
    auto result = baselines::zero_shot_pass_at_k(*task.problem, options.budget, gateway, runtime, options.seed,
                                                 config.io_case_timeout);
    // Report the first solving attempt, else the best scoring one.
    const baselines::ZeroShotAttempt* pick = nullptr;
    for (const auto& a : result.attempts) {
      if (!a.program) continue;
      if (!pick || (a.solved && !pick->solved) || (!pick->solved && a.evaluation.value > pick->evaluation.value)) {
        pick = &a;
      }
    }
    if (pick) {
      out.program = *pick->program;
      out.evaluation = pick->evaluation;
    }
    out.trace = std::move(result.trace);
  }
  return out;
}

RunRecord run_synthesis_task(const LoadedTask& task, const SynthesizeOptions& options,
                             const search::SearchConfig& config, const llm::BackendConfig& backend_config,
                             sandbox::RuntimePool& pool) {
  const auto started = clock_type::now();
  const auto t0 = std::chrono::steady_clock::now();
  RunManifest manifest = base_manifest(options.method, task);
  manifest.budget = options.budget;
  manifest.seed = options.seed;
  manifest.backend = backend_config.describe();
  manifest.backend_hash = stable_hash(manifest.backend);
  manifest.config = config.to_json();
  manifest.config["ablations"] = options.ablations;
  manifest.started_at = iso_utc(started);

  llm::Gateway gateway(llm::make_backend(backend_config), {}, options.rate_limit);
  SynthesisOutput output;
  {
    auto lease = pool.acquire();
    output = synthesize_one(task, options, config, gateway, *lease);
  }

  const fs::path run_dir = make_run_dir(options.out, options.method, task.name(), started);
  write_artifact(run_dir, manifest, "program", "program.txt", output.program);
  write_artifact(run_dir, manifest, "trace", "trace.json", search::trace_to_json(output.trace).dump(2) + "\n");
  if (output.evaluation) {
    write_artifact(run_dir, manifest, "evaluation", "eval.json", evaluation_to_json(*output.evaluation).dump(2) + "\n");
  }
  if (output.stats) {
    write_artifact(run_dir, manifest, "stats", "stats.json", output.stats->to_json().dump(2) + "\n");
    write_artifact(run_dir, manifest, "stats_table", "stats.txt", output.stats->to_table());
  }

  json summary{{"llm_calls_used", output.trace.llm_calls_used},
               {"termination", std::string(search::to_string(output.trace.termination))},
               {"program_found", !output.program.empty()}};
  const double value = output.evaluation ? output.evaluation->value : 0.0;
  if (task.env) {
    summary["accuracy"] = value;
  } else {
    summary["value"] = value;
    summary["solved"] = output.evaluation && output.evaluation->value >= 1.0 && !output.evaluation->buggy();
  }
  if (output.trace.termination == search::Termination::aborted) summary["abort_reason"] = output.trace.abort_reason;
  summary["wall_seconds"] = seconds_since(t0);
  manifest.summary = summary;
  manifest.finished_at = iso_utc(clock_type::now());
  write_manifest(run_dir, manifest);

  const int code = output.trace.termination == search::Termination::aborted ? kExitFailure : kExitOk;
  return RunRecord{task.name(), run_dir, std::move(summary), code};
}

sandbox::RuntimePool make_pool(const RuntimeOptions& options, std::size_t size) {
  return sandbox::RuntimePool(size, [&] { return sandbox::make_runtime(options.worker, options.limits); });
}

CommandResult run_synthesis(const SynthesizeOptions& options, std::ostream& out) {
  check_method(options.method);
  if (options.budget < 1) throw UsageError("--budget must be at least 1");
  if (options.parallel < 1) throw UsageError("--parallel must be at least 1");
  if (options.runtime.workers < 1) throw UsageError("--workers must be at least 1");
  if (options.backend.empty()) throw UsageError("--backend is required");
  auto backend_config = llm::parse_backend_spec(options.backend);
  backend_config.validate();
  const auto config = search_config(options);
  const auto tasks = load_tasks(options);
  if (options.method == "zero-shot-cot") {
    for (const auto& t : tasks) {
      if (t.env) throw UsageError(fmt::format("zero-shot-cot only runs on --problem tasks, not '{}'", t.name()));
    }
  }

  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(options.parallel), tasks.size());
  auto pool = make_pool(options.runtime, std::max<std::size_t>(threads, static_cast<std::size_t>(options.runtime.workers)));

  std::vector<RunRecord> records(tasks.size());
  std::vector<std::string> failures(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        spdlog::info("{} on {}: budget {}, seed {}", options.method, tasks[i].name(), options.budget, options.seed);
        records[i] = run_synthesis_task(tasks[i], options, config, backend_config, pool);
      } catch (const std::exception& e) {
        failures[i] = e.what();
        records[i] = RunRecord{tasks[i].name(), {}, json::object(), kExitFailure};
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool_threads;
    for (std::size_t t = 0; t < threads; ++t) pool_threads.emplace_back(worker);
  }

  CommandResult result;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!failures[i].empty()) {
      out << fmt::format("{}: failed: {}\n", r.task, failures[i]);
    } else {
      std::string score = r.summary.contains("accuracy")
                              ? fmt::format("accuracy {:.4f}", r.summary["accuracy"].get<double>())
                              : fmt::format("value {:.4f} solved {}", r.summary["value"].get<double>(),
                                            r.summary["solved"].get<bool>());
      out << fmt::format("{}: {} after {} calls ({}) -> {}\n", r.task, score, r.summary["llm_calls_used"].get<int>(),
                         r.summary["termination"].get<std::string>(), r.run_dir.string());
    }
    result.exit_code = std::max(result.exit_code, r.exit_code);
  }
  result.runs = std::move(records);
  return result;
}

fs::path program_path(const fs::path& env, const std::optional<fs::path>& program) {
  fs::path p = program.value_or(env / "program.py");
  if (!fs::exists(p)) throw UsageError(fmt::format("missing program: {}", p.string()));
  return p;
}

}  // namespace

CommandResult cmd_synthesize(const SynthesizeOptions& options, std::ostream& out) {
  return run_synthesis(options, out);
}

CommandResult cmd_apps_eval(const SynthesizeOptions& options, std::ostream& out) {
  if (!options.envs.empty()) throw UsageError("apps-eval takes --problem directories only");
  if (options.problems.empty()) throw UsageError("no problem given: pass --problem");
  auto result = run_synthesis(options, out);
  int solved = 0;
  for (const auto& r : result.runs) solved += r.summary.value("solved", false) ? 1 : 0;
  const auto n = result.runs.size();
  out << fmt::format("strict accuracy (pass@{}): {}/{} = {:.1f}%\n", options.budget, solved, n,
                     n ? 100.0 * solved / static_cast<double>(n) : 0.0);
  return result;
}

CommandResult cmd_evaluate(const EvaluateOptions& options, std::ostream& out) {
  const auto started = clock_type::now();
  const auto t0 = std::chrono::steady_clock::now();
  const EnvTask task = ingest_environment(options.env);
  const auto path = program_path(options.env, options.program);
  const std::string source = read_file(path);

  auto runtime = sandbox::make_runtime(options.runtime.worker, options.runtime.limits);
  const auto evaluation = sandbox::evaluate_cwm_program(*runtime, source, task);

  RunManifest manifest;
  manifest.method = "evaluate";
  manifest.task = task.name;
  manifest.task_kind = "cwm";
  manifest.space_kind = space_kind(task);
  manifest.config = json{{"program", path.string()}, {"worker", options.runtime.worker},
                         {"limits", options.runtime.limits.to_json()}};
  manifest.started_at = iso_utc(started);

  const fs::path run_dir = make_run_dir(options.out, "evaluate", task.name, started);
  write_artifact(run_dir, manifest, "program", "program.txt", source);
  write_artifact(run_dir, manifest, "evaluation", "eval.json", evaluation_to_json(evaluation).dump(2) + "\n");
  json summary{{"accuracy", evaluation.value}, {"buggy", evaluation.buggy()}, {"wall_seconds", seconds_since(t0)}};
  if (evaluation.error) summary["error"] = error_to_json(*evaluation.error);
  manifest.summary = summary;
  manifest.finished_at = iso_utc(clock_type::now());
  write_manifest(run_dir, manifest);

  out << fmt::format("{}: accuracy {:.4f}{} -> {}\n", task.name, evaluation.value,
                     evaluation.error ? fmt::format(" ({} error: {})", to_string(evaluation.error->cls),
                                                    evaluation.error->message)
                                      : "",
                     run_dir.string());
  CommandResult result;
  result.runs.push_back(RunRecord{task.name, run_dir, std::move(summary), kExitOk});
  return result;
}

CommandResult cmd_plan(const PlanOptions& options, std::ostream& out) {
  const auto started = clock_type::now();
  const auto t0 = std::chrono::steady_clock::now();
  if (options.episodes < 1) throw UsageError("--plan-episodes must be at least 1");
  if (options.max_steps < 1) throw UsageError("--max-steps must be at least 1");
  const EnvTask task = ingest_environment(options.env);
  auto env = fixtures::make_fixture(task.name);
  if (!env) {
    throw UsageError(fmt::format("no reference simulator for '{}': planning needs a fixture environment", task.name));
  }
  const auto path = program_path(options.env, options.program);
  const std::string source = read_file(path);

  planning::PlannerSettings settings;
  settings.max_steps = options.max_steps;
  auto runtime = sandbox::make_runtime(options.runtime.worker, options.runtime.limits);
  planning::CwmPlanningReport report;
  try {
    report = planning::evaluate_cwm(source, *env, *runtime, settings, options.episodes, options.seed);
  } catch (const std::domain_error& e) {
    throw std::runtime_error(fmt::format("{}: cannot normalize returns: {}", task.name, e.what()));
  }

  RunManifest manifest;
  manifest.method = "plan";
  manifest.task = task.name;
  manifest.task_kind = "cwm";
  manifest.space_kind = space_kind(task);
  manifest.seed = options.seed;
  manifest.config = json{{"program", path.string()},
                         {"episodes", options.episodes},
                         {"max_steps", options.max_steps},
                         {"planner", planning::planner_for(task.action_space) == planning::PlannerKind::mcts
                                         ? settings.mcts.to_json()
                                         : settings.cem.to_json()},
                         {"worker", options.runtime.worker}};
  manifest.started_at = iso_utc(started);

  std::string episodes;
  auto dump_arm = [&](const char* arm, const std::vector<planning::EpisodeResult>& results) {
    for (std::size_t i = 0; i < results.size(); ++i) {
      json line = results[i].to_json();
      line["arm"] = arm;
      line["episode"] = i;
      line["seed"] = options.seed + i;
      episodes += line.dump() + "\n";
    }
  };
  dump_arm("cwm", report.cwm_episodes);
  dump_arm("true", report.true_episodes);
  dump_arm("random", report.random_episodes);

  const fs::path run_dir = make_run_dir(options.out, "plan", task.name, started);
  write_artifact(run_dir, manifest, "program", "program.txt", source);
  write_artifact(run_dir, manifest, "episodes", "episodes.jsonl", episodes);
  write_artifact(run_dir, manifest, "evaluation", "eval.json", report.to_json().dump(2) + "\n");
  json summary{{"normalized_return", report.normalized_return},
               {"normalized_return_error", report.standard_error},
               {"mean_return_cwm", report.mean_cwm},
               {"mean_return_true", report.mean_true},
               {"mean_return_random", report.mean_random},
               {"model_unusable", report.model_unusable},
               {"wall_seconds", seconds_since(t0)}};
  manifest.summary = summary;
  manifest.finished_at = iso_utc(clock_type::now());
  write_manifest(run_dir, manifest);

  out << fmt::format("{}: normalized return {:.4f} ± {:.4f} over {} episodes{} -> {}\n", task.name,
                     report.normalized_return, report.standard_error, options.episodes,
                     report.model_unusable ? " (model unusable)" : "", run_dir.string());
  CommandResult result;
  result.runs.push_back(RunRecord{task.name, run_dir, std::move(summary), kExitOk});
  return result;
}

CommandResult cmd_report(const ReportOptions& options, std::ostream& out) {
  std::vector<ResultRow> rows;
  for (const auto& root : options.runs) {
    if (!fs::exists(root)) throw UsageError(fmt::format("missing runs directory: {}", root.string()));
    for (const auto& dir : find_runs(root)) {
      rows.push_back(row_from_manifest(read_manifest(dir), fs::relative(dir, root).string()));
    }
  }
  if (rows.empty()) throw UsageError("no run manifests found");
  const auto table = build_results(std::move(rows));
  if (options.out) {
    fs::create_directories(*options.out);
    write_file_atomic(*options.out / "results.json", table.to_json().dump(2) + "\n");
    write_file_atomic(*options.out / "results.csv", table.to_csv());
    write_file_atomic(*options.out / "results.txt", table.to_text());
  }
  out << table.to_text();
  return CommandResult{};
}

namespace {

void add_runtime_flags(CLI::App& cmd, RuntimeOptions& runtime) {
  cmd.add_option("--worker", runtime.worker, "worker command line, or 'native' for the in-process runtime")
      ->capture_default_str();
  cmd.add_option("--workers", runtime.workers, "number of sandbox workers")->check(CLI::PositiveNumber);
  cmd.add_option("--cpu-seconds", runtime.limits.cpu_seconds_per_call, "CPU budget per sandbox call")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--memory-mb", runtime.limits.memory_cap_mb, "address-space cap per worker")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--wall-timeout", runtime.limits.wall_timeout, "wall-clock timeout per sandbox call")
      ->check(CLI::PositiveNumber);
}

void add_synthesis_flags(CLI::App& cmd, SynthesizeOptions& o, bool with_env) {
  if (with_env) cmd.add_option("--env", o.envs, "environment directory (repeatable)");
  cmd.add_option("--problem", o.problems, "stdin/stdout problem directory (repeatable)");
  cmd.add_option("--method", o.method, "gif-mcts, worldcoder or zero-shot-cot")
      ->check(CLI::IsMember({"gif-mcts", "worldcoder", "zero-shot-cot"}))
      ->capture_default_str();
  cmd.add_option("--budget", o.budget, "LLM calls per task")->capture_default_str();
  cmd.add_option("--seed", o.seed, "search seed")->capture_default_str();
  cmd.add_option("--backend", o.backend, "http:<url>#<model> or mock:<script>")->required();
  cmd.add_option("--ablation", o.ablations, "drop an action: no-generate, no-improve or no-fix")
      ->check(CLI::IsMember({"no-generate", "no-improve", "no-fix"}));
  cmd.add_option("--parallel", o.parallel, "tasks to run concurrently")->check(CLI::PositiveNumber);
  cmd.add_option("--rate-limit", o.rate_limit, "LLM requests per second per task (0 = unlimited)");
  cmd.add_option("--out", o.out, "runs directory")->capture_default_str();
  add_runtime_flags(cmd, o.runtime);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Code world model synthesis benchmark"};
  app.require_subcommand(1);

  SynthesizeOptions synth;
  auto* synthesize = app.add_subcommand("synthesize", "search for a program for each task");
  add_synthesis_flags(*synthesize, synth, true);

  SynthesizeOptions apps;
  apps.method = "gif-mcts";
  auto* apps_eval = app.add_subcommand("apps-eval", "solve stdin/stdout problems and report strict accuracy");
  add_synthesis_flags(*apps_eval, apps, false);

  EvaluateOptions eval;
  auto* evaluate = app.add_subcommand("evaluate", "score a program against an environment's buffer");
  evaluate->add_option("--env", eval.env, "environment directory")->required();
  evaluate->add_option("--program", eval.program, "program file (default <env>/program.py)");
  evaluate->add_option("--out", eval.out, "runs directory")->capture_default_str();
  add_runtime_flags(*evaluate, eval.runtime);

  PlanOptions plan_opts;
  auto* plan = app.add_subcommand("plan", "plan with a program as the model and report the normalized return");
  plan->add_option("--env", plan_opts.env, "environment directory")->required();
  plan->add_option("--program", plan_opts.program, "program file (default <env>/program.py)");
  plan->add_option("--plan-episodes", plan_opts.episodes, "episodes per arm")->capture_default_str();
  plan->add_option("--max-steps", plan_opts.max_steps, "episode step cap")->capture_default_str();
  plan->add_option("--seed", plan_opts.seed, "seed of the first episode")->capture_default_str();
  plan->add_option("--out", plan_opts.out, "runs directory")->capture_default_str();
  add_runtime_flags(*plan, plan_opts.runtime);

  ReportOptions report_opts;
  auto* report = app.add_subcommand("report", "aggregate run manifests into a results table");
  report->add_option("runs", report_opts.runs, "runs directories")->capture_default_str();
  report->add_option("--out", report_opts.out, "write results.json, results.csv and results.txt here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    CommandResult result;
    if (*synthesize) {
      result = cmd_synthesize(synth, out);
    } else if (*apps_eval) {
      result = cmd_apps_eval(apps, out);
    } else if (*evaluate) {
      result = cmd_evaluate(eval, out);
    } else if (*plan) {
      result = cmd_plan(plan_opts, out);
    } else {
      result = cmd_report(report_opts, out);
    }
    return result.exit_code;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace cwm::bench
