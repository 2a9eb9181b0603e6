#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cwm/core/json_io.hpp"
#include "cwm/sandbox/protocol.hpp"

namespace cwm::bench {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Bad flags or missing inputs; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// $CWM_WORKER, else "cwm-worker".
std::string default_worker_command();

struct RuntimeOptions {
  std::string worker = default_worker_command();
  sandbox::Limits limits;
  int workers = 1;
};

struct SynthesizeOptions {
  std::vector<std::filesystem::path> envs;
  std::vector<std::filesystem::path> problems;
  std::string method = "gif-mcts";
  int budget = 50;
  std::uint64_t seed = 0;
  std::string backend;
  std::vector<std::string> ablations;
  int parallel = 1;
  double rate_limit = 0.0;
  RuntimeOptions runtime;
  std::filesystem::path out = "runs";
};

struct EvaluateOptions {
  std::filesystem::path env;
  std::optional<std::filesystem::path> program;  // default <env>/program.py
  RuntimeOptions runtime;
  std::filesystem::path out = "runs";
};

struct PlanOptions {
  std::filesystem::path env;
  std::optional<std::filesystem::path> program;
  int episodes = 10;
  int max_steps = 100;
  std::uint64_t seed = 0;
  RuntimeOptions runtime;
  std::filesystem::path out = "runs";
};

struct ReportOptions {
  std::vector<std::filesystem::path> runs{"runs"};
  std::optional<std::filesystem::path> out;  // where results.{json,csv,txt} go
};

struct RunRecord {
  std::string task;
  std::filesystem::path run_dir;
  json summary = json::object();
  int exit_code = kExitOk;
};

struct CommandResult {
  int exit_code = kExitOk;
  std::vector<RunRecord> runs;
};

/// The cmd_* functions throw UsageError or ValidationError for bad input.
CommandResult cmd_synthesize(const SynthesizeOptions& options, std::ostream& out);
CommandResult cmd_apps_eval(const SynthesizeOptions& options, std::ostream& out);
CommandResult cmd_evaluate(const EvaluateOptions& options, std::ostream& out);
CommandResult cmd_plan(const PlanOptions& options, std::ostream& out);
CommandResult cmd_report(const ReportOptions& options, std::ostream& out);

/// Full command line (without the program name). Never throws; returns the
/// exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cwm::bench
