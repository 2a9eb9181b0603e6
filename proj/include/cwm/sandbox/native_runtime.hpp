#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>

#include "cwm/sandbox/runtime.hpp"

namespace cwm::sandbox {

/// A parsed `# cwm-native: <model> key=value ...` line.
struct NativeDirective {
  std::string model;
  std::map<std::string, std::string> args;

  std::string get(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key, double fallback) const;
};

/// Finds the directive in a program's source, if any.
std::optional<NativeDirective> find_directive(const std::string& source);

/// In-process runtime for tests and for runs without a worker. Programs are not
/// interpreted: each one names a built-in model through a directive comment,
/// and the runtime reproduces that model's behaviour (including its failures).
/// Sources without a directive fail to load with a syntax error.
///
/// Models for environment programs: lineworld [size goal], minicliff,
/// constant [state reward done], offset [delta], pointmass [dim bound],
/// step-error [at], bad-signature, slow-step [ms], hang, crash, and the load
/// failures syntax-error [line], init-error, missing-member [name].
/// Models for stdin/stdout programs: io-echo, io-sum, io-const [text],
/// io-silent, io-loop, io-error.
class NativeRuntime : public ProgramRuntime {
 public:
  struct Options {
    /// When set, hang blocks forever and crash kills the process, which is
    /// what a worker process needs to exercise the client's recovery paths.
    /// Otherwise both are reported as the error the client would produce.
    bool real_hazards = false;
    double cpu_seconds_per_call = 1.0;
  };

  NativeRuntime();
  explicit NativeRuntime(Options options);
  ~NativeRuntime() override;

  std::optional<ExecError> load(const std::string& source) override;
  std::vector<Fallible<Prediction>> predict_batch(const std::vector<StepQuery>& items) override;
  Fallible<Prediction> step_from(const Value& s, const Value& a) override;
  PlanOutcome run_plan(const Value& s0, const std::vector<Value>& actions) override;
  std::vector<Fallible<std::string>> run_io(const std::string& source, const std::vector<std::string>& inputs,
                                             double per_case_timeout) override;

  class Model;

 private:
  Options options_;
  std::unique_ptr<Model> model_;
};

}  // namespace cwm::sandbox
