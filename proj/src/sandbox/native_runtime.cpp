#include "cwm/sandbox/native_runtime.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "cwm/core/json_io.hpp"
#include "cwm/fixtures/fixtures.hpp"
#include "cwm/sandbox/subprocess.hpp"

namespace cwm::sandbox {

namespace {

constexpr std::string_view kMarker = "# cwm-native:";

ExecError runtime_error(std::string message, std::string trace = "") {
  return ExecError{ErrorClass::runtime, std::move(message), std::move(trace)};
}

[[noreturn]] void hang_forever() {
  for (;;) std::this_thread::sleep_for(std::chrono::hours(1));
}

[[noreturn]] void crash_now() { std::_Exit(139); }

}  // namespace

std::string NativeDirective::get(const std::string& key, const std::string& fallback) const {
  auto it = args.find(key);
  return it == args.end() ? fallback : it->second;
}

double NativeDirective::number(const std::string& key, double fallback) const {
  auto it = args.find(key);
  if (it == args.end()) return fallback;
  try {
    std::size_t used = 0;
    double x = std::stod(it->second, &used);
    if (used == it->second.size()) return x;
  } catch (const std::exception&) {
  }
  throw ValidationError(fmt::format("directive argument {}={} is not a number", key, it->second));
}

std::optional<NativeDirective> find_directive(const std::string& source) {
  std::istringstream lines(source);
  std::string line;
  while (std::getline(lines, line)) {
    auto at = line.find(kMarker);
    if (at == std::string::npos) continue;
    auto words = split_command(line.substr(at + kMarker.size()));
    if (words.empty()) return std::nullopt;
    NativeDirective d;
    d.model = words.front();
    for (std::size_t i = 1; i < words.size(); ++i) {
      auto eq = words[i].find('=');
      if (eq == std::string::npos) {
        d.args[words[i]] = "";
      } else {
        d.args[words[i].substr(0, eq)] = words[i].substr(eq + 1);
      }
    }
    return d;
  }
  return std::nullopt;
}

/// A loaded environment program.
class NativeRuntime::Model {
 public:
  virtual ~Model() = default;
  virtual Fallible<Prediction> step(const Value& s, const Value& a) = 0;
};

namespace {

using Model = NativeRuntime::Model;

class FixtureModel : public Model {
 public:
  explicit FixtureModel(std::unique_ptr<fixtures::FixtureEnv> env) : env_(std::move(env)) {}
  Fallible<Prediction> step(const Value& s, const Value& a) override {
    try {
      return env_->step(s, a);
    } catch (const std::exception& e) {
      return runtime_error(fmt::format("ValueError: {}", e.what()),
                           fmt::format("  File \"<candidate>\", in step\nValueError: {}", e.what()));
    }
  }

 private:
  std::unique_ptr<fixtures::FixtureEnv> env_;
};

class ConstantModel : public Model {
 public:
  explicit ConstantModel(Prediction p) : p_(std::move(p)) {}
  Fallible<Prediction> step(const Value&, const Value&) override { return p_; }

 private:
  Prediction p_;
};

// Shifts every state by `delta` regardless of the action; never terminates.
class OffsetModel : public Model {
 public:
  explicit OffsetModel(double delta) : delta_(delta) {}
  Fallible<Prediction> step(const Value& s, const Value&) override {
    Value next = s;
    for (auto& x : next.elems) x += delta_;
    return Prediction{next, 0.0, false};
  }

 private:
  double delta_;
};

// Continuous point mass: s' = clip(s + a), reward -|s'|^2.
class PointMassModel : public Model {
 public:
  PointMassModel(std::size_t dim, double bound) : dim_(dim), bound_(bound) {}
  Fallible<Prediction> step(const Value& s, const Value& a) override {
    if (s.size() != dim_ || a.size() != dim_) {
      return runtime_error(fmt::format("ValueError: expected {}-dimensional state and action", dim_));
    }
    Prediction p{Value::of(std::vector<double>(dim_)), 0.0, false};
    for (std::size_t i = 0; i < dim_; ++i) {
      double x = std::clamp(s.elems[i] + a.elems[i], -bound_, bound_);
      p.s_next.elems[i] = x;
      p.r -= x * x;
    }
    return p;
  }

 private:
  std::size_t dim_;
  double bound_;
};

// LineWorld, except stepping from state `at` divides by zero.
class StepErrorModel : public Model {
 public:
  explicit StepErrorModel(std::optional<double> at) : at_(at) {}
  Fallible<Prediction> step(const Value& s, const Value& a) override {
    if (!at_ || (s.size() == 1 && s.elems[0] == *at_)) {
      return runtime_error("ZeroDivisionError: division by zero",
                           "Traceback (most recent call last):\n  File \"<candidate>\", line 14, in step\n"
                           "    ratio = self.pos / 0\nZeroDivisionError: division by zero");
    }
    return inner_.step(s, a);
  }

 private:
  std::optional<double> at_;
  FixtureModel inner_{std::make_unique<fixtures::LineWorld>()};
};

class BadSignatureModel : public Model {
 public:
  Fallible<Prediction> step(const Value&, const Value&) override {
    return runtime_error("bad step signature: step returned 4 values, expected (observation, reward, done)");
  }
};

class SlowModel : public Model {
 public:
  SlowModel(double ms, double cpu_limit) : ms_(ms), cpu_limit_(cpu_limit) {}
  Fallible<Prediction> step(const Value& s, const Value& a) override {
    if (ms_ / 1000.0 > cpu_limit_) {
      return ExecError{ErrorClass::timeout, fmt::format("step exceeded the CPU limit of {}s", cpu_limit_), ""};
    }
    std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(ms_));
    return inner_.step(s, a);
  }

 private:
  double ms_;
  double cpu_limit_;
  FixtureModel inner_{std::make_unique<fixtures::LineWorld>()};
};

class HazardModel : public Model {
 public:
  HazardModel(bool crash, bool real, double cpu_limit) : crash_(crash), real_(real), cpu_limit_(cpu_limit) {}
  Fallible<Prediction> step(const Value&, const Value&) override {
    if (real_) {
      if (crash_) crash_now();
      hang_forever();
    }
    if (crash_) return ExecError{ErrorClass::resource, "worker exited during 'step' (crash or resource limit)", ""};
    return ExecError{ErrorClass::timeout, fmt::format("step exceeded the CPU limit of {}s", cpu_limit_), ""};
  }

 private:
  bool crash_;
  bool real_;
  double cpu_limit_;
};

Fallible<std::unique_ptr<Model>> build_model(const NativeDirective& d, const NativeRuntime::Options& opt) {
  const auto& m = d.model;
  if (m == "lineworld") {
    int size = static_cast<int>(d.number("size", 10));
    int goal = static_cast<int>(d.number("goal", size - 1));
    try {
      return std::unique_ptr<Model>(std::make_unique<FixtureModel>(std::make_unique<fixtures::LineWorld>(size, goal)));
    } catch (const std::invalid_argument& e) {
      return runtime_error(fmt::format("ValueError: {}", e.what()));
    }
  }
  if (m == "minicliff") return std::unique_ptr<Model>(std::make_unique<FixtureModel>(std::make_unique<fixtures::MiniCliff>()));
  if (m == "constant") {
    Prediction p;
    p.s_next = value_from_json(json::parse(d.get("state", "0")));
    p.r = d.number("reward", 0.0);
    p.d = d.get("done", "false") == "true";
    return std::unique_ptr<Model>(std::make_unique<ConstantModel>(p));
  }
  if (m == "offset") return std::unique_ptr<Model>(std::make_unique<OffsetModel>(d.number("delta", 1.0)));
  if (m == "pointmass") {
    return std::unique_ptr<Model>(std::make_unique<PointMassModel>(static_cast<std::size_t>(d.number("dim", 1)),
                                                                   d.number("bound", 10.0)));
  }
  if (m == "step-error") {
    std::optional<double> at;
    if (d.args.contains("at")) at = d.number("at", 0);
    return std::unique_ptr<Model>(std::make_unique<StepErrorModel>(at));
  }
  if (m == "bad-signature") return std::unique_ptr<Model>(std::make_unique<BadSignatureModel>());
  if (m == "slow-step") {
    return std::unique_ptr<Model>(std::make_unique<SlowModel>(d.number("ms", 10), opt.cpu_seconds_per_call));
  }
  if (m == "hang" || m == "crash") {
    return std::unique_ptr<Model>(std::make_unique<HazardModel>(m == "crash", opt.real_hazards, opt.cpu_seconds_per_call));
  }
  if (m == "syntax-error") {
    auto line = static_cast<int>(d.number("line", 1));
    return ExecError{ErrorClass::syntax, fmt::format("SyntaxError: invalid syntax (line {})", line),
                     fmt::format("  File \"<candidate>\", line {}\nSyntaxError: invalid syntax", line)};
  }
  if (m == "init-error") {
    return runtime_error("RuntimeError: exception in __init__",
                         "Traceback (most recent call last):\n  File \"<candidate>\", line 5, in __init__\n"
                         "RuntimeError: exception in __init__");
  }
  if (m == "missing-member") {
    return runtime_error(fmt::format("missing member {}", d.get("name", "set_state")));
  }
  return ExecError{ErrorClass::syntax, fmt::format("unknown native model '{}'", m), ""};
}

Fallible<std::string> run_io_case(const NativeDirective& d, const std::string& input, double timeout,
                                  bool real_hazards) {
  const auto& m = d.model;
  if (m == "io-echo") {
    std::string out = input;
    if (out.empty() || out.back() != '\n') out += '\n';
    return out;
  }
  if (m == "io-sum") {
    std::istringstream in(input);
    long long total = 0;
    long long x;
    while (in >> x) total += x;
    return fmt::format("{}\n", total);
  }
  if (m == "io-const") return d.get("text", "") + "\n";
  if (m == "io-silent") return std::string();
  if (m == "io-loop") {
    if (real_hazards) hang_forever();
    return ExecError{ErrorClass::timeout, fmt::format("test case exceeded the time limit of {}s", timeout), ""};
  }
  if (m == "io-error") {
    return runtime_error("IndexError: list index out of range",
                         "Traceback (most recent call last):\n  File \"<candidate>\", line 3, in <module>\n"
                         "IndexError: list index out of range");
  }
  return ExecError{ErrorClass::syntax, fmt::format("unknown native io model '{}'", m), ""};
}

}  // namespace

NativeRuntime::NativeRuntime() : NativeRuntime(Options{}) {}
NativeRuntime::NativeRuntime(Options options) : options_(options) {}
NativeRuntime::~NativeRuntime() = default;

std::optional<ExecError> NativeRuntime::load(const std::string& source) {
  model_.reset();
  auto directive = find_directive(source);
  if (!directive) {
    return ExecError{ErrorClass::syntax, "SyntaxError: program is not runnable in the native runtime (line 1)", ""};
  }
  Fallible<std::unique_ptr<Model>> built = ExecError{};
  try {
    built = build_model(*directive, options_);
  } catch (const std::exception& e) {
    return ExecError{ErrorClass::syntax, fmt::format("SyntaxError: bad directive: {}", e.what()), ""};
  }
  if (auto* err = std::get_if<ExecError>(&built)) return *err;
  model_ = std::move(std::get<std::unique_ptr<Model>>(built));
  return std::nullopt;
}

Fallible<Prediction> NativeRuntime::step_from(const Value& s, const Value& a) {
  if (!model_) return runtime_error("no program loaded");
  return model_->step(s, a);
}

std::vector<Fallible<Prediction>> NativeRuntime::predict_batch(const std::vector<StepQuery>& items) {
  std::vector<Fallible<Prediction>> out;
  out.reserve(items.size());
  for (const auto& q : items) out.push_back(step_from(q.s, q.a));
  return out;
}

PlanOutcome NativeRuntime::run_plan(const Value& s0, const std::vector<Value>& actions) {
  PlanOutcome out;
  Value s = s0;
  for (const auto& a : actions) {
    auto r = step_from(s, a);
    if (auto* err = std::get_if<ExecError>(&r)) {
      out.error = *err;
      break;
    }
    auto& p = std::get<Prediction>(r);
    s = p.s_next;
    bool done = p.d;
    out.steps.push_back(std::move(p));
    if (done) break;
  }
  return out;
}

std::vector<Fallible<std::string>> NativeRuntime::run_io(const std::string& source,
                                                          const std::vector<std::string>& inputs,
                                                          double per_case_timeout) {
  auto directive = find_directive(source);
  std::vector<Fallible<std::string>> out;
  out.reserve(inputs.size());
  for (const auto& input : inputs) {
    if (!directive) {
      out.emplace_back(ExecError{ErrorClass::syntax, "SyntaxError: program is not runnable in the native runtime (line 1)", ""});
    } else {
      out.push_back(run_io_case(*directive, input, per_case_timeout, options_.real_hazards));
    }
  }
  return out;
}

}  // namespace cwm::sandbox
