#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cwm {

/// Raised when a domain object violates one of its invariants.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ActionType { generate, improve, fix };

inline constexpr ActionType kAllActions[] = {ActionType::generate, ActionType::improve,
                                             ActionType::fix};

std::string_view to_string(ActionType action);
ActionType parse_action_type(std::string_view text);

/// A state or action. Discrete values are a single integral element; `scalar`
/// records whether the value was written as a bare number rather than an array.
struct Value {
  std::vector<double> elems;
  bool scalar = false;

  static Value of(double x) { return Value{{x}, true}; }
  static Value of(std::vector<double> xs) { return Value{std::move(xs), false}; }

  std::size_t size() const { return elems.size(); }
  bool operator==(const Value&) const = default;
};

std::string format_value(const Value& value);

struct DiscreteSpace {
  std::int64_t n = 1;
  bool operator==(const DiscreteSpace&) const = default;
};

struct BoxSpace {
  std::vector<double> low;
  std::vector<double> high;
  bool operator==(const BoxSpace&) const = default;
};

class SpaceSpec {
 public:
  static SpaceSpec discrete(std::int64_t n);
  static SpaceSpec box(std::vector<double> low, std::vector<double> high);

  bool is_discrete() const { return std::holds_alternative<DiscreteSpace>(kind_); }
  const DiscreteSpace& as_discrete() const { return std::get<DiscreteSpace>(kind_); }
  const BoxSpace& as_box() const { return std::get<BoxSpace>(kind_); }

  /// 1 for discrete spaces, the box length otherwise.
  std::size_t dim() const;
  bool contains(const Value& value) const;
  /// Human-readable reason `value` is not contained, empty when it is.
  std::string violation(const Value& value) const;

  bool operator==(const SpaceSpec&) const = default;

 private:
  explicit SpaceSpec(std::variant<DiscreteSpace, BoxSpace> kind) : kind_(std::move(kind)) {}
  std::variant<DiscreteSpace, BoxSpace> kind_;
};

struct Transition {
  Value s;
  Value a;
  double r = 0.0;
  Value s_next;
  bool d = false;

  bool operator==(const Transition&) const = default;
};

struct ReplayBuffer {
  std::vector<Transition> transitions;
  std::string source_meta;

  bool operator==(const ReplayBuffer&) const = default;
};

struct EnvTask {
  std::string name;
  std::string description;
  SpaceSpec action_space = SpaceSpec::discrete(1);
  SpaceSpec observation_space = SpaceSpec::discrete(1);
  ReplayBuffer buffer;

  /// Throws ValidationError naming the first offending transition.
  void validate() const;
  bool operator==(const EnvTask&) const = default;
};

/// A world model's answer to step(s, a).
struct Prediction {
  Value s_next;
  double r = 0.0;
  bool d = false;

  bool operator==(const Prediction&) const = default;
};

enum class ErrorClass { syntax, runtime, timeout, protocol, resource, parse };

std::string_view to_string(ErrorClass cls);
ErrorClass parse_error_class(std::string_view text);

/// A failure raised while loading or running a candidate program.
struct ExecError {
  ErrorClass cls = ErrorClass::runtime;
  std::string message;
  std::string trace;  // at most kMaxTraceLines lines

  static constexpr std::size_t kMaxTraceLines = 20;

  bool operator==(const ExecError&) const = default;
};

/// Keeps the last `max_lines` lines of a traceback.
std::string trim_trace(std::string_view trace, std::size_t max_lines = ExecError::kMaxTraceLines);

template <class T>
using Fallible = std::variant<T, ExecError>;

struct PredictionOutcome {
  std::size_t index = 0;
  std::optional<ExecError> error;
  bool state_match = false;
  bool reward_match = false;
  bool done_match = false;
  std::optional<Prediction> predicted;

  bool full_match() const { return state_match && reward_match && done_match; }
};

struct EvaluationReport {
  double accuracy = 0.0;
  std::vector<PredictionOutcome> outcomes;
  std::optional<std::size_t> first_mismatch;
  double wall_time = 0.0;
};

struct UnitTestCase {
  std::string input;
  std::string expected;

  bool operator==(const UnitTestCase&) const = default;
};

struct UnitTestResult {
  enum class Status { pass, wrong_output, error, timeout };
  Status status = Status::error;
  std::string actual;
  std::optional<ExecError> error;

  bool passed() const { return status == Status::pass; }
};

std::string_view to_string(UnitTestResult::Status status);

/// A stdin/stdout programming problem. The first `improve_eligible` tests may be
/// shown to the model as feedback; every test counts for scoring.
struct IOProblem {
  std::string name;
  std::string statement;
  std::vector<UnitTestCase> tests;
  std::size_t improve_eligible = 0;
};

}  // namespace cwm
