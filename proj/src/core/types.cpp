#include "cwm/core/types.hpp"

#include <cmath>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace cwm {

std::string_view to_string(ActionType action) {
  switch (action) {
    case ActionType::generate: return "generate";
    case ActionType::improve: return "improve";
    case ActionType::fix: return "fix";
  }
  return "unknown";
}

ActionType parse_action_type(std::string_view text) {
  for (auto action : kAllActions) {
    if (to_string(action) == text) return action;
  }
  throw ValidationError(fmt::format("unknown action type '{}'", text));
}

std::string format_value(const Value& value) {
  auto fmt_one = [](double x) {
    if (std::isfinite(x) && std::floor(x) == x && std::fabs(x) < 1e15) {
      return fmt::format("{}", static_cast<long long>(x));
    }
    return fmt::format("{}", x);
  };
  if (value.scalar && value.elems.size() == 1) return fmt_one(value.elems.front());
  std::vector<std::string> parts;
  parts.reserve(value.elems.size());
  for (double x : value.elems) parts.push_back(fmt_one(x));
  return fmt::format("[{}]", fmt::join(parts, ", "));
}

SpaceSpec SpaceSpec::discrete(std::int64_t n) {
  if (n < 1) throw ValidationError(fmt::format("discrete space needs n >= 1, got {}", n));
  return SpaceSpec(DiscreteSpace{n});
}

SpaceSpec SpaceSpec::box(std::vector<double> low, std::vector<double> high) {
  if (low.size() != high.size()) {
    throw ValidationError(
        fmt::format("box bounds differ in length ({} vs {})", low.size(), high.size()));
  }
  if (low.empty()) throw ValidationError("box space needs at least one dimension");
  for (std::size_t i = 0; i < low.size(); ++i) {
    if (!(low[i] <= high[i])) {
      throw ValidationError(fmt::format("box bound {}: low {} > high {}", i, low[i], high[i]));
    }
  }
  return SpaceSpec(BoxSpace{std::move(low), std::move(high)});
}

std::size_t SpaceSpec::dim() const {
  return is_discrete() ? 1 : as_box().low.size();
}

std::string SpaceSpec::violation(const Value& value) const {
  if (is_discrete()) {
    if (value.size() != 1) return fmt::format("expected a discrete index, got {} elements", value.size());
    double x = value.elems.front();
    if (std::floor(x) != x) return fmt::format("discrete value {} is not an integer", x);
    if (x < 0 || x >= static_cast<double>(as_discrete().n)) {
      return fmt::format("discrete value {} outside [0, {})", x, as_discrete().n);
    }
    return {};
  }
  const auto& box = as_box();
  if (value.size() != box.low.size()) {
    return fmt::format("expected {} elements, got {}", box.low.size(), value.size());
  }
  for (std::size_t i = 0; i < box.low.size(); ++i) {
    double x = value.elems[i];
    if (std::isnan(x)) return fmt::format("element {} is NaN", i);
    if (x < box.low[i] || x > box.high[i]) {
      return fmt::format("element {} = {} outside [{}, {}]", i, x, box.low[i], box.high[i]);
    }
  }
  return {};
}

bool SpaceSpec::contains(const Value& value) const { return violation(value).empty(); }

void EnvTask::validate() const {
  if (description.empty()) throw ValidationError("environment description is empty");
  const auto& rows = buffer.transitions;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& t = rows[i];
    auto check = [&](const SpaceSpec& space, const Value& v, std::string_view field) {
      if (auto why = space.violation(v); !why.empty()) {
        throw ValidationError(fmt::format("transition {}: field '{}': {}", i, field, why));
      }
    };
    check(observation_space, t.s, "s");
    check(action_space, t.a, "a");
    check(observation_space, t.s_next, "s_next");
    if (!std::isfinite(t.r)) throw ValidationError(fmt::format("transition {}: field 'r' is not finite", i));
  }
}

std::string_view to_string(ErrorClass cls) {
  switch (cls) {
    case ErrorClass::syntax: return "syntax";
    case ErrorClass::runtime: return "runtime";
    case ErrorClass::timeout: return "timeout";
    case ErrorClass::protocol: return "protocol";
    case ErrorClass::resource: return "resource";
    case ErrorClass::parse: return "parse";
  }
  return "unknown";
}

ErrorClass parse_error_class(std::string_view text) {
  for (auto cls : {ErrorClass::syntax, ErrorClass::runtime, ErrorClass::timeout,
                   ErrorClass::protocol, ErrorClass::resource, ErrorClass::parse}) {
    if (to_string(cls) == text) return cls;
  }
  throw ValidationError(fmt::format("unknown error class '{}'", text));
}

std::string trim_trace(std::string_view trace, std::size_t max_lines) {
  while (!trace.empty() && (trace.back() == '\n' || trace.back() == '\r')) trace.remove_suffix(1);
  if (trace.empty() || max_lines == 0) return {};
  std::size_t lines = 0;
  std::size_t pos = trace.size();
  while (pos > 0) {
    auto nl = trace.rfind('\n', pos - 1);
    ++lines;
    if (nl == std::string_view::npos) return std::string(trace);
    if (lines == max_lines) return std::string(trace.substr(nl + 1));
    pos = nl;
  }
  return std::string(trace);
}

std::string_view to_string(UnitTestResult::Status status) {
  switch (status) {
    case UnitTestResult::Status::pass: return "pass";
    case UnitTestResult::Status::wrong_output: return "wrong_output";
    case UnitTestResult::Status::error: return "error";
    case UnitTestResult::Status::timeout: return "timeout";
  }
  return "unknown";
}

}  // namespace cwm
