#include "cwm/core/json_io.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include <fmt/format.h>
#include <unistd.h>

namespace cwm {

namespace {

json number_to_json(double x) {
  if (std::isfinite(x) && std::floor(x) == x && std::fabs(x) < 9e15) {
    return static_cast<std::int64_t>(x);
  }
  return x;
}

double number_from_json(const json& j, std::string_view field) {
  if (!j.is_number()) throw ValidationError(fmt::format("field '{}' must be a number", field));
  return j.get<double>();
}

const json& require(const json& j, const char* key) {
  if (!j.is_object()) throw ValidationError("expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(fmt::format("missing field '{}'", key));
  return *it;
}

Value value_field(const json& j, const char* key) {
  try {
    return value_from_json(require(j, key));
  } catch (const ValidationError& e) {
    if (std::string_view(e.what()).starts_with("missing field")) throw;
    throw ValidationError(fmt::format("field '{}': {}", key, e.what()));
  }
}

}  // namespace

json value_to_json(const Value& value) {
  if (value.scalar && value.elems.size() == 1) return number_to_json(value.elems.front());
  json arr = json::array();
  for (double x : value.elems) arr.push_back(x);
  return arr;
}

Value value_from_json(const json& j) {
  if (j.is_number()) return Value::of(j.get<double>());
  if (j.is_array()) {
    std::vector<double> xs;
    xs.reserve(j.size());
    for (const auto& e : j) {
      if (!e.is_number()) throw ValidationError("array elements must be numbers");
      xs.push_back(e.get<double>());
    }
    return Value::of(std::move(xs));
  }
  if (j.is_boolean()) return Value::of(j.get<bool>() ? 1.0 : 0.0);
  throw ValidationError("expected a number or an array of numbers");
}

json space_to_json(const SpaceSpec& space) {
  if (space.is_discrete()) return json{{"kind", "discrete"}, {"n", space.as_discrete().n}};
  return json{{"kind", "box"}, {"low", space.as_box().low}, {"high", space.as_box().high}};
}

SpaceSpec space_from_json(const json& j) {
  const auto& kind = require(j, "kind");
  if (kind == "discrete") {
    const auto& n = require(j, "n");
    if (!n.is_number_integer()) throw ValidationError("field 'n' must be an integer");
    return SpaceSpec::discrete(n.get<std::int64_t>());
  }
  if (kind == "box") {
    auto bounds = [&](const char* key) {
      const auto& arr = require(j, key);
      if (!arr.is_array()) throw ValidationError(fmt::format("field '{}' must be an array", key));
      std::vector<double> out;
      for (const auto& e : arr) out.push_back(number_from_json(e, key));
      return out;
    };
    return SpaceSpec::box(bounds("low"), bounds("high"));
  }
  throw ValidationError(fmt::format("field 'kind': unknown space kind {}", kind.dump()));
}

json transition_to_json(const Transition& t) {
  json j;
  j["s"] = value_to_json(t.s);
  j["a"] = value_to_json(t.a);
  j["r"] = t.r;
  j["s_next"] = value_to_json(t.s_next);
  j["d"] = t.d;
  return j;
}

Transition transition_from_json(const json& j) {
  Transition t;
  t.s = value_field(j, "s");
  t.a = value_field(j, "a");
  t.r = number_from_json(require(j, "r"), "r");
  t.s_next = value_field(j, "s_next");
  const auto& d = require(j, "d");
  if (!d.is_boolean()) throw ValidationError("field 'd' must be a boolean");
  t.d = d.get<bool>();
  return t;
}

json prediction_to_json(const Prediction& p) {
  return json{{"s_next", value_to_json(p.s_next)}, {"r", p.r}, {"d", p.d}};
}

Prediction prediction_from_json(const json& j) {
  Prediction p;
  p.s_next = value_field(j, "s_next");
  p.r = number_from_json(require(j, "r"), "r");
  const auto& d = require(j, "d");
  if (!d.is_boolean()) throw ValidationError("field 'd' must be a boolean");
  p.d = d.get<bool>();
  return p;
}

json error_to_json(const ExecError& e) {
  return json{{"class", to_string(e.cls)}, {"message", e.message}, {"trace", e.trace}};
}

ExecError error_from_json(const json& j) {
  ExecError e;
  const auto& cls = require(j, "class");
  if (!cls.is_string()) throw ValidationError("field 'class' must be a string");
  e.cls = parse_error_class(cls.get<std::string>());
  if (auto it = j.find("message"); it != j.end() && it->is_string()) e.message = it->get<std::string>();
  if (auto it = j.find("trace"); it != j.end() && it->is_string()) e.trace = trim_trace(it->get<std::string>());
  return e;
}

json report_to_json(const EvaluationReport& report) {
  json outcomes = json::array();
  for (const auto& o : report.outcomes) {
    json row{{"index", o.index},
             {"status", o.error ? "error" : "ok"},
             {"state_match", o.state_match},
             {"reward_match", o.reward_match},
             {"done_match", o.done_match}};
    if (o.error) row["error"] = error_to_json(*o.error);
    if (o.predicted) row["predicted"] = prediction_to_json(*o.predicted);
    outcomes.push_back(std::move(row));
  }
  json j{{"accuracy", report.accuracy}, {"outcomes", std::move(outcomes)}, {"wall_time", report.wall_time}};
  j["first_mismatch"] = report.first_mismatch ? json(*report.first_mismatch) : json(nullptr);
  return j;
}

json unit_result_to_json(const UnitTestResult& result) {
  json j{{"status", to_string(result.status)}, {"actual", result.actual}};
  if (result.error) j["error"] = error_to_json(*result.error);
  return j;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  static std::atomic<unsigned> counter{0};
  tmp += fmt::format(".tmp{}-{}", ::getpid(), counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", tmp.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error(fmt::format("short write to {}", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot read {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace cwm
