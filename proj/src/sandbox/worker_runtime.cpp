#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "cwm/core/json_io.hpp"
#include "cwm/sandbox/worker.hpp"

namespace cwm::sandbox {

namespace {

std::string hash_source(const std::string& source) {
  return fmt::format("{:016x}", std::hash<std::string>{}(source));
}

ExecError protocol_error(std::string message) { return ExecError{ErrorClass::protocol, std::move(message), ""}; }

Fallible<Prediction> prediction_item(const json& item) {
  try {
    if (item.value("ok", true)) return prediction_from_json(item);
    return error_from_json(item.at("error"));
  } catch (const std::exception& e) {
    return protocol_error(fmt::format("bad prediction in worker reply: {}", e.what()));
  }
}

json query_json(const Value& s, const Value& a) { return json{{"s", value_to_json(s)}, {"a", value_to_json(a)}}; }

}  // namespace

WorkerRuntime::WorkerRuntime(WorkerConfig config) : worker_(std::make_unique<WorkerHandle>(std::move(config))) {}

std::optional<ExecError> WorkerRuntime::ensure_ready(bool need_program) {
  if (worker_->state() == WorkerHandle::State::dead) {
    try {
      worker_->restart();
    } catch (const std::exception& e) {
      return ExecError{ErrorClass::resource, fmt::format("could not respawn worker: {}", e.what()), ""};
    }
  }
  if (!need_program) return std::nullopt;
  if (!source_) return ExecError{ErrorClass::runtime, "no program loaded", ""};
  auto hash = hash_source(*source_);
  if (worker_->state() == WorkerHandle::State::loaded && worker_->program_hash() == hash) return std::nullopt;
  auto reply = worker_->call(op::load, json{{"source", *source_}});
  if (!reply.ok) return reply.error;
  worker_->mark_loaded(hash);
  return std::nullopt;
}

std::optional<ExecError> WorkerRuntime::load(const std::string& source) {
  source_.reset();
  if (auto err = ensure_ready(false)) return err;
  auto reply = worker_->call(op::load, json{{"source", source}});
  if (!reply.ok) {
    worker_->mark_idle();
    return reply.error;
  }
  source_ = source;
  worker_->mark_loaded(hash_source(source));
  return std::nullopt;
}

std::vector<Fallible<Prediction>> WorkerRuntime::predict_batch(const std::vector<StepQuery>& items) {
  std::vector<Fallible<Prediction>> out;
  if (items.empty()) return out;
  auto fill = [&](const ExecError& e) { return std::vector<Fallible<Prediction>>(items.size(), e); };
  if (auto err = ensure_ready(true)) return fill(*err);

  json payload = json::array();
  for (const auto& q : items) payload.push_back(query_json(q.s, q.a));
  auto reply = worker_->call(op::predict_batch, json{{"items", std::move(payload)}});
  if (!reply.ok) return fill(*reply.error);

  const auto results = reply.result.find("results");
  if (results == reply.result.end() || !results->is_array() || results->size() != items.size()) {
    return fill(protocol_error(fmt::format("predict_batch reply does not hold {} results", items.size())));
  }
  out.reserve(items.size());
  for (const auto& item : *results) out.push_back(prediction_item(item));
  return out;
}

Fallible<Prediction> WorkerRuntime::step_from(const Value& s, const Value& a) {
  if (auto err = ensure_ready(true)) return *err;
  auto reply = worker_->call(op::step_from, query_json(s, a));
  if (!reply.ok) return *reply.error;
  return prediction_item(reply.result);
}

PlanOutcome WorkerRuntime::run_plan(const Value& s0, const std::vector<Value>& actions) {
  PlanOutcome out;
  if (actions.empty()) return out;
  if (auto err = ensure_ready(true)) {
    out.error = err;
    return out;
  }
  json acts = json::array();
  for (const auto& a : actions) acts.push_back(value_to_json(a));
  auto reply = worker_->call(op::run_plan, json{{"s0", value_to_json(s0)}, {"actions", std::move(acts)}});
  if (!reply.ok) {
    out.error = reply.error;
    return out;
  }
  try {
    for (const auto& step : reply.result.at("steps")) out.steps.push_back(prediction_from_json(step));
    if (auto e = reply.result.find("error"); e != reply.result.end() && !e->is_null()) {
      out.error = error_from_json(*e);
    }
  } catch (const std::exception& e) {
    out.steps.clear();
    out.error = protocol_error(fmt::format("bad run_plan reply: {}", e.what()));
  }
  return out;
}

std::vector<Fallible<std::string>> WorkerRuntime::run_io(const std::string& source,
                                                          const std::vector<std::string>& inputs,
                                                          double per_case_timeout) {
  using Result = Fallible<std::string>;
  if (inputs.empty()) return {};
  auto fill = [&](const ExecError& e) { return std::vector<Result>(inputs.size(), e); };
  if (auto err = ensure_ready(false)) return fill(*err);

  // Every case may legitimately use its full budget.
  const double wall = std::max(worker_->config().limits.wall_timeout,
                               per_case_timeout * static_cast<double>(inputs.size()) + 1.0);
  auto reply = worker_->call(
      op::run_io, json{{"source", source}, {"inputs", inputs}, {"timeout", per_case_timeout}}, wall);
  if (!reply.ok) return fill(*reply.error);
  // run_io replaces whatever the worker had resident.
  worker_->mark_idle();

  const auto results = reply.result.find("results");
  if (results == reply.result.end() || !results->is_array() || results->size() != inputs.size()) {
    return fill(protocol_error(fmt::format("run_io reply does not hold {} results", inputs.size())));
  }
  std::vector<Result> out;
  for (const auto& item : *results) {
    try {
      if (item.value("ok", true)) {
        out.emplace_back(item.at("stdout").get<std::string>());
      } else {
        out.emplace_back(error_from_json(item.at("error")));
      }
    } catch (const std::exception& e) {
      out.emplace_back(protocol_error(fmt::format("bad run_io result: {}", e.what())));
    }
  }
  return out;
}

}  // namespace cwm::sandbox
