#include "cwm/llm/mock_backend.hpp"

#include <fmt/format.h>

#include "cwm/core/json_io.hpp"

namespace cwm::llm {

namespace {

ScriptRecord record_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("script record must be an object");
  ScriptRecord r;
  if (auto it = j.find("action"); it != j.end() && !it->is_null()) {
    auto name = it->get<std::string>();
    if (name != "any" && name != "*") r.action = parse_action_type(name);
  }
  if (auto it = j.find("index"); it != j.end() && !it->is_null()) {
    if (!it->is_number_unsigned()) throw ValidationError("script field 'index' must be a non-negative integer");
    r.index = it->get<std::size_t>();
  }
  auto it = j.find("completion");
  if (it == j.end() || !it->is_string()) throw ValidationError("script record needs a string 'completion'");
  r.completion = it->get<std::string>();
  return r;
}

}  // namespace

std::vector<ScriptRecord> parse_script(std::string_view text) {
  std::vector<ScriptRecord> records;
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '[') {
    for (const auto& j : json::parse(text)) records.push_back(record_from_json(j));
    return records;
  }
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    ++line_no;
    start = nl == std::string_view::npos ? text.size() : nl + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      records.push_back(record_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw ValidationError(fmt::format("script line {}: {}", line_no, e.what()));
    }
  }
  return records;
}

MockBackend::MockBackend(std::vector<ScriptRecord> records) : records_(std::move(records)) {}

std::shared_ptr<MockBackend> MockBackend::from_file(const std::filesystem::path& path) {
  return std::make_shared<MockBackend>(parse_script(read_file(path)));
}

std::shared_ptr<MockBackend> MockBackend::sequence(std::vector<std::string> completions) {
  std::vector<ScriptRecord> records;
  for (std::size_t i = 0; i < completions.size(); ++i) {
    records.push_back(ScriptRecord{std::nullopt, i, std::move(completions[i])});
  }
  return std::make_shared<MockBackend>(std::move(records));
}

CompletionResponse MockBackend::complete(const CompletionRequest& request) {
  std::lock_guard lock(mutex_);
  const std::size_t action_index = per_action_calls_[request.action];
  const std::size_t global_index = total_calls_;

  auto find = [&](auto&& pred) -> const ScriptRecord* {
    for (const auto& r : records_) {
      if (pred(r)) return &r;
    }
    return nullptr;
  };
  const ScriptRecord* hit = find([&](const ScriptRecord& r) {
    return r.action == request.action && r.index == action_index;
  });
  if (!hit) hit = find([&](const ScriptRecord& r) { return r.action == request.action && !r.index; });
  if (!hit) hit = find([&](const ScriptRecord& r) { return !r.action && r.index == global_index; });
  if (!hit) hit = find([&](const ScriptRecord& r) { return !r.action && !r.index; });
  if (!hit) {
    throw ScriptEndError(fmt::format("mock script exhausted: no completion for {} #{} (call #{})",
                                     to_string(request.action), action_index, global_index));
  }
  ++per_action_calls_[request.action];
  ++total_calls_;
  log_.push_back(request);
  return CompletionResponse{hit->completion, true, json{{"mock_call", global_index}}, 0.0};
}

std::vector<CompletionRequest> MockBackend::requests() const {
  std::lock_guard lock(mutex_);
  return log_;
}

std::size_t MockBackend::calls() const {
  std::lock_guard lock(mutex_);
  return total_calls_;
}

}  // namespace cwm::llm
