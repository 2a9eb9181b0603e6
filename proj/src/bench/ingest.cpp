#include "cwm/bench/ingest.hpp"

#include <fstream>

#include <fmt/format.h>

#include "cwm/core/json_io.hpp"

namespace cwm::bench {

namespace fs = std::filesystem;

namespace {

std::string read_required(const fs::path& dir, const char* name) {
  auto path = dir / name;
  if (!fs::exists(path)) throw ValidationError(fmt::format("{}: missing {}", dir.string(), name));
  return read_file(path);
}

template <class Fn>
void for_each_json_line(const fs::path& path, const std::string& text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    std::string line = text.substr(start, nl == std::string::npos ? std::string::npos : nl - start);
    ++line_no;
    start = nl == std::string::npos ? text.size() + 1 : nl + 1;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json row;
    try {
      row = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ValidationError(fmt::format("{}:{}: malformed JSON: {}", path.string(), line_no, e.what()));
    }
    try {
      fn(row);
    } catch (const ValidationError& e) {
      throw ValidationError(fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
    }
  }
}

}  // namespace

EnvTask ingest_environment(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ValidationError(fmt::format("{}: not a directory", dir.string()));
  EnvTask task;
  task.name = fs::absolute(dir).lexically_normal().filename().string();
  if (task.name.empty()) task.name = fs::absolute(dir).lexically_normal().parent_path().filename().string();
  task.description = read_required(dir, "description.md");
  while (!task.description.empty() && (task.description.back() == '\n' || task.description.back() == ' ')) {
    task.description.pop_back();
  }
  if (task.description.empty()) throw ValidationError(fmt::format("{}: description.md is empty", dir.string()));

  const auto spaces_path = dir / "spaces.json";
  auto spaces_text = read_required(dir, "spaces.json");
  try {
    auto spaces = json::parse(spaces_text);
    for (const char* key : {"action", "observation"}) {
      if (!spaces.contains(key)) throw ValidationError(fmt::format("field '{}': missing", key));
    }
    try {
      task.action_space = space_from_json(spaces["action"]);
    } catch (const ValidationError& e) {
      throw ValidationError(fmt::format("field 'action': {}", e.what()));
    }
    try {
      task.observation_space = space_from_json(spaces["observation"]);
    } catch (const ValidationError& e) {
      throw ValidationError(fmt::format("field 'observation': {}", e.what()));
    }
  } catch (const json::parse_error& e) {
    throw ValidationError(fmt::format("{}: malformed JSON: {}", spaces_path.string(), e.what()));
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}: {}", spaces_path.string(), e.what()));
  }

  const auto buffer_path = dir / "buffer.jsonl";
  auto buffer_text = read_required(dir, "buffer.jsonl");
  for_each_json_line(buffer_path, buffer_text, [&](const json& row) {
    auto t = transition_from_json(row);
    auto check = [](const SpaceSpec& space, const Value& v, const char* field) {
      if (auto why = space.violation(v); !why.empty()) throw ValidationError(fmt::format("field '{}': {}", field, why));
    };
    check(task.observation_space, t.s, "s");
    check(task.action_space, t.a, "a");
    check(task.observation_space, t.s_next, "s_next");
    task.buffer.transitions.push_back(std::move(t));
  });
  if (task.buffer.transitions.empty()) throw ValidationError(fmt::format("{}: no transitions", buffer_path.string()));

  task.buffer.source_meta = fmt::format("{} ({} transitions)", buffer_path.string(), task.buffer.transitions.size());
  if (auto meta = dir / "source.txt"; fs::exists(meta)) task.buffer.source_meta = read_file(meta);
  return task;
}

IOProblem ingest_io_problem(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ValidationError(fmt::format("{}: not a directory", dir.string()));
  IOProblem problem;
  problem.name = fs::absolute(dir).lexically_normal().filename().string();
  problem.statement = read_required(dir, "statement.md");
  const auto tests_path = dir / "tests.jsonl";
  auto text = read_required(dir, "tests.jsonl");
  for_each_json_line(tests_path, text, [&](const json& row) {
    if (!row.is_object()) throw ValidationError("test must be a JSON object");
    for (const char* key : {"input", "output"}) {
      auto it = row.find(key);
      if (it == row.end()) throw ValidationError(fmt::format("field '{}': missing", key));
      if (!it->is_string()) throw ValidationError(fmt::format("field '{}': must be a string", key));
    }
    problem.tests.push_back({row["input"].get<std::string>(), row["output"].get<std::string>()});
  });
  if (problem.tests.empty()) throw ValidationError(fmt::format("{}: zero tests", tests_path.string()));
  problem.improve_eligible = (problem.tests.size() + 1) / 2;
  return problem;
}

void write_environment(const EnvTask& task, const fs::path& dir) {
  fs::create_directories(dir);
  write_file_atomic(dir / "description.md", task.description + "\n");
  json spaces{{"action", space_to_json(task.action_space)}, {"observation", space_to_json(task.observation_space)}};
  write_file_atomic(dir / "spaces.json", spaces.dump(2) + "\n");
  std::string buffer;
  for (const auto& t : task.buffer.transitions) buffer += transition_to_json(t).dump() + "\n";
  write_file_atomic(dir / "buffer.jsonl", buffer);
  if (!task.buffer.source_meta.empty()) write_file_atomic(dir / "source.txt", task.buffer.source_meta);
}

}  // namespace cwm::bench
