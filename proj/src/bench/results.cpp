#include "cwm/bench/results.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace cwm::bench {

namespace fs = std::filesystem;

namespace {

std::optional<double> opt_number(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) return std::nullopt;
  return it->get<double>();
}

std::string cell(const std::optional<double>& x, int precision = 4) {
  return x ? fmt::format("{:.{}f}", *x, precision) : "";
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

json opt_json(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

}  // namespace

ResultRow row_from_manifest(const RunManifest& m, const std::string& run_name) {
  ResultRow r;
  r.run = run_name;
  r.method = m.method;
  r.task = m.task;
  r.group = m.task_kind == "io" ? "io" : (m.space_kind.empty() ? "discrete" : m.space_kind);
  r.accuracy = opt_number(m.summary, "accuracy");
  r.normalized_return = opt_number(m.summary, "normalized_return");
  r.normalized_return_error = opt_number(m.summary, "normalized_return_error");
  if (auto it = m.summary.find("solved"); it != m.summary.end() && it->is_boolean()) r.solved = it->get<bool>();
  r.llm_calls_used = m.summary.value("llm_calls_used", 0);
  r.wall_time = m.summary.value("wall_seconds", 0.0);
  return r;
}

Aggregate aggregate(const std::vector<const ResultRow*>& rows) {
  Aggregate a;
  a.rows = static_cast<int>(rows.size());
  double acc = 0.0, ret = 0.0, solved = 0.0, calls = 0.0, wall = 0.0;
  int n_acc = 0, n_ret = 0, n_solved = 0;
  for (const auto* r : rows) {
    if (r->accuracy) {
      acc += *r->accuracy;
      ++n_acc;
    }
    if (r->normalized_return) {
      ret += *r->normalized_return;
      ++n_ret;
    }
    if (r->solved) {
      solved += *r->solved ? 1.0 : 0.0;
      ++n_solved;
    }
    calls += r->llm_calls_used;
    wall += r->wall_time;
  }
  if (n_acc) a.mean_accuracy = acc / n_acc;
  if (n_ret) a.mean_normalized_return = ret / n_ret;
  if (n_solved) a.solved_fraction = solved / n_solved;
  if (!rows.empty()) {
    a.mean_llm_calls = calls / static_cast<double>(rows.size());
    a.mean_wall_time = wall / static_cast<double>(rows.size());
  }
  return a;
}

ResultsTable build_results(std::vector<ResultRow> rows) {
  ResultsTable t;
  t.rows = std::move(rows);
  std::map<std::string, std::vector<const ResultRow*>> groups;
  for (const auto& r : t.rows) {
    groups[r.group].push_back(&r);
    groups["all"].push_back(&r);
  }
  for (const auto& [name, members] : groups) t.aggregates[name] = aggregate(members);
  return t;
}

json ResultsTable::to_json() const {
  json rows_json = json::array();
  for (const auto& r : rows) {
    rows_json.push_back({{"run", r.run},
                         {"method", r.method},
                         {"task", r.task},
                         {"group", r.group},
                         {"accuracy", opt_json(r.accuracy)},
                         {"normalized_return", opt_json(r.normalized_return)},
                         {"normalized_return_error", opt_json(r.normalized_return_error)},
                         {"solved", r.solved ? json(*r.solved) : json(nullptr)},
                         {"llm_calls_used", r.llm_calls_used},
                         {"wall_seconds", r.wall_time}});
  }
  json agg = json::object();
  for (const auto& [name, a] : aggregates) {
    agg[name] = {{"rows", a.rows},
                 {"mean_accuracy", opt_json(a.mean_accuracy)},
                 {"mean_normalized_return", opt_json(a.mean_normalized_return)},
                 {"solved_fraction", opt_json(a.solved_fraction)},
                 {"mean_llm_calls", a.mean_llm_calls},
                 {"mean_wall_seconds", a.mean_wall_time}};
  }
  return json{{"rows", std::move(rows_json)}, {"aggregates", std::move(agg)}};
}

std::string ResultsTable::to_csv() const {
  std::string out = "run,method,task,group,accuracy,normalized_return,normalized_return_error,solved,llm_calls_used,wall_seconds\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{:.3f}\n", csv_escape(r.run), csv_escape(r.method), csv_escape(r.task),
                       r.group, cell(r.accuracy, 6), cell(r.normalized_return, 6), cell(r.normalized_return_error, 6),
                       r.solved ? (*r.solved ? "true" : "false") : "", r.llm_calls_used, r.wall_time);
  }
  for (const auto& [name, a] : aggregates) {
    out += fmt::format("mean:{},,,{},{},{},,{},{:.2f},{:.3f}\n", name, name, cell(a.mean_accuracy, 6),
                       cell(a.mean_normalized_return, 6), cell(a.solved_fraction, 6), a.mean_llm_calls,
                       a.mean_wall_time);
  }
  return out;
}

std::string ResultsTable::to_text() const {
  std::size_t w_task = 4, w_method = 6;
  for (const auto& r : rows) {
    w_task = std::max(w_task, r.task.size());
    w_method = std::max(w_method, r.method.size());
  }
  for (const auto& [name, a] : aggregates) w_task = std::max(w_task, name.size() + 7);
  auto line = [&](std::string_view task, std::string_view method, std::string_view group, std::string_view acc,
                  std::string_view ret, std::string_view calls, std::string_view wall) {
    return fmt::format("{:<{}}  {:<{}}  {:<10}  {:>8}  {:>16}  {:>6}  {:>8}\n", task, w_task, method, w_method, group, acc,
                       ret, calls, wall);
  };
  std::string out = line("task", "method", "group", "accuracy", "norm. return", "calls", "wall s");
  for (const auto& r : rows) {
    std::string ret = r.normalized_return
                          ? fmt::format("{:.3f} ± {:.3f}", *r.normalized_return, r.normalized_return_error.value_or(0.0))
                          : "";
    out += line(r.task, r.method, r.group, cell(r.accuracy, 3), ret, fmt::format("{}", r.llm_calls_used),
                fmt::format("{:.1f}", r.wall_time));
  }
  for (const auto& [name, a] : aggregates) {
    out += line(fmt::format("mean ({})", name), "", name, cell(a.mean_accuracy, 3), cell(a.mean_normalized_return, 3),
                fmt::format("{:.1f}", a.mean_llm_calls), fmt::format("{:.1f}", a.mean_wall_time));
  }
  return out;
}

std::vector<fs::path> find_runs(const fs::path& root) {
  std::vector<fs::path> runs;
  if (fs::exists(root / kManifestFile)) runs.push_back(root);
  if (fs::is_directory(root)) {
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
      if (entry.is_directory() && fs::exists(entry.path() / kManifestFile)) runs.push_back(entry.path());
    }
  }
  std::sort(runs.begin(), runs.end());
  runs.erase(std::unique(runs.begin(), runs.end()), runs.end());
  return runs;
}

}  // namespace cwm::bench
