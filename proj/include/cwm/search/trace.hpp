#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cwm/core/json_io.hpp"
#include "cwm/core/types.hpp"

namespace cwm::search {

enum class Termination { solved, budget, aborted, exhausted };

std::string_view to_string(Termination t);

struct ExpansionRecord {
  int step = 0;
  std::size_t node = 0;
  std::size_t parent = 0;
  /// Node ids from the root down to `parent`.
  std::vector<std::size_t> path;
  ActionType action = ActionType::generate;
  double value = 0.0;
  bool is_buggy = false;
  std::optional<ErrorClass> error_class;
};

/// Everything a search did, in order. Holds no timings, so two runs with the
/// same seed and scripted backend serialize to identical bytes.
struct SearchTrace {
  std::string method = "gif-mcts";
  std::uint64_t seed = 0;
  json config = json::object();
  std::string task;
  int budget = 0;
  int llm_calls_used = 0;
  std::vector<ExpansionRecord> expansions;
  std::optional<std::size_t> best_node;
  double best_value = 0.0;
  std::string best_program;
  Termination termination = Termination::budget;
  std::string abort_reason;
};

json trace_to_json(const SearchTrace& trace);

}  // namespace cwm::search
