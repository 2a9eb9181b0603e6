#pragma once

#include <map>
#include <optional>
#include <string>

#include "cwm/core/json_io.hpp"
#include "cwm/search/tree.hpp"

namespace cwm::search {

struct ActionMix {
  std::map<ActionType, int> counts;
  int total = 0;

  /// Percentage in [0, 100]; 0 when empty.
  double percent(ActionType action) const;
};

struct StatsReport {
  ActionMix tree_actions;  // every expanded node, by incoming action
  ActionMix path_actions;  // the root-to-best path
  int path_length = 0;     // edges from the root to the best node
  int tree_depth = 0;      // deepest node
  std::size_t nodes = 0;   // excluding the root
  std::size_t buggy_nodes = 0;

  json to_json() const;
  std::string to_table() const;
};

StatsReport tree_statistics(const SearchTree& tree, std::optional<NodeId> best);

}  // namespace cwm::search
