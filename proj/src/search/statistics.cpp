#include "cwm/search/statistics.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace cwm::search {

double ActionMix::percent(ActionType action) const {
  if (total == 0) return 0.0;
  auto it = counts.find(action);
  return it == counts.end() ? 0.0 : 100.0 * it->second / total;
}

StatsReport tree_statistics(const SearchTree& tree, std::optional<NodeId> best) {
  StatsReport r;
  for (const auto& n : tree.nodes()) {
    r.tree_depth = std::max(r.tree_depth, n.depth);
    if (!n.incoming) continue;
    ++r.tree_actions.counts[*n.incoming];
    ++r.tree_actions.total;
    ++r.nodes;
    if (n.is_buggy) ++r.buggy_nodes;
  }
  if (best) {
    for (auto id : tree.path_to(*best)) {
      const auto& n = tree.node(id);
      if (!n.incoming) continue;
      ++r.path_actions.counts[*n.incoming];
      ++r.path_actions.total;
    }
    r.path_length = r.path_actions.total;
  }
  return r;
}

json StatsReport::to_json() const {
  auto mix = [](const ActionMix& m) {
    json j = json::object();
    for (auto a : kAllActions) {
      auto it = m.counts.find(a);
      j[std::string(to_string(a))] = {{"count", it == m.counts.end() ? 0 : it->second}, {"percent", m.percent(a)}};
    }
    return j;
  };
  return json{{"tree", mix(tree_actions)}, {"best_path", mix(path_actions)}, {"path_length", path_length},
              {"tree_depth", tree_depth},  {"nodes", nodes},               {"buggy_nodes", buggy_nodes}};
}

std::string StatsReport::to_table() const {
  std::string out = fmt::format("{:<12}{:>10}{:>10}{:>10}\n", "", "generate", "improve", "fix");
  auto row = [&](std::string_view label, const ActionMix& m) {
    out += fmt::format("{:<12}{:>9.1f}%{:>9.1f}%{:>9.1f}%\n", label, m.percent(ActionType::generate),
                       m.percent(ActionType::improve), m.percent(ActionType::fix));
  };
  row("tree", tree_actions);
  row("best path", path_actions);
  out += fmt::format("path length {}, tree depth {}, nodes {} ({} buggy)\n", path_length, tree_depth, nodes,
                     buggy_nodes);
  return out;
}

}  // namespace cwm::search
