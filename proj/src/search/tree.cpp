#include "cwm/search/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cwm/search/uct.hpp"

namespace cwm::search {

namespace {

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.emplace_back(text.substr(start));
      break;
    }
    lines.emplace_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

std::size_t count_code_lines(const std::vector<std::string>& lines) {
  return static_cast<std::size_t>(std::count_if(lines.begin(), lines.end(), [](const auto& l) { return !is_blank(l); }));
}

StateSplit split_state_rollout(const std::vector<std::string>& parent_state, const std::vector<std::string>& program,
                               int lines_per_state) {
  const std::size_t wanted = count_code_lines(parent_state) + static_cast<std::size_t>(lines_per_state);
  std::size_t seen = 0;
  std::size_t cut = program.size();
  for (std::size_t i = 0; i < program.size(); ++i) {
    if (!is_blank(program[i]) && ++seen == wanted) {
      cut = i + 1;
      break;
    }
  }
  StateSplit split;
  split.state.assign(program.begin(), program.begin() + static_cast<std::ptrdiff_t>(cut));
  split.rollout.assign(program.begin() + static_cast<std::ptrdiff_t>(cut), program.end());
  return split;
}

std::string SearchNode::program() const { return join_lines(state_lines) + join_lines(rollout_lines); }

SearchTree::SearchTree(const SearchConfig& config) : config_(config) {
  SearchNode root;
  root.arms.push_back({ActionType::generate, std::nullopt});
  nodes_.push_back(std::move(root));
}

double SearchTree::temp_value(NodeId id) const {
  const auto& chain = node(node(id).chain_root);
  return buggy_temp_value(std::min(chain.failed_fixes, config_.max_fixes), config_.max_fixes);
}

bool SearchTree::chain_exhausted(NodeId id) const {
  return node(node(id).chain_root).failed_fixes >= config_.max_fixes;
}

double SearchTree::node_value(NodeId id) const {
  const auto& n = node(id);
  if (n.has_value()) return n.mean_value();
  if (n.is_buggy && !n.fixed) return temp_value(id);
  return n.eval_value;
}

bool SearchTree::selectable(NodeId id) const {
  const auto& n = node(id);
  for (const auto& arm : n.arms) {
    if (arm.child) {
      if (selectable(*arm.child)) return true;
    } else if (arm.type != ActionType::fix || !chain_exhausted(id)) {
      return true;
    }
  }
  return false;
}

int SearchTree::expanded_of_type(NodeId id, ActionType type) const {
  const auto& arms = node(id).arms;
  return static_cast<int>(std::count_if(arms.begin(), arms.end(), [&](const ActionArm& a) { return a.child && a.type == type; }));
}

std::optional<double> SearchTree::local_mean(NodeId id, ActionType type) const {
  double sum = 0.0;
  int n = 0;
  for (const auto& arm : node(id).arms) {
    if (arm.child && arm.type == type) {
      sum += node_value(*arm.child);
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

std::vector<double> SearchTree::arm_scores(NodeId id, const ValueEstimator& estimator) const {
  const auto& n = node(id);
  const int parent_visits = std::max(1, n.visits);
  std::vector<double> scores;
  scores.reserve(n.arms.size());
  for (const auto& arm : n.arms) {
    double value;
    if (arm.child) {
      if (!selectable(*arm.child)) {
        scores.push_back(-std::numeric_limits<double>::infinity());
        continue;
      }
      value = node_value(*arm.child);
    } else if (arm.type == ActionType::fix) {
      if (chain_exhausted(id)) {
        scores.push_back(-std::numeric_limits<double>::infinity());
        continue;
      }
      value = temp_value(id);
    } else {
      value = estimator.estimate(arm.type, local_mean(id, arm.type));
    }
    scores.push_back(
        uct_score(value, parent_visits, expanded_of_type(id, arm.type), config_.exploration, config_.epsilon));
  }
  return scores;
}

std::vector<PathStep> SearchTree::select(const ValueEstimator& estimator) const {
  std::vector<PathStep> path;
  if (!selectable(0)) return path;
  NodeId at = 0;
  for (;;) {
    auto scores = arm_scores(at, estimator);
    auto best = argmax_first(scores);
    path.push_back({at, best});
    const auto& arm = node(at).arms[best];
    if (!arm.child) return path;
    at = *arm.child;
  }
}

void SearchTree::give_arms(SearchNode& n) const {
  n.arms.clear();
  if (n.is_buggy) {
    if (config_.enabled(ActionType::fix) && !chain_exhausted(n.id)) n.arms.push_back({ActionType::fix, std::nullopt});
    return;
  }
  if (config_.enabled(ActionType::generate)) n.arms.push_back({ActionType::generate, std::nullopt});
  if (config_.enabled(ActionType::improve)) n.arms.push_back({ActionType::improve, std::nullopt});
}

NodeId SearchTree::attach(NodeId parent_id, std::size_t arm_index, SearchNode child) {
  const NodeId id = nodes_.size();
  auto& parent = node(parent_id);
  auto& arm = parent.arms.at(arm_index);
  const ActionType type = arm.type;

  child.id = id;
  child.parent = parent_id;
  child.incoming = type;
  child.depth = parent.depth + 1;
  child.visits = 1;
  child.value_sum = 0.0;
  child.value_count = 0;

  if (child.is_buggy) {
    if (type == ActionType::fix && parent.is_buggy) {
      // Another failed repair: the child joins the parent's chain.
      child.chain_root = parent.chain_root;
      ++node(parent.chain_root).failed_fixes;
    } else {
      child.chain_root = id;
      child.failed_fixes = 0;
    }
  } else {
    child.chain_root = id;
    if (type == ActionType::fix && parent.is_buggy) {
      for (NodeId at = parent_id;; at = *node(at).parent) {
        auto& n = node(at);
        if (!n.is_buggy || n.fixed) break;
        n.fixed = true;
        if (!n.parent) break;
      }
    }
  }

  nodes_.push_back(std::move(child));
  auto& stored = nodes_.back();
  give_arms(stored);

  auto& p = node(parent_id);
  p.arms[arm_index].child = id;
  if (type != ActionType::fix) p.arms.push_back({type, std::nullopt});
  return id;
}

void SearchTree::backpropagate(NodeId leaf, double value) {
  double v = value;
  for (std::optional<NodeId> at = leaf; at; at = node(*at).parent) {
    auto& n = node(*at);
    n.value_sum += v;
    ++n.value_count;
    v *= config_.gamma;
  }
}

void SearchTree::visit(const std::vector<PathStep>& path) {
  for (const auto& step : path) ++node(step.node).visits;
}

std::vector<NodeId> SearchTree::path_to(NodeId id) const {
  std::vector<NodeId> path;
  for (std::optional<NodeId> at = id; at; at = node(*at).parent) path.push_back(*at);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace cwm::search
