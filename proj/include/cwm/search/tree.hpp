#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cwm/core/types.hpp"
#include "cwm/search/config.hpp"
#include "cwm/search/value_estimator.hpp"

namespace cwm::search {

using NodeId = std::size_t;

std::vector<std::string> split_lines(std::string_view text);
std::string join_lines(const std::vector<std::string>& lines);

/// Number of lines that are non-empty after stripping trailing whitespace.
std::size_t count_code_lines(const std::vector<std::string>& lines);

struct StateSplit {
  std::vector<std::string> state;
  std::vector<std::string> rollout;
};

/// The child's state is the program up to and including its (k + L)-th
/// non-empty line, where k counts the parent state's non-empty lines; blank
/// lines belong to the line that follows them. Short programs become all state.
StateSplit split_state_rollout(const std::vector<std::string>& parent_state, const std::vector<std::string>& program,
                               int lines_per_state);

struct ActionArm {
  ActionType type = ActionType::generate;
  std::optional<NodeId> child;
};

struct SearchNode {
  NodeId id = 0;
  std::optional<NodeId> parent;
  std::optional<ActionType> incoming;  // empty for the root
  int depth = 0;

  std::vector<std::string> state_lines;
  std::vector<std::string> rollout_lines;

  /// What evaluation said about this node's program (0 for buggy programs).
  double eval_value = 0.0;
  /// Backed-up values; temporary values never enter here.
  double value_sum = 0.0;
  int value_count = 0;
  int visits = 0;

  bool is_buggy = false;
  /// A buggy node some later fix in its chain repaired.
  bool fixed = false;
  /// First node of the fix chain this buggy node belongs to.
  NodeId chain_root = 0;
  /// Failed repairs so far; only meaningful on a chain root.
  int failed_fixes = 0;

  std::optional<ExecError> error;
  std::optional<EvaluationReport> report;
  std::vector<UnitTestResult> tests;
  std::vector<ActionArm> arms;

  std::string program() const;
  bool has_value() const { return value_count > 0; }
  double mean_value() const { return value_count > 0 ? value_sum / value_count : 0.0; }
};

/// One step of a selection path: the node and the index of the arm taken.
struct PathStep {
  NodeId node;
  std::size_t arm;
};

class SearchTree {
 public:
  explicit SearchTree(const SearchConfig& config);

  const SearchNode& node(NodeId id) const { return nodes_.at(id); }
  SearchNode& node(NodeId id) { return nodes_.at(id); }
  const std::vector<SearchNode>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  const SearchConfig& config() const { return config_; }

  /// Descends from the root by argmax UCT until it reaches an unexpanded arm.
  /// Empty when nothing is selectable.
  std::vector<PathStep> select(const ValueEstimator& estimator) const;

  /// Scores of every arm at `id`, as used by select; unselectable arms are
  /// -infinity.
  std::vector<double> arm_scores(NodeId id, const ValueEstimator& estimator) const;

  /// The value a child contributes to its parent's UCT: the mean of its
  /// backups, else its chain's temporary value when buggy.
  double node_value(NodeId id) const;
  double temp_value(NodeId id) const;
  bool chain_exhausted(NodeId id) const;
  /// False when no unexpanded arm is reachable below `id`.
  bool selectable(NodeId id) const;

  /// Number of expanded arms of `type` at `id`.
  int expanded_of_type(NodeId id, ActionType type) const;
  /// Mean node value of the expanded children of `type` at `id`, if any.
  std::optional<double> local_mean(NodeId id, ActionType type) const;

  /// Attaches a new node through `arm` of `parent` and returns its id. Arms
  /// are set up from the node's health; a fresh arm of the same type is
  /// appended to the parent unless the action was a fix.
  NodeId attach(NodeId parent, std::size_t arm, SearchNode child);

  /// Adds `value` to `leaf` and every ancestor, discounted by gamma per level.
  void backpropagate(NodeId leaf, double value);
  /// +1 visit on every node of the path.
  void visit(const std::vector<PathStep>& path);

  std::vector<NodeId> path_to(NodeId id) const;

 private:
  void give_arms(SearchNode& node) const;

  SearchConfig config_;
  std::vector<SearchNode> nodes_;
};

}  // namespace cwm::search
