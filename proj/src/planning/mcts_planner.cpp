#include "cwm/planning/mcts_planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cwm::planning {

void MctsPlannerConfig::validate() const {
  if (iterations < 1) throw ValidationError("MCTS iterations must be >= 1");
  if (max_actions < 0) throw ValidationError("max_actions must be >= 0");
  if (epsilon <= 0.0 || exploration < 0.0) throw ValidationError("bad MCTS exploration parameters");
  if (gamma <= 0.0 || gamma > 1.0) throw ValidationError("gamma must be in (0, 1]");
  if (temperature <= 0.0) throw ValidationError("softmax temperature must be > 0");
}

json MctsPlannerConfig::to_json() const {
  return json{{"iterations", iterations}, {"max_actions", max_actions}, {"C", exploration},
              {"epsilon", epsilon},       {"gamma", gamma},             {"temperature", temperature}};
}

std::vector<double> softmax(const std::vector<double>& values, const std::vector<bool>& mask, double temperature) {
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (mask[i]) top = std::max(top, values[i]);
  }
  std::vector<double> p(values.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!mask[i]) continue;
    p[i] = std::exp((values[i] - top) / temperature);
    total += p[i];
  }
  for (auto& x : p) x /= total;
  return p;
}

namespace {

struct Node {
  Value state;
  double reward = 0.0;  // collected on the way in
  bool terminal = false;
  std::vector<int> children;
  std::vector<std::int64_t> untried;
  int visits = 0;
  double value_sum = 0.0;
};

class Planner {
 public:
  Planner(WorldModel& model, std::int64_t num_actions, const MctsPlannerConfig& config, std::mt19937_64& rng)
      : model_(model), num_actions_(num_actions), config_(config), rng_(rng) {}

  MctsDecision run(const Value& root_state) {
    nodes_.push_back(make_node(root_state, 0.0, false));
    MctsDecision out;
    for (int i = 0; i < config_.iterations; ++i) simulate();
    out.simulations = config_.iterations;
    out.model_errors = errors_;

    const auto& root = nodes_[0];
    std::vector<bool> mask(static_cast<std::size_t>(num_actions_), false);
    out.values.assign(mask.size(), 0.0);
    out.visits.assign(mask.size(), 0);
    for (std::size_t a = 0; a < mask.size(); ++a) {
      int c = root.children[a];
      if (c < 0 || nodes_[c].visits == 0) continue;
      mask[a] = true;
      out.values[a] = nodes_[c].value_sum / nodes_[c].visits;
      out.visits[a] = nodes_[c].visits;
    }
    out.probabilities = softmax(out.values, mask, config_.temperature);
    std::discrete_distribution<std::int64_t> pick(out.probabilities.begin(), out.probabilities.end());
    out.action = pick(rng_);
    return out;
  }

 private:
  Node make_node(Value state, double reward, bool terminal) {
    Node n;
    n.state = std::move(state);
    n.reward = reward;
    n.terminal = terminal;
    n.children.assign(static_cast<std::size_t>(num_actions_), -1);
    if (!terminal) {
      for (std::int64_t a = 0; a < num_actions_; ++a) n.untried.push_back(a);
    }
    return n;
  }

  int select_child(const Node& n) const {
    int best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    const double log_n = std::log(static_cast<double>(std::max(1, n.visits)));
    for (int c : n.children) {
      if (c < 0) continue;
      const auto& child = nodes_[c];
      double v = child.visits > 0 ? child.value_sum / child.visits : 0.0;
      double score = v + config_.exploration * std::sqrt(log_n / (child.visits + config_.epsilon));
      if (score > best_score) {
        best_score = score;
        best = c;
      }
    }
    return best;
  }

  // Discounted return of a uniformly random policy from `s`.
  double random_rollout(Value s) {
    std::uniform_int_distribution<std::int64_t> pick(0, num_actions_ - 1);
    double ret = 0.0;
    double discount = 1.0;
    for (int t = 0; t < config_.max_actions; ++t) {
      Prediction p;
      try {
        p = model_.step(s, Value::of(static_cast<double>(pick(rng_))));
      } catch (const ModelError&) {
        ++errors_;
        break;
      }
      ret += discount * p.r;
      discount *= config_.gamma;
      if (p.d) break;
      s = std::move(p.s_next);
    }
    return ret;
  }

  void simulate() {
    std::vector<int> path{0};
    double leaf_value = 0.0;
    for (;;) {
      Node& n = nodes_[path.back()];
      if (n.terminal) break;
      if (!n.untried.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, n.untried.size() - 1);
        auto k = pick(rng_);
        std::int64_t a = n.untried[k];
        n.untried.erase(n.untried.begin() + static_cast<std::ptrdiff_t>(k));
        Value parent_state = n.state;
        Node child;
        try {
          auto p = model_.step(parent_state, Value::of(static_cast<double>(a)));
          child = make_node(std::move(p.s_next), p.r, p.d);
        } catch (const ModelError&) {
          // The simulation ends here with what it collected so far.
          ++errors_;
          child = make_node(parent_state, 0.0, true);
        }
        const int id = static_cast<int>(nodes_.size());
        nodes_[path.back()].children[static_cast<std::size_t>(a)] = id;
        nodes_.push_back(std::move(child));
        path.push_back(id);
        if (!nodes_[id].terminal) leaf_value = random_rollout(nodes_[id].state);
        break;
      }
      path.push_back(select_child(n));
    }

    double ret = leaf_value;
    for (std::size_t i = path.size(); i-- > 1;) {
      auto& n = nodes_[path[i]];
      ret = n.reward + config_.gamma * ret;
      ++n.visits;
      n.value_sum += ret;
    }
    ++nodes_[0].visits;
  }

  WorldModel& model_;
  std::int64_t num_actions_;
  const MctsPlannerConfig& config_;
  std::mt19937_64& rng_;
  std::vector<Node> nodes_;
  int errors_ = 0;
};

}  // namespace

MctsDecision mcts_plan(WorldModel& model, const Value& state, std::int64_t num_actions,
                       const MctsPlannerConfig& config, std::mt19937_64& rng) {
  config.validate();
  if (num_actions < 1) throw ValidationError("MCTS needs at least one action");
  Planner planner(model, num_actions, config, rng);
  return planner.run(state);
}

}  // namespace cwm::planning
