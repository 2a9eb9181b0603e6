#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cwm/core/json_io.hpp"
#include "cwm/fixtures/fixtures.hpp"
#include "cwm/planning/cem_planner.hpp"
#include "cwm/planning/mcts_planner.hpp"
#include "cwm/planning/model.hpp"
#include "cwm/sandbox/runtime.hpp"

namespace cwm::planning {

/// Chooses actions during an episode.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual void reset() {}
  /// Throws ModelError or PlannerError when the model lets it down; the
  /// episode then plays a random action for that step.
  virtual Value act(const Value& state, std::mt19937_64& rng) = 0;
};

class RandomPolicy final : public Policy {
 public:
  explicit RandomPolicy(SpaceSpec actions) : actions_(std::move(actions)) {}
  Value act(const Value& state, std::mt19937_64& rng) override;

 private:
  SpaceSpec actions_;
};

class MctsPolicy final : public Policy {
 public:
  MctsPolicy(WorldModel& model, std::int64_t num_actions, MctsPlannerConfig config)
      : model_(&model), num_actions_(num_actions), config_(config) {}
  Value act(const Value& state, std::mt19937_64& rng) override;

 private:
  WorldModel* model_;
  std::int64_t num_actions_;
  MctsPlannerConfig config_;
};

/// Plans T steps, plays them open-loop, and re-plans when they run out.
class CemPolicy final : public Policy {
 public:
  CemPolicy(WorldModel& model, SpaceSpec actions, CemPlannerConfig config)
      : model_(&model), actions_(std::move(actions)), config_(config) {}
  void reset() override { queue_.clear(); }
  Value act(const Value& state, std::mt19937_64& rng) override;

 private:
  WorldModel* model_;
  SpaceSpec actions_;
  CemPlannerConfig config_;
  std::deque<Value> queue_;
};

struct EpisodeStep {
  Value s;
  Value a;
  double r = 0.0;
  Value s_next;
  bool d = false;
  /// The policy failed and a random action was played instead.
  std::optional<std::string> fallback;
};

struct EpisodeResult {
  double total_return = 0.0;
  int steps = 0;
  bool terminated = false;
  std::vector<EpisodeStep> log;

  json to_json() const;
};

inline constexpr int kDefaultEpisodeSteps = 100;

EpisodeResult run_episode(const fixtures::FixtureEnv& env, Policy& policy, int max_steps, std::mt19937_64& rng);

enum class PlannerKind { mcts, cem };

/// MCTS for discrete action spaces, CEM for boxes.
PlannerKind planner_for(const SpaceSpec& action_space);

struct PlannerSettings {
  MctsPlannerConfig mcts;
  CemPlannerConfig cem;
  int max_steps = kDefaultEpisodeSteps;
};

std::unique_ptr<Policy> make_planner_policy(WorldModel& model, const SpaceSpec& action_space,
                                            const PlannerSettings& settings);

struct CwmPlanningReport {
  double normalized_return = 0.0;
  double standard_error = 0.0;
  double mean_cwm = 0.0;
  double mean_true = 0.0;
  double mean_random = 0.0;
  std::vector<EpisodeResult> cwm_episodes;
  std::vector<EpisodeResult> true_episodes;
  std::vector<EpisodeResult> random_episodes;
  bool model_unusable = false;
  std::string note;

  json to_json(bool with_logs = false) const;
};

/// Plays `episodes` episodes each with the planner over the candidate program,
/// the planner over the true environment, and a random policy; episode i of
/// every arm uses seed `seed + i`. The normalized return uses the mean
/// returns; its error is the standard error of the per-episode differences
/// between the candidate and oracle returns, in normalized units.
CwmPlanningReport evaluate_cwm(const std::string& program, const fixtures::FixtureEnv& env,
                               sandbox::ProgramRuntime& runtime, const PlannerSettings& settings, int episodes = 10,
                               std::uint64_t seed = 0);

}  // namespace cwm::planning
