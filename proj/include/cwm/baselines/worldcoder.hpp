#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cwm/llm/gateway.hpp"
#include "cwm/sandbox/evaluator.hpp"
#include "cwm/search/config.hpp"
#include "cwm/search/expansion.hpp"
#include "cwm/search/trace.hpp"

namespace cwm::baselines {

struct WorldCoderConfig {
  int budget = 50;
  double concentration = 5.0;  // C
  std::uint64_t seed = 0;
  /// Tolerances and test timeouts shared with the tree search.
  search::SearchConfig evaluation;

  void validate() const;
  json to_json() const;
};

struct BanditArm {
  std::string program;
  double alpha = 1.0;
  double beta = 1.0;
  double score = 0.0;
  bool is_buggy = false;
  sandbox::ProgramEvaluation evaluation;
};

/// (1 + C r, 1 + C (1 - r)).
std::pair<double, double> beta_init(double r, double concentration);

/// One Beta(alpha, beta) draw, as X / (X + Y) with X ~ Gamma(alpha), Y ~ Gamma(beta).
double sample_beta(double alpha, double beta, std::mt19937_64& rng);

/// Index of the arm with the highest single Beta draw; ties go to the lowest index.
std::size_t thompson_select(std::span<const BanditArm> arms, std::mt19937_64& rng);

/// Success (alpha += 1) iff the child strictly improved on the sampled arm.
void beta_update(BanditArm& arm, double child_score, double parent_score);

struct WorldCoderResult {
  std::string program;
  std::optional<sandbox::ProgramEvaluation> best_eval;
  search::SearchTrace trace;
  std::vector<BanditArm> arms;
};

/// Call 1 generates a program; every later call Thompson-samples an arm and
/// fixes it when buggy, improves it otherwise. Each result joins the pool.
/// Stops at a perfect score or when the budget is spent.
WorldCoderResult worldcoder_search(const search::TaskView& task, const WorldCoderConfig& config,
                                   llm::Gateway& gateway, sandbox::ProgramRuntime& runtime);

}  // namespace cwm::baselines
