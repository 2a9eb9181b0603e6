#include "cwm/search/config.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace cwm::search {

bool SearchConfig::enabled(ActionType action) const {
  return std::find(enabled_actions.begin(), enabled_actions.end(), action) != enabled_actions.end();
}

void SearchConfig::validate() const {
  if (budget < 1) throw ValidationError("budget must be >= 1");
  if (lines_per_state < 1) throw ValidationError("lines per state must be >= 1");
  if (max_fixes < 1) throw ValidationError("max fixes must be >= 1");
  if (epsilon <= 0.0) throw ValidationError("epsilon must be > 0");
  if (exploration < 0.0) throw ValidationError("exploration constant must be >= 0");
  if (gamma <= 0.0 || gamma > 1.0) throw ValidationError("gamma must be in (0, 1]");
  if (learning_rate < 0.0) throw ValidationError("learning rate must be >= 0");
  for (const auto& p : {prior_generate, prior_improve}) {
    if (p.value < 0.0 || p.value > 1.0) throw ValidationError("priors must lie in [0, 1]");
    if (p.count < 0.0) throw ValidationError("prior pseudo-counts must be >= 0");
  }
  if (enabled_actions.empty()) throw ValidationError("at least one action must be enabled");
}

json SearchConfig::to_json() const {
  json actions = json::array();
  for (auto a : kAllActions) {
    if (enabled(a)) actions.push_back(std::string(to_string(a)));
  }
  return json{{"budget", budget},
              {"L", lines_per_state},
              {"epsilon", epsilon},
              {"C", exploration},
              {"gamma", gamma},
              {"prior_generate", {prior_generate.value, prior_generate.count}},
              {"prior_improve", {prior_improve.value, prior_improve.count}},
              {"f", max_fixes},
              {"enabled_actions", actions},
              {"seed", seed},
              {"learning_rate", learning_rate},
              {"atol", tolerance.atol},
              {"rtol", tolerance.rtol},
              {"io_case_timeout", io_case_timeout}};
}

SearchConfig apply_ablation(SearchConfig config, std::string_view ablation) {
  ActionType removed;
  if (ablation == "no-generate") {
    removed = ActionType::generate;
  } else if (ablation == "no-improve") {
    removed = ActionType::improve;
  } else if (ablation == "no-fix") {
    removed = ActionType::fix;
  } else {
    throw ValidationError(fmt::format("unknown ablation '{}' (expected no-generate, no-improve or no-fix)", ablation));
  }
  std::erase(config.enabled_actions, removed);
  return config;
}

}  // namespace cwm::search
