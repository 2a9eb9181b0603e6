#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "cwm/core/json_io.hpp"
#include "cwm/core/matching.hpp"
#include "cwm/core/types.hpp"

namespace cwm::search {

/// Prior for the global value mean of an action type: `value` counted as if
/// it had been observed `count` times.
struct Prior {
  double value = 0.5;
  double count = 2.0;
};

struct SearchConfig {
  int budget = 50;
  int lines_per_state = 2;  // L
  double epsilon = 1.0;
  double exploration = 0.1;  // C
  double gamma = 1.0;
  Prior prior_generate{0.5, 2.0};
  Prior prior_improve{0.55, 2.0};
  int max_fixes = 3;  // f
  std::vector<ActionType> enabled_actions{ActionType::generate, ActionType::improve, ActionType::fix};
  std::uint64_t seed = 0;
  double learning_rate = 0.05;
  ToleranceConfig tolerance;
  double io_case_timeout = 4.0;

  bool enabled(ActionType action) const;
  /// Throws ValidationError.
  void validate() const;
  json to_json() const;
};

/// "no-generate", "no-improve" or "no-fix"; removes that action.
/// Throws ValidationError for other names.
SearchConfig apply_ablation(SearchConfig config, std::string_view ablation);

}  // namespace cwm::search
