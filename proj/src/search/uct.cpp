#include "cwm/search/uct.hpp"

#include <cmath>
#include <string>

#include "cwm/core/types.hpp"

namespace cwm::search {

double uct_score(double value, int parent_visits, int same_type, double exploration, double epsilon) {
  if (parent_visits < 1) throw ValidationError("parent visits must be >= 1");
  if (same_type < 0) throw ValidationError("same-type count must be >= 0");
  return value + exploration * std::sqrt(std::log(static_cast<double>(parent_visits)) / (same_type + epsilon));
}

double buggy_temp_value(int failed_fixes, int max_fixes) {
  if (max_fixes < 1 || failed_fixes < 0 || failed_fixes > max_fixes) {
    throw ValidationError("failed fixes must lie in [0, f]");
  }
  // Written this way so that k = 0 yields exactly 0.99.
  return 0.99 * (1.0 - static_cast<double>(failed_fixes) / max_fixes);
}

std::size_t argmax_first(std::span<const double> scores) {
  std::size_t best = std::string::npos;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (best == std::string::npos || scores[i] > scores[best]) best = i;
  }
  return best;
}

}  // namespace cwm::search
