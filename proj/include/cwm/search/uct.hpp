#pragma once

#include <cstddef>
#include <span>

namespace cwm::search {

/// value + C * sqrt(ln(parent_visits) / (same_type + epsilon)).
/// `same_type` counts the parent's expanded children of the arm's action type.
double uct_score(double value, int parent_visits, int same_type, double exploration, double epsilon);

/// Temporary value of a buggy node after `failed_fixes` unsuccessful repairs:
/// 0.99 * (1 - k/f), reaching 0 at k = f.
double buggy_temp_value(int failed_fixes, int max_fixes);

/// Index of the largest score; ties go to the lowest index. Empty input -> npos.
std::size_t argmax_first(std::span<const double> scores);

}  // namespace cwm::search
