#include "cwm/core/matching.hpp"

#include <cmath>
#include <vector>

namespace cwm {

bool within_tolerance(double x, double truth, const ToleranceConfig& tol) {
  if (x == truth) return true;
  return std::fabs(x - truth) <= tol.atol + tol.rtol * std::fabs(truth);
}

MatchFlags match_transition(const Prediction& predicted, const Transition& truth,
                            const SpaceSpec& observation_space, const ToleranceConfig& tol) {
  MatchFlags flags;
  const auto& p = predicted.s_next.elems;
  const auto& t = truth.s_next.elems;
  if (p.size() == t.size()) {
    flags.state = true;
    for (std::size_t i = 0; i < p.size() && flags.state; ++i) {
      flags.state = observation_space.is_discrete() ? p[i] == t[i] : within_tolerance(p[i], t[i], tol);
    }
  }
  flags.reward = within_tolerance(predicted.r, truth.r, tol);
  flags.done = predicted.d == truth.d;
  return flags;
}

std::string normalize_output(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    auto end = line.find_last_not_of(" \t\r\f\v");
    lines.push_back(end == std::string_view::npos ? std::string_view{} : line.substr(0, end + 1));
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return out;
}

UnitTestResult judge_output(std::string actual, std::string_view expected) {
  UnitTestResult result;
  result.status = normalize_output(actual) == normalize_output(expected)
                      ? UnitTestResult::Status::pass
                      : UnitTestResult::Status::wrong_output;
  result.actual = std::move(actual);
  return result;
}

}  // namespace cwm
