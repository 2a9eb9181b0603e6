#include "cwm/search/trace.hpp"

namespace cwm::search {

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::solved: return "solved";
    case Termination::budget: return "budget";
    case Termination::aborted: return "aborted";
    case Termination::exhausted: return "exhausted";
  }
  return "?";
}

json trace_to_json(const SearchTrace& trace) {
  json expansions = json::array();
  for (const auto& e : trace.expansions) {
    expansions.push_back({{"step", e.step},
                          {"node", e.node},
                          {"parent", e.parent},
                          {"path", e.path},
                          {"action", std::string(to_string(e.action))},
                          {"value", e.value},
                          {"is_buggy", e.is_buggy},
                          {"error_class", e.error_class ? json(std::string(to_string(*e.error_class))) : json(nullptr)}});
  }
  json j{{"method", trace.method},
         {"seed", trace.seed},
         {"config", trace.config},
         {"task", trace.task},
         {"budget", trace.budget},
         {"llm_calls_used", trace.llm_calls_used},
         {"expansions", std::move(expansions)},
         {"best_node", trace.best_node ? json(*trace.best_node) : json(nullptr)},
         {"best_value", trace.best_value},
         {"best_program", trace.best_program},
         {"termination", std::string(to_string(trace.termination))}};
  if (!trace.abort_reason.empty()) j["abort_reason"] = trace.abort_reason;
  return j;
}

}  // namespace cwm::search
