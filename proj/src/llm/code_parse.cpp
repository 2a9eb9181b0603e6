#include "cwm/llm/code_parse.hpp"

#include <vector>

namespace cwm::llm {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

// A fence line is ``` plus an optional one-word info string. Anything else
// after the backticks ("``` and then") means the fence is inline prose.
bool is_fence(std::string_view line) {
  auto first = line.find_first_not_of(" \t");
  if (first == std::string_view::npos || !line.substr(first).starts_with("```")) return false;
  auto rest = line.substr(first + 3);
  auto last = rest.find_last_not_of(" \t\r");
  rest = last == std::string_view::npos ? std::string_view{} : rest.substr(0, last + 1);
  return rest.find_first_of(" \t`") == std::string_view::npos;
}

std::string tidy(const std::vector<std::string_view>& lines, std::size_t begin, std::size_t end) {
  while (begin < end && lines[begin].find_first_not_of(" \t\r") == std::string_view::npos) ++begin;
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) out += '\n';
    out += lines[i];
  }
  auto last = out.find_last_not_of(" \t\r\n");
  out.erase(last == std::string::npos ? 0 : last + 1);
  return out;
}

}  // namespace

bool opens_fence(std::string_view text) {
  std::size_t fences = 0;
  for (auto line : split_lines(text)) fences += is_fence(line) ? 1 : 0;
  return fences % 2 == 1;
}

std::string parse_code(std::string_view completion, std::string_view assistant_prefix) {
  auto lines = split_lines(completion);
  std::string code;
  if (opens_fence(assistant_prefix)) {
    std::size_t end = 0;
    while (end < lines.size() && !is_fence(lines[end])) ++end;
    code = tidy(lines, 0, end);
  } else {
    std::size_t open = 0;
    while (open < lines.size() && !is_fence(lines[open])) ++open;
    if (open == lines.size()) {
      auto first = completion.find("```");
      auto second = first == std::string_view::npos ? first : completion.find("```", first + 3);
      if (second != std::string_view::npos) {
        // Inline fence such as "see ```print(1)``` above".
        auto inner = completion.substr(first + 3, second - first - 3);
        if (inner.starts_with("python ") || inner.starts_with("python\t")) inner.remove_prefix(7);
        auto inner_lines = split_lines(inner);
        code = tidy(inner_lines, 0, inner_lines.size());
      } else {
        code = tidy(lines, 0, lines.size());
      }
    } else {
      std::size_t close = open + 1;
      while (close < lines.size() && !is_fence(lines[close])) ++close;
      code = tidy(lines, open + 1, close);
    }
  }
  if (code.empty()) throw ParseError("completion contains no code");
  return code;
}

}  // namespace cwm::llm
