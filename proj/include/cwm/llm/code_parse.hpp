#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cwm::llm {

/// The completion held no extractable code.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Extracts the program text from a completion.
///
/// If `assistant_prefix` left a code fence open, the completion is a
/// continuation and everything up to the closing fence is returned. Otherwise
/// the body of the first fenced block wins; with no fences at all the whole
/// completion is returned. Leading blank lines and trailing whitespace are
/// dropped. Throws ParseError when nothing remains.
std::string parse_code(std::string_view completion, std::string_view assistant_prefix = {});

/// True when `text` contains an odd number of fence lines.
bool opens_fence(std::string_view text);

}  // namespace cwm::llm
