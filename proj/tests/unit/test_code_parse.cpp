#include <doctest.h>

#include "cwm/llm/code_parse.hpp"
#include "support.hpp"

using namespace cwm;
using namespace cwm::llm;

TEST_CASE("code extraction") {
  CHECK(parse_code("Here you go:\n```python\nprint(1)\n```\nDone.") == "print(1)");
  CHECK(parse_code("text ```\nprint(1)\n``` text") == "print(1)");
  CHECK(parse_code("x=1\n```\nprose", "```python\n") == "x=1");
  CHECK(parse_code("x = 1\ny = 2\n") == "x = 1\ny = 2");
  CHECK(parse_code("\n\n  a\n\n") == "  a");
  // With a closed prefix the completion is read like any other.
  CHECK(parse_code("## Fix\n```python\nz = 3\n```\n", "## Error explanation") == "z = 3");
  // First fenced block wins.
  CHECK(parse_code("```\na\n```\n```\nb\n```") == "a");
  // Unterminated fence: everything after it.
  CHECK(parse_code("intro\n```python\nq = 1\n") == "q = 1");
}

TEST_CASE("nothing to extract") {
  CHECK_THROWS_AS(parse_code(""), ParseError);
  CHECK_THROWS_AS(parse_code("   \n\n"), ParseError);
  CHECK_THROWS_AS(parse_code("```python\n```"), ParseError);
}

TEST_CASE("fence detection") {
  CHECK(opens_fence("```python\n"));
  CHECK_FALSE(opens_fence("## Error explanation"));
  CHECK_FALSE(opens_fence("```\nx\n```\n"));
}

TEST_CASE("parsing fence-free text is idempotent") {
  test::Gen g(21);
  const std::vector<std::string> lines{"x = 1", "", "  return y", "def f():", "# note", "\t", "print('a')"};
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    for (int i = g.integer(1, 10); i > 0; --i) text += g.pick(lines) + "\n";
    std::string once;
    try {
      once = parse_code(text);
    } catch (const ParseError&) {
      continue;
    }
    CHECK(parse_code(once) == once);
  }
}
