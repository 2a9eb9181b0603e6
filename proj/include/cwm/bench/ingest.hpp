#pragma once

#include <filesystem>

#include "cwm/core/types.hpp"

namespace cwm::bench {

/// Reads <dir>/description.md, spaces.json and buffer.jsonl. Errors name the
/// file, the line (for the buffer) and the offending field.
EnvTask ingest_environment(const std::filesystem::path& dir);

/// Reads <dir>/statement.md and tests.jsonl ({"input", "output"} per line).
/// The first ceil(n/2) tests are eligible as improve feedback.
IOProblem ingest_io_problem(const std::filesystem::path& dir);

/// Writes the three environment files into `dir` (created if needed).
void write_environment(const EnvTask& task, const std::filesystem::path& dir);

}  // namespace cwm::bench
