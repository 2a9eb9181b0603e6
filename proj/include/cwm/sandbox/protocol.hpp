#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "cwm/core/json_io.hpp"
#include "cwm/core/types.hpp"

namespace cwm::sandbox {

inline constexpr int kProtocolVersion = 1;

/// Operation names understood by workers.
namespace op {
inline constexpr std::string_view handshake = "handshake";
inline constexpr std::string_view load = "load";
inline constexpr std::string_view predict_batch = "predict_batch";
inline constexpr std::string_view step_from = "step_from";
inline constexpr std::string_view run_plan = "run_plan";
inline constexpr std::string_view run_io = "run_io";
inline constexpr std::string_view shutdown = "shutdown";
}  // namespace op

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Request {
  std::int64_t id = 0;
  std::string op;
  json args = json::object();

  bool operator==(const Request&) const = default;
};

struct Response {
  std::int64_t id = 0;
  bool ok = true;
  json result = json::object();
  std::optional<ExecError> error;

  static Response success(std::int64_t id, json result);
  static Response failure(std::int64_t id, ExecError error);

  bool operator==(const Response&) const = default;
};

/// Per-worker resource limits, sent to the worker as its first input line.
struct Limits {
  double cpu_seconds_per_call = 1.0;
  std::int64_t memory_cap_mb = 512;
  double wall_timeout = 60.0;

  json to_json() const;
  static Limits from_json(const json& j);
};

/// Single-line encodings (no trailing newline).
std::string encode(const Request& request);
std::string encode(const Response& response);

/// Throw ProtocolError on malformed input.
Request decode_request(std::string_view line);
Response decode_response(std::string_view line);

}  // namespace cwm::sandbox
