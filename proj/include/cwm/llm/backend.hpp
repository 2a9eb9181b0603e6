#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "cwm/core/types.hpp"
#include "cwm/llm/prompts.hpp"

namespace cwm::llm {

/// Decoding parameters; defaults are the backbone settings used for search.
struct SamplingParams {
  int max_new_tokens = 1500;
  double temperature = 1.0;
  int top_k = 100;
  double top_p = 0.8;
};

struct CompletionRequest {
  PromptBundle prompt;
  SamplingParams params;
  /// Which expansion asked for this completion; the mock backend keys on it.
  ActionType action = ActionType::generate;
  std::optional<std::uint64_t> seed;
};

struct CompletionResponse {
  std::string text;
  /// False when the backend could not pre-fill the assistant turn and the
  /// prefix was folded into the user message instead.
  bool prefix_applied = true;
  nlohmann::json usage = nlohmann::json::object();
  double latency_seconds = 0.0;
};

class GatewayError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The HTTP backend gave up (retries exhausted, timeout, or a hard HTTP error).
class TransportError : public GatewayError {
 public:
  TransportError(const std::string& what, double elapsed_seconds)
      : GatewayError(what), elapsed_(elapsed_seconds) {}
  double elapsed_seconds() const { return elapsed_; }

 private:
  double elapsed_;
};

/// The mock script has no completion for the requested call.
class ScriptEndError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{1000};
  double backoff_multiplier = 2.0;
};

struct BackendConfig {
  enum class Kind { http, mock };
  Kind kind = Kind::mock;
  std::string base_url;
  std::string model;
  std::string script_path;
  std::string api_key_env = "CWM_LLM_API_KEY";
  RetryPolicy retry;
  std::chrono::milliseconds request_timeout{120000};
  bool supports_top_k = false;
  bool supports_prefill = false;
  /// Requests per second shared by every caller of one backend; 0 disables.
  double rate_limit = 0.0;

  /// Throws ValidationError if an http backend lacks base_url or model.
  void validate() const;
  /// Stable textual identity, used for manifest hashing.
  std::string describe() const;
};

/// Parses "http:<url>#<model>" or "mock:<script path>".
BackendConfig parse_backend_spec(std::string_view spec);

class Backend {
 public:
  virtual ~Backend() = default;
  virtual CompletionResponse complete(const CompletionRequest& request) = 0;
};

std::shared_ptr<Backend> make_backend(const BackendConfig& config);

}  // namespace cwm::llm
