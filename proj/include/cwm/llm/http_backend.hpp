#pragma once

#include <string>

#include <json.hpp>

#include "cwm/llm/backend.hpp"

namespace cwm::llm {

/// Chat-completions client for OpenAI-compatible servers.
///
/// POSTs {model, messages, temperature, top_p, max_tokens} to
/// `<base_url>/chat/completions` with a bearer token read from the configured
/// environment variable, and returns the first choice's message content.
/// 429, 5xx, connection failures and timeouts are retried with exponential
/// backoff; other HTTP errors fail immediately.
class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(BackendConfig config);

  CompletionResponse complete(const CompletionRequest& request) override;

  /// The JSON body that `complete` would send. Exposed for tests.
  nlohmann::json build_body(const CompletionRequest& request) const;

 private:
  BackendConfig config_;
  std::string scheme_host_port_;
  std::string path_prefix_;
};

}  // namespace cwm::llm
