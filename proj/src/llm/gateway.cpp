#include "cwm/llm/gateway.hpp"

#include <algorithm>
#include <thread>

#include <fmt/format.h>

#include "cwm/llm/http_backend.hpp"
#include "cwm/llm/mock_backend.hpp"

namespace cwm::llm {

void BackendConfig::validate() const {
  if (kind == Kind::http) {
    if (base_url.empty()) throw ValidationError("http backend needs a base url");
    if (model.empty()) throw ValidationError("http backend needs a model name");
  } else if (script_path.empty()) {
    throw ValidationError("mock backend needs a script path");
  }
  if (retry.max_retries < 0) throw ValidationError("max_retries must be >= 0");
}

std::string BackendConfig::describe() const {
  if (kind == Kind::mock) return fmt::format("mock:{}", script_path);
  return fmt::format("http:{}#{};top_k={};prefill={};retries={};timeout_ms={}", base_url, model,
                     supports_top_k, supports_prefill, retry.max_retries, request_timeout.count());
}

BackendConfig parse_backend_spec(std::string_view spec) {
  BackendConfig config;
  if (spec.starts_with("mock:")) {
    config.kind = BackendConfig::Kind::mock;
    config.script_path = std::string(spec.substr(5));
  } else if (spec.starts_with("http:")) {
    auto rest = spec.substr(5);
    auto hash = rest.rfind('#');
    if (hash == std::string_view::npos) {
      throw ValidationError(fmt::format("backend '{}' must look like http:<url>#<model>", spec));
    }
    config.kind = BackendConfig::Kind::http;
    config.base_url = std::string(rest.substr(0, hash));
    config.model = std::string(rest.substr(hash + 1));
  } else {
    throw ValidationError(fmt::format("unknown backend '{}' (expected http:<url>#<model> or mock:<script>)", spec));
  }
  config.validate();
  return config;
}

std::shared_ptr<Backend> make_backend(const BackendConfig& config) {
  config.validate();
  if (config.kind == BackendConfig::Kind::mock) {
    return MockBackend::from_file(config.script_path);
  }
  return std::make_shared<HttpBackend>(config);
}

RateLimiter::RateLimiter(double per_second, double burst)
    : rate_(per_second), capacity_(std::max(1.0, burst)), tokens_(capacity_), last_(clock::now()) {}

void RateLimiter::acquire() {
  if (rate_ <= 0.0) return;
  std::unique_lock lock(mutex_);
  for (;;) {
    auto now = clock::now();
    tokens_ = std::min(capacity_, tokens_ + std::chrono::duration<double>(now - last_).count() * rate_);
    last_ = now;
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    auto wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
    lock.unlock();
    std::this_thread::sleep_for(wait);
    lock.lock();
  }
}

Gateway::Gateway(std::shared_ptr<Backend> backend, SamplingParams defaults, double rate_limit)
    : backend_(std::move(backend)), defaults_(defaults), limiter_(rate_limit) {
  if (!backend_) throw ValidationError("gateway needs a backend");
}

CompletionResponse Gateway::complete(const PromptBundle& prompt, ActionType action,
                                     std::optional<std::uint64_t> seed) {
  limiter_.acquire();
  CompletionRequest request{prompt, defaults_, action, seed};
  auto response = backend_->complete(request);
  ++calls_;
  return response;
}

}  // namespace cwm::llm
