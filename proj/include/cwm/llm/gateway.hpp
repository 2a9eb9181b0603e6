#pragma once

#include <atomic>
#include <chrono>
#include <memory>
#include <mutex>

#include "cwm/llm/backend.hpp"
#include "cwm/llm/prompts.hpp"

namespace cwm::llm {

/// Token bucket shared by every caller of one backend. A rate of 0 never blocks.
class RateLimiter {
 public:
  explicit RateLimiter(double per_second, double burst = 1.0);
  void acquire();

 private:
  using clock = std::chrono::steady_clock;
  double rate_;
  double capacity_;
  double tokens_;
  clock::time_point last_;
  std::mutex mutex_;
};

/// Front door for completions: applies default sampling parameters and the
/// rate limit, and counts calls. Shareable across concurrent searches.
class Gateway {
 public:
  Gateway(std::shared_ptr<Backend> backend, SamplingParams defaults = {}, double rate_limit = 0.0);

  /// Throws GatewayError subclasses on failure.
  CompletionResponse complete(const PromptBundle& prompt, ActionType action,
                              std::optional<std::uint64_t> seed = std::nullopt);

  std::size_t calls() const { return calls_.load(); }
  const SamplingParams& defaults() const { return defaults_; }

 private:
  std::shared_ptr<Backend> backend_;
  SamplingParams defaults_;
  RateLimiter limiter_;
  std::atomic<std::size_t> calls_{0};
};

}  // namespace cwm::llm
