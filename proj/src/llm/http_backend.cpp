#include "cwm/llm/http_backend.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <spdlog/spdlog.h>

namespace cwm::llm {

namespace {

constexpr std::string_view kFoldedPrefixNote =
    "\n\nBegin your reply with exactly the following text and continue from it:\n";

bool transient_status(int status) { return status == 429 || status >= 500; }

}  // namespace

HttpBackend::HttpBackend(BackendConfig config) : config_(std::move(config)) {
  config_.validate();
  const auto& url = config_.base_url;
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ValidationError(fmt::format("backend url '{}' has no scheme", url));
  }
  auto path_start = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_start);
  path_prefix_ = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
  if (!config_.supports_top_k) {
    spdlog::debug("backend {} does not accept top_k; the parameter is omitted", url);
  }
}

nlohmann::json HttpBackend::build_body(const CompletionRequest& request) const {
  const auto& prompt = request.prompt;
  nlohmann::json messages = nlohmann::json::array();
  if (!prompt.system.empty()) messages.push_back({{"role", "system"}, {"content", prompt.system}});
  std::string user = prompt.user;
  if (!prompt.assistant_prefix.empty() && !config_.supports_prefill) {
    user += kFoldedPrefixNote;
    user += prompt.assistant_prefix;
  }
  messages.push_back({{"role", "user"}, {"content", user}});
  if (!prompt.assistant_prefix.empty() && config_.supports_prefill) {
    messages.push_back({{"role", "assistant"}, {"content", prompt.assistant_prefix}});
  }
  nlohmann::json body{{"model", config_.model},
                      {"messages", std::move(messages)},
                      {"temperature", request.params.temperature},
                      {"top_p", request.params.top_p},
                      {"max_tokens", request.params.max_new_tokens}};
  if (config_.supports_top_k) body["top_k"] = request.params.top_k;
  if (request.seed) body["seed"] = *request.seed;
  return body;
}

CompletionResponse HttpBackend::complete(const CompletionRequest& request) {
  using clock = std::chrono::steady_clock;
  const auto started = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - started).count(); };

  const std::string body = build_body(request).dump();
  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", fmt::format("Bearer {}", key));
  }

  auto backoff = config_.retry.initial_backoff;
  std::string last_failure;
  for (int attempt = 0; attempt <= config_.retry.max_retries; ++attempt) {
    if (attempt > 0) {
      spdlog::warn("chat completion attempt {} failed ({}); retrying in {} ms", attempt, last_failure,
                   backoff.count());
      std::this_thread::sleep_for(backoff);
      backoff = std::chrono::milliseconds(
          static_cast<long long>(static_cast<double>(backoff.count()) * config_.retry.backoff_multiplier));
    }

    httplib::Client client(scheme_host_port_);
    auto timeout_s = std::chrono::duration_cast<std::chrono::seconds>(config_.request_timeout);
    auto timeout_us = std::chrono::duration_cast<std::chrono::microseconds>(config_.request_timeout - timeout_s);
    client.set_connection_timeout(timeout_s.count(), timeout_us.count());
    client.set_read_timeout(timeout_s.count(), timeout_us.count());
    client.set_write_timeout(timeout_s.count(), timeout_us.count());

    auto attempt_start = clock::now();
    auto res = client.Post(path_prefix_ + "/chat/completions", headers, body, "application/json");
    if (!res) {
      last_failure = fmt::format("{} after {:.3f}s", httplib::to_string(res.error()),
                                 std::chrono::duration<double>(clock::now() - attempt_start).count());
      continue;
    }
    if (transient_status(res->status)) {
      last_failure = fmt::format("HTTP {}", res->status);
      continue;
    }
    if (res->status != 200) {
      throw TransportError(
          fmt::format("chat completion failed with HTTP {}: {}", res->status, res->body.substr(0, 500)),
          elapsed());
    }

    nlohmann::json reply;
    try {
      reply = nlohmann::json::parse(res->body);
    } catch (const std::exception& e) {
      throw TransportError(fmt::format("unparseable chat completion response: {}", e.what()), elapsed());
    }
    const auto* content = [&]() -> const nlohmann::json* {
      auto choices = reply.find("choices");
      if (choices == reply.end() || !choices->is_array() || choices->empty()) return nullptr;
      auto message = (*choices)[0].find("message");
      if (message == (*choices)[0].end()) return nullptr;
      auto c = message->find("content");
      return c != message->end() && c->is_string() ? &*c : nullptr;
    }();
    if (!content) throw TransportError("chat completion response has no message content", elapsed());

    CompletionResponse out;
    out.text = content->get<std::string>();
    out.prefix_applied = config_.supports_prefill || request.prompt.assistant_prefix.empty();
    if (auto usage = reply.find("usage"); usage != reply.end()) out.usage = *usage;
    out.latency_seconds = elapsed();
    return out;
  }
  throw TransportError(fmt::format("chat completion failed after {} attempts: {} (elapsed {:.3f}s)",
                                   config_.retry.max_retries + 1, last_failure, elapsed()),
                       elapsed());
}

}  // namespace cwm::llm
