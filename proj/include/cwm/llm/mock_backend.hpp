#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "cwm/llm/backend.hpp"

namespace cwm::llm {

/// One scripted completion. `action` empty means "any action"; `index` empty
/// means "any index". With an action, `index` counts calls of that action
/// type; without one it counts all calls.
struct ScriptRecord {
  std::optional<ActionType> action;
  std::optional<std::size_t> index;
  std::string completion;
};

/// Replays scripted completions. Lookup order for a call: exact (action,
/// per-action index), then the action's wildcard, then (any, global index),
/// then the global wildcard. Thread-safe.
class MockBackend final : public Backend {
 public:
  explicit MockBackend(std::vector<ScriptRecord> records);

  /// Reads a JSON array of {action, index, completion} records, or one
  /// record per line.
  static std::shared_ptr<MockBackend> from_file(const std::filesystem::path& path);
  /// Plays `completions` in order regardless of action type.
  static std::shared_ptr<MockBackend> sequence(std::vector<std::string> completions);

  CompletionResponse complete(const CompletionRequest& request) override;

  std::vector<CompletionRequest> requests() const;
  std::size_t calls() const;

 private:
  std::vector<ScriptRecord> records_;
  mutable std::mutex mutex_;
  std::map<ActionType, std::size_t> per_action_calls_;
  std::size_t total_calls_ = 0;
  std::vector<CompletionRequest> log_;
};

std::vector<ScriptRecord> parse_script(std::string_view text);

}  // namespace cwm::llm
