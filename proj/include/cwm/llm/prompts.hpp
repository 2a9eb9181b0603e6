#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "cwm/core/types.hpp"

namespace cwm::llm {

enum class TaskKind { cwm, io_problem };

std::string_view to_string(TaskKind kind);

/// A chat prompt. `assistant_prefix` pre-fills the head of the model's reply.
struct PromptBundle {
  std::string system;
  std::string user;
  std::string assistant_prefix;

  bool operator==(const PromptBundle&) const = default;
};

/// One transition (or test case) the current program gets wrong.
struct MismatchExample {
  std::string input;
  std::string ground_truth;
  std::string prediction;
};

struct PromptContext {
  std::string description;
  /// Code so far for generate (may be absent), the full program for improve/fix.
  std::optional<std::string> code;
  std::optional<MismatchExample> mismatch;
  std::optional<std::string> error;
};

/// Thrown when a template placeholder has no value; what() is "missing <NAME>".
class MissingPlaceholder : public std::invalid_argument {
 public:
  explicit MissingPlaceholder(std::string name)
      : std::invalid_argument("missing " + name), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// Substitutes every {NAME} placeholder (NAME = [A-Z_]+) in one pass.
/// Substituted text is never rescanned.
std::string fill_template(std::string_view tmpl, const std::map<std::string, std::string>& values);

PromptBundle render_prompt(ActionType action, TaskKind kind, const PromptContext& context);

/// Zero-shot chain-of-thought prompt: the description followed by the
/// step-by-step cue.
PromptBundle render_zero_shot(std::string_view description);

}  // namespace cwm::llm
