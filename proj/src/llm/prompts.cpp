#include "cwm/llm/prompts.hpp"

#include <cctype>

namespace cwm::llm {

namespace {

constexpr std::string_view kSystemIncomplete =
    R"PROMPT(You are an experienced Python developer. You will be provided with an incomplete code snippet from a Python program. The task this program is supposed to perform is described in the following user prompt.
Your task is to complete the code snippet by writing the missing code so that the program performs the task as expected without any errors. You will be rewarded based on the number of test cases your code passes.)PROMPT";

constexpr std::string_view kSystemIncorrectSnippet =
    R"PROMPT(You are an experienced Python developer. You will be provided with an incorrect code snippet from a Python program. The task this program is supposed to perform is described in the following user prompt.
Your task is to rewrite the program so that it performs the task as expected without any errors. You will be rewarded based on the number of test cases your code passes.)PROMPT";

constexpr std::string_view kSystemIncorrectProgram =
    R"PROMPT(You are an experienced Python developer. You will be provided with an incorrect Python program. The task this program is supposed to perform is described in the following user prompt.
Your task is to rewrite the program so that it performs the task as expected without any errors. You will be rewarded based on the number of test cases your code passes.)PROMPT";

constexpr std::string_view kStdioNote =
    "Please read the inputs from the standard input (stdin) and print the outputs to the standard "
    "output (stdout).";

constexpr std::string_view kClassDefinition =
    R"PROMPT(## Class Definition

The class should be called "Environment". It should have at least:

- an __init__ function to set up the Environment, which defines all the variables described in the above documentation, plus any additional variables needed to maintain the environment state or to implement its functionality.

- a set_state function to set a custom value for the environment and its internal representation (you can assume that when "set_state" is used, the task is not done and internal variables should be set as a consequence). set_state takes a single argument as input: a state observation from the observation space defined above.

- a step function to predict a step in the environment. The input parameters for the step function are:

    - An action, which must be contained in the action space described above.

    The outputs required by the step function are:

    - An observation, which must be contained in the observation space described above.

    - The reward for taking the action, as described in the reward definition above.

    - A boolean variable indicating if the episode is done.

## Important Notes

Only produce the environment class, containing the __init__, set_state and step functions and any additional functions you may need to complete this task. Do not write an example of how to use the class or anything else.
Be careful about edge cases.
Make sure to write all the required functions and that they have the exact names as specified in the task description. Missing or incorrectly named functions will not pass the tests and will result in a score of 0.
It is of VITAL importance that you do not leave undefined any function, but implement each of them completely.)PROMPT";

constexpr std::string_view kImproveInstructionsIo =
    R"PROMPT(First, write an explanation of the difference between the ground-truth output and the program's output in the example provided.
Secondly, point out the part of the code responsible for the incorrect prediction and why its logic is erroneous.
Third, suggest a concrete, actionable fix for it.
Finally fix the program in its entirety following the suggestion. The expected output is in the format:)PROMPT";

constexpr std::string_view kImproveInstructionsCwm =
    R"PROMPT(First, write an explanation of the difference between the ground-truth transition and the step function's outputs in the example provided.
Second, point out the part of the code responsible for the incorrect prediction and why its logic is erroneous.
Third, suggest a concrete, actionable fix for it.
Finally, fix the program in its entirety following the suggestion. The expected output is in the format:)PROMPT";

constexpr std::string_view kImproveBody =
    R"PROMPT(## Error explanation

[your explanation of the error]

## Error location and wrong logic

[where the error comes from and why]

## Fix suggestion

[how to fix the error]

## Correct code

```python
[your code]
```

## Incorrect code

You are provided with the following code snippet to fix.

```python
{CODE}
```

The code additionally makes a wrong prediction about this input.

## Input

{INPUT}

## Ground-truth output

{OUTPUT}

## Code incorrect outputs

{PREDICTION})PROMPT";

constexpr std::string_view kFixInstructions =
    R"PROMPT(First, write an explanation of the error and point out the part of the code responsible for the error and why its logic is erroneous.
Second, suggest how you would fix the error, reasoning about the problem.
Finally fix the program in its entirety following the suggestion. The expected output is in the format:

## Error explanation

[your explanation of the error]

## Fix suggestion

[how to fix the error]

## Correct code

```python
[your code]
```

## Incorrect code

You are provided with the following code snippet to fix.

```python
{CODE}
```

{ERROR})PROMPT";

constexpr std::string_view kGenerateOutputFormatIo =
    "Output your code solution with the following format:\n```python\n[your code]\n```";

constexpr std::string_view kGeneratePrefix = "```python\n{CODE_SO_FAR}";
constexpr std::string_view kRepairPrefix = "## Error explanation";

std::string join(std::initializer_list<std::string_view> parts, std::string_view sep) {
  std::string out;
  bool first = true;
  for (auto part : parts) {
    if (!first) out += sep;
    out += part;
    first = false;
  }
  return out;
}

struct Template {
  std::string system;
  std::string user;
  std::string assistant_prefix;
};

Template select_template(ActionType action, TaskKind kind) {
  const bool io = kind == TaskKind::io_problem;
  std::string head = io ? join({"{PROB_DESCRIPTION}", kStdioNote}, "\n\n")
                        : join({"{ENV_DESCRIPTION}", kClassDefinition}, "\n\n");
  switch (action) {
    case ActionType::generate:
      return {std::string(kSystemIncomplete),
              io ? join({head, kGenerateOutputFormatIo}, "\n") : head,
              std::string(kGeneratePrefix)};
    case ActionType::improve:
      return {std::string(kSystemIncorrectSnippet),
              join({head, io ? kImproveInstructionsIo : kImproveInstructionsCwm, kImproveBody}, "\n\n"),
              std::string(kRepairPrefix)};
    case ActionType::fix:
      return {std::string(kSystemIncorrectProgram), join({head, kFixInstructions}, "\n\n"),
              std::string(kRepairPrefix)};
  }
  throw std::logic_error("unreachable action type");
}

// The template supplies the newline before the closing fence.
std::string fenced_body(std::string code) {
  while (!code.empty() && code.back() == '\n') code.pop_back();
  return code;
}

}  // namespace

std::string_view to_string(TaskKind kind) {
  return kind == TaskKind::cwm ? "cwm" : "io_problem";
}

std::string fill_template(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      std::size_t j = i + 1;
      while (j < tmpl.size() && (std::isupper(static_cast<unsigned char>(tmpl[j])) || tmpl[j] == '_')) ++j;
      if (j < tmpl.size() && tmpl[j] == '}' && j > i + 1) {
        std::string name(tmpl.substr(i + 1, j - i - 1));
        auto it = values.find(name);
        if (it == values.end()) throw MissingPlaceholder(name);
        out += it->second;
        i = j + 1;
        continue;
      }
    }
    out += tmpl[i++];
  }
  return out;
}

PromptBundle render_prompt(ActionType action, TaskKind kind, const PromptContext& context) {
  std::map<std::string, std::string> values;
  if (!context.description.empty()) {
    values[kind == TaskKind::io_problem ? "PROB_DESCRIPTION" : "ENV_DESCRIPTION"] = context.description;
  }
  if (action == ActionType::generate) {
    std::string so_far = context.code.value_or("");
    if (!so_far.empty() && so_far.back() != '\n') so_far += '\n';
    values["CODE_SO_FAR"] = std::move(so_far);
  } else if (context.code && !context.code->empty()) {
    values["CODE"] = fenced_body(*context.code);
  }
  if (context.mismatch) {
    values["INPUT"] = context.mismatch->input;
    values["OUTPUT"] = context.mismatch->ground_truth;
    values["PREDICTION"] = context.mismatch->prediction;
  }
  if (context.error) values["ERROR"] = *context.error;

  auto tmpl = select_template(action, kind);
  return PromptBundle{fill_template(tmpl.system, values), fill_template(tmpl.user, values),
                      fill_template(tmpl.assistant_prefix, values)};
}

PromptBundle render_zero_shot(std::string_view description) {
  return PromptBundle{"", std::string(description) + "\n\nLet's think step by step.", ""};
}

}  // namespace cwm::llm
