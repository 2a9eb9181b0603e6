#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "cwm/core/types.hpp"

namespace cwm {

using json = nlohmann::json;

/// Scalars encode as bare numbers (integers when integral); vectors as arrays.
json value_to_json(const Value& value);
/// Accepts a number or an array of numbers; throws ValidationError otherwise.
Value value_from_json(const json& j);

json space_to_json(const SpaceSpec& space);
SpaceSpec space_from_json(const json& j);

json transition_to_json(const Transition& t);
/// Throws ValidationError naming the offending field.
Transition transition_from_json(const json& j);

json prediction_to_json(const Prediction& p);
Prediction prediction_from_json(const json& j);

json error_to_json(const ExecError& e);
ExecError error_from_json(const json& j);

json report_to_json(const EvaluationReport& report);
json unit_result_to_json(const UnitTestResult& result);

/// Writes `content` to a sibling temp file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

}  // namespace cwm
