#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cwm/bench/manifest.hpp"
#include "cwm/core/json_io.hpp"

namespace cwm::bench {

struct ResultRow {
  std::string run;
  std::string method;
  std::string task;
  std::string group;  // "discrete", "continuous" or "io"
  std::optional<double> accuracy;
  std::optional<double> normalized_return;
  std::optional<double> normalized_return_error;
  std::optional<bool> solved;
  int llm_calls_used = 0;
  double wall_time = 0.0;
};

struct Aggregate {
  int rows = 0;
  std::optional<double> mean_accuracy;
  std::optional<double> mean_normalized_return;
  std::optional<double> solved_fraction;
  double mean_llm_calls = 0.0;
  double mean_wall_time = 0.0;
};

struct ResultsTable {
  std::vector<ResultRow> rows;
  /// Keyed by group, plus "all".
  std::map<std::string, Aggregate> aggregates;

  json to_json() const;
  std::string to_csv() const;
  std::string to_text() const;
};

ResultRow row_from_manifest(const RunManifest& manifest, const std::string& run_name);

/// Means over the rows that report each quantity.
Aggregate aggregate(const std::vector<const ResultRow*>& rows);

ResultsTable build_results(std::vector<ResultRow> rows);

/// Every run directory below `root` holding a manifest, sorted by name.
std::vector<std::filesystem::path> find_runs(const std::filesystem::path& root);

}  // namespace cwm::bench
