#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "cwm/core/json_io.hpp"

namespace cwm::bench {

/// Describes one run directory. Written last, once, after every artifact.
struct RunManifest {
  std::string method;  // gif-mcts, worldcoder, zero-shot-cot, evaluate, plan
  std::string task;
  std::string task_kind;   // "cwm" or "io"
  std::string space_kind;  // "discrete", "continuous" or "" for io problems
  int budget = 0;
  std::uint64_t seed = 0;
  std::string backend;
  std::string backend_hash;
  json config = json::object();
  std::string started_at;
  std::string finished_at;
  /// Artifact name -> file name relative to the run directory.
  std::map<std::string, std::string> artifacts;
  json summary = json::object();

  json to_json() const;
  static RunManifest from_json(const json& j);
};

inline constexpr const char* kManifestFile = "manifest.json";

std::string utc_timestamp(std::chrono::system_clock::time_point t);
std::string iso_utc(std::chrono::system_clock::time_point t);

/// FNV-1a 64-bit of `text`, as 16 hex digits.
std::string stable_hash(std::string_view text);

/// Creates <root>/<timestamp>-<method>-<task>, adding -2, -3... on collision.
std::filesystem::path make_run_dir(const std::filesystem::path& root, const std::string& method,
                                   const std::string& task, std::chrono::system_clock::time_point when);

/// Writes an artifact into the run directory and records it.
void write_artifact(const std::filesystem::path& run_dir, RunManifest& manifest, const std::string& name,
                    const std::string& file, std::string_view content);

/// Refuses to overwrite an existing manifest.
void write_manifest(const std::filesystem::path& run_dir, const RunManifest& manifest);
RunManifest read_manifest(const std::filesystem::path& run_dir);

}  // namespace cwm::bench
