#include "cwm/bench/manifest.hpp"

#include <ctime>

#include <fmt/format.h>

namespace cwm::bench {

namespace fs = std::filesystem;

json RunManifest::to_json() const {
  return json{{"method", method},         {"task", task},
              {"task_kind", task_kind},   {"space_kind", space_kind},
              {"budget", budget},         {"seed", seed},
              {"backend", backend},       {"backend_hash", backend_hash},
              {"config", config},         {"started_at", started_at},
              {"finished_at", finished_at}, {"artifacts", artifacts},
              {"summary", summary}};
}

RunManifest RunManifest::from_json(const json& j) {
  RunManifest m;
  try {
    m.method = j.at("method").get<std::string>();
    m.task = j.at("task").get<std::string>();
    m.task_kind = j.value("task_kind", "");
    m.space_kind = j.value("space_kind", "");
    m.budget = j.value("budget", 0);
    m.seed = j.value("seed", std::uint64_t{0});
    m.backend = j.value("backend", "");
    m.backend_hash = j.value("backend_hash", "");
    m.config = j.value("config", json::object());
    m.started_at = j.value("started_at", "");
    m.finished_at = j.value("finished_at", "");
    m.artifacts = j.value("artifacts", std::map<std::string, std::string>{});
    m.summary = j.value("summary", json::object());
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("bad manifest: {}", e.what()));
  }
  return m;
}

namespace {

std::tm to_utc(std::chrono::system_clock::time_point t) {
  std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  return tm;
}

}  // namespace

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  auto tm = to_utc(t);
  return fmt::format("{:04}{:02}{:02}T{:02}{:02}{:02}Z", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                     tm.tm_min, tm.tm_sec);
}

std::string iso_utc(std::chrono::system_clock::time_point t) {
  auto tm = to_utc(t);
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                     tm.tm_min, tm.tm_sec);
}

std::string stable_hash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

fs::path make_run_dir(const fs::path& root, const std::string& method, const std::string& task,
                      std::chrono::system_clock::time_point when) {
  fs::create_directories(root);
  const std::string base = fmt::format("{}-{}-{}", utc_timestamp(when), method, task);
  for (int n = 1;; ++n) {
    fs::path dir = root / (n == 1 ? base : fmt::format("{}-{}", base, n));
    // create_directory is atomic, so concurrent runs never share a directory.
    if (fs::create_directory(dir)) return dir;
  }
}

void write_artifact(const fs::path& run_dir, RunManifest& manifest, const std::string& name, const std::string& file,
                    std::string_view content) {
  write_file_atomic(run_dir / file, content);
  manifest.artifacts[name] = file;
}

void write_manifest(const fs::path& run_dir, const RunManifest& manifest) {
  auto path = run_dir / kManifestFile;
  if (fs::exists(path)) throw std::runtime_error(fmt::format("{} already exists; manifests are immutable", path.string()));
  write_file_atomic(path, manifest.to_json().dump(2) + "\n");
}

RunManifest read_manifest(const fs::path& run_dir) {
  auto path = run_dir / kManifestFile;
  if (!fs::exists(path)) throw ValidationError(fmt::format("missing {}", path.string()));
  try {
    return RunManifest::from_json(json::parse(read_file(path)));
  } catch (const json::parse_error& e) {
    throw ValidationError(fmt::format("{}: malformed JSON: {}", path.string(), e.what()));
  }
}

}  // namespace cwm::bench
