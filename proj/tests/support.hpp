#pragma once

// Shared helpers for the unit tests: a small seeded generator for property
// tests, fixture paths and scratch directories.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "cwm/core/types.hpp"

namespace cwm::test {

inline std::filesystem::path fixtures_dir() { return CWM_FIXTURES_DIR; }
inline std::string stub_worker() { return CWM_STUB_WORKER; }

struct Gen {
  std::mt19937_64 rng;

  explicit Gen(std::uint64_t seed) : rng(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

  template <class T>
  const T& pick(const std::vector<T>& xs) {
    return xs[static_cast<std::size_t>(integer(0, static_cast<int>(xs.size()) - 1))];
  }

  std::string word(int max_len = 8) {
    static const std::string alphabet = "abcdefghijklmnopqrstuvwxyz0123456789_";
    std::string s(static_cast<std::size_t>(integer(1, max_len)), 'a');
    for (auto& c : s) c = alphabet[static_cast<std::size_t>(integer(0, static_cast<int>(alphabet.size()) - 1))];
    return s;
  }

  /// Arbitrary text, including quotes, backslashes, newlines and UTF-8.
  std::string text(int max_len = 40) {
    static const std::vector<std::string> pieces = {"a", "Z", " ", "\n", "\t", "\"", "\\", "{", "}", "é", "→", "0", "#"};
    std::string s;
    int n = integer(0, max_len);
    for (int i = 0; i < n; ++i) s += pick(pieces);
    return s;
  }

  Value discrete_value(std::int64_t n) { return Value::of(static_cast<double>(integer(0, static_cast<int>(n) - 1))); }

  Value box_value(const std::vector<double>& low, const std::vector<double>& high) {
    std::vector<double> xs;
    for (std::size_t i = 0; i < low.size(); ++i) xs.push_back(real(low[i], high[i]));
    return Value::of(std::move(xs));
  }
};

/// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("cwm-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace cwm::test
