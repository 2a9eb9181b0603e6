#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <sys/types.h>

namespace cwm::sandbox {

/// Failure to start a child process. The message names the executable.
class StartupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A child process connected through its stdin and stdout. stderr is inherited.
class Subprocess {
 public:
  using clock = std::chrono::steady_clock;

  /// argv[0] is looked up on PATH when it contains no slash.
  explicit Subprocess(const std::vector<std::string>& argv);
  ~Subprocess();

  Subprocess(const Subprocess&) = delete;
  Subprocess& operator=(const Subprocess&) = delete;

  pid_t pid() const { return pid_; }

  /// Writes the whole buffer. Returns false when the pipe is closed.
  bool write_all(const std::string& data);

  enum class ReadStatus { line, eof, timeout };

  /// Reads one '\n'-terminated line (terminator stripped) before `deadline`.
  ReadStatus read_line(std::string& out, clock::time_point deadline);

  /// SIGKILL then reap. Safe to call repeatedly.
  void kill();
  /// Closes stdin and waits up to `grace` for a clean exit before killing.
  void terminate(std::chrono::milliseconds grace);
  bool running();

 private:
  void reap(bool block);

  pid_t pid_ = -1;
  int in_fd_ = -1;
  int out_fd_ = -1;
  bool reaped_ = false;
  std::string buffer_;
};

/// Splits a command line on whitespace, honouring simple single and double quotes.
std::vector<std::string> split_command(const std::string& command);

}  // namespace cwm::sandbox
