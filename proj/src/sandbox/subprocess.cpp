#include "cwm/sandbox/subprocess.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <thread>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <fmt/format.h>

namespace cwm::sandbox {

namespace {

void close_fd(int& fd) {
  if (fd >= 0) {
    ::close(fd);
    fd = -1;
  }
}

// Writing to a dead worker must surface as an error code, not kill us.
void ignore_sigpipe_once() {
  static const bool done = [] {
    std::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)done;
}

}  // namespace

Subprocess::Subprocess(const std::vector<std::string>& argv) {
  if (argv.empty()) throw StartupError("empty worker command");
  ignore_sigpipe_once();

  int to_child[2];
  int from_child[2];
  int status_pipe[2];
  if (::pipe2(to_child, O_CLOEXEC) != 0) throw StartupError(fmt::format("pipe: {}", std::strerror(errno)));
  if (::pipe2(from_child, O_CLOEXEC) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw StartupError(fmt::format("pipe: {}", std::strerror(errno)));
  }
  if (::pipe2(status_pipe, O_CLOEXEC) != 0) {
    for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
    throw StartupError(fmt::format("pipe: {}", std::strerror(errno)));
  }

  std::vector<char*> cargv;
  cargv.reserve(argv.size() + 1);
  for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);

  pid_ = ::fork();
  if (pid_ < 0) {
    for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1], status_pipe[0], status_pipe[1]}) {
      ::close(fd);
    }
    throw StartupError(fmt::format("fork failed for '{}': {}", argv[0], std::strerror(errno)));
  }
  if (pid_ == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::setpgid(0, 0);
    ::execvp(cargv[0], cargv.data());
    int err = errno;
    [[maybe_unused]] auto n = ::write(status_pipe[1], &err, sizeof err);
    ::_exit(127);
  }

  ::close(to_child[0]);
  ::close(from_child[1]);
  ::close(status_pipe[1]);
  in_fd_ = to_child[1];
  out_fd_ = from_child[0];

  // exec succeeded iff the CLOEXEC status pipe closes without data.
  int child_errno = 0;
  ssize_t n;
  do {
    n = ::read(status_pipe[0], &child_errno, sizeof child_errno);
  } while (n < 0 && errno == EINTR);
  ::close(status_pipe[0]);
  if (n > 0) {
    close_fd(in_fd_);
    close_fd(out_fd_);
    reap(true);
    throw StartupError(fmt::format("cannot start worker '{}': {}", argv[0], std::strerror(child_errno)));
  }
}

Subprocess::~Subprocess() { kill(); }

bool Subprocess::write_all(const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    if (in_fd_ < 0) return false;
    ssize_t n = ::write(in_fd_, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    off += static_cast<std::size_t>(n);
  }
  return true;
}

Subprocess::ReadStatus Subprocess::read_line(std::string& out, clock::time_point deadline) {
  for (;;) {
    if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
      out.assign(buffer_, 0, nl);
      buffer_.erase(0, nl + 1);
      return ReadStatus::line;
    }
    if (out_fd_ < 0) return ReadStatus::eof;
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now());
    if (remaining.count() <= 0) return ReadStatus::timeout;
    pollfd pfd{out_fd_, POLLIN, 0};
    int rc = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(remaining.count() + 1, 1'000'000)));
    if (rc < 0) {
      if (errno == EINTR) continue;
      return ReadStatus::eof;
    }
    if (rc == 0) continue;
    char chunk[65536];
    ssize_t n = ::read(out_fd_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      return ReadStatus::eof;
    }
    if (n == 0) {
      close_fd(out_fd_);
      return ReadStatus::eof;
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

void Subprocess::reap(bool block) {
  if (reaped_ || pid_ <= 0) return;
  int status = 0;
  pid_t r;
  do {
    r = ::waitpid(pid_, &status, block ? 0 : WNOHANG);
  } while (r < 0 && errno == EINTR);
  if (r == pid_ || (r < 0 && errno == ECHILD)) reaped_ = true;
}

bool Subprocess::running() {
  reap(false);
  return pid_ > 0 && !reaped_;
}

void Subprocess::kill() {
  close_fd(in_fd_);
  close_fd(out_fd_);
  if (pid_ > 0 && !reaped_) {
    // The worker runs in its own process group so that helpers it forked die too.
    ::kill(-pid_, SIGKILL);
    ::kill(pid_, SIGKILL);
    reap(true);
  }
}

void Subprocess::terminate(std::chrono::milliseconds grace) {
  close_fd(in_fd_);
  auto until = clock::now() + grace;
  while (clock::now() < until) {
    if (!running()) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  kill();
}

std::vector<std::string> split_command(const std::string& command) {
  std::vector<std::string> out;
  std::string cur;
  bool have = false;
  char quote = 0;
  for (char c : command) {
    if (quote) {
      if (c == quote) {
        quote = 0;
      } else {
        cur += c;
      }
    } else if (c == '\'' || c == '"') {
      quote = c;
      have = true;
    } else if (c == ' ' || c == '\t' || c == '\n') {
      if (have) out.push_back(std::move(cur));
      cur.clear();
      have = false;
    } else {
      cur += c;
      have = true;
    }
  }
  if (quote) throw StartupError(fmt::format("unterminated quote in command '{}'", command));
  if (have) out.push_back(std::move(cur));
  return out;
}

}  // namespace cwm::sandbox
