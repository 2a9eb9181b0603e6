#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "cwm/sandbox/protocol.hpp"
#include "cwm/sandbox/runtime.hpp"
#include "cwm/sandbox/subprocess.hpp"

namespace cwm::sandbox {

struct WorkerConfig {
  std::vector<std::string> command;
  Limits limits;
  /// How long shutdown() waits for a clean exit before killing.
  std::chrono::milliseconds shutdown_grace{1000};
  std::chrono::milliseconds handshake_timeout{10000};
};

/// One worker process speaking the line protocol. Not thread safe: the
/// protocol allows a single in-flight request per worker.
class WorkerHandle {
 public:
  enum class State { idle, loaded, dead };

  struct Stats {
    std::uint64_t requests = 0;
    std::uint64_t restarts = 0;
  };

  /// Spawns and handshakes. Throws StartupError, or ProtocolError on a version
  /// mismatch (the worker is killed first).
  explicit WorkerHandle(WorkerConfig config);
  ~WorkerHandle();

  WorkerHandle(const WorkerHandle&) = delete;
  WorkerHandle& operator=(const WorkerHandle&) = delete;

  /// Sends one request and waits for its response. Transport failures come
  /// back as a failed Response (timeout, resource or protocol class) and leave
  /// the handle dead. `wall` overrides the configured wall timeout.
  Response call(std::string_view op, json args, std::optional<double> wall = std::nullopt);

  State state() const { return state_; }
  const std::string& program_hash() const { return program_hash_; }
  int protocol_version() const { return version_; }
  pid_t pid() const { return process_ ? process_->pid() : -1; }
  const Stats& stats() const { return stats_; }
  const WorkerConfig& config() const { return config_; }

  /// Kills the current process (if any) and starts a fresh one.
  void restart();
  /// Polite shutdown request, then kill.
  void shutdown();

  /// Used by WorkerRuntime to track which program is resident.
  void mark_loaded(std::string hash);
  void mark_idle();

 private:
  void start();
  Response transport_failure(std::int64_t id, ErrorClass cls, std::string message);

  WorkerConfig config_;
  std::unique_ptr<Subprocess> process_;
  State state_ = State::dead;
  std::string program_hash_;
  int version_ = 0;
  std::int64_t next_id_ = 1;
  Stats stats_;
};

std::string_view to_string(WorkerHandle::State state);

/// Worker-backed runtime. Respawns a dead worker on the next call and reloads
/// the last program so that a crash only costs the request that caused it.
class WorkerRuntime : public ProgramRuntime {
 public:
  explicit WorkerRuntime(WorkerConfig config);

  std::optional<ExecError> load(const std::string& source) override;
  std::vector<Fallible<Prediction>> predict_batch(const std::vector<StepQuery>& items) override;
  Fallible<Prediction> step_from(const Value& s, const Value& a) override;
  PlanOutcome run_plan(const Value& s0, const std::vector<Value>& actions) override;
  std::vector<Fallible<std::string>> run_io(const std::string& source, const std::vector<std::string>& inputs,
                                             double per_case_timeout) override;

  WorkerHandle& handle() { return *worker_; }

 private:
  /// Returns an error if the worker could not be brought back with the program.
  std::optional<ExecError> ensure_ready(bool need_program);

  std::unique_ptr<WorkerHandle> worker_;
  std::optional<std::string> source_;
};

/// Fixed-size set of runtimes handed out one caller at a time.
class RuntimePool {
 public:
  using Factory = std::function<std::unique_ptr<ProgramRuntime>()>;

  RuntimePool(std::size_t size, const Factory& factory);

  class Lease {
   public:
    Lease(RuntimePool& pool, std::size_t index) : pool_(&pool), index_(index) {}
    Lease(Lease&& other) noexcept : pool_(other.pool_), index_(other.index_) { other.pool_ = nullptr; }
    Lease(const Lease&) = delete;
    ~Lease() {
      if (pool_) pool_->release(index_);
    }
    ProgramRuntime& operator*() const { return *pool_->runtimes_[index_]; }
    ProgramRuntime* operator->() const { return pool_->runtimes_[index_].get(); }

   private:
    RuntimePool* pool_;
    std::size_t index_;
  };

  Lease acquire();
  std::size_t size() const { return runtimes_.size(); }

 private:
  void release(std::size_t index);

  std::vector<std::unique_ptr<ProgramRuntime>> runtimes_;
  std::vector<std::size_t> free_;
  std::mutex mutex_;
  std::condition_variable cv_;
};

/// Resolves the --worker option: "native" means in process, anything else is a
/// command line for a worker process.
std::unique_ptr<ProgramRuntime> make_runtime(const std::string& worker, const Limits& limits = {});

}  // namespace cwm::sandbox
