#include "cwm/sandbox/worker.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "cwm/sandbox/native_runtime.hpp"

namespace cwm::sandbox {

std::string_view to_string(WorkerHandle::State state) {
  switch (state) {
    case WorkerHandle::State::idle: return "idle";
    case WorkerHandle::State::loaded: return "loaded";
    case WorkerHandle::State::dead: return "dead";
  }
  return "?";
}

WorkerHandle::WorkerHandle(WorkerConfig config) : config_(std::move(config)) {
  if (config_.command.empty()) throw StartupError("empty worker command");
  start();
}

WorkerHandle::~WorkerHandle() {
  if (process_) process_->kill();
}

void WorkerHandle::start() {
  state_ = State::dead;
  program_hash_.clear();
  process_ = std::make_unique<Subprocess>(config_.command);
  const std::string& exe = config_.command.front();

  if (!process_->write_all(config_.limits.to_json().dump() + "\n")) {
    process_->kill();
    throw StartupError(fmt::format("worker '{}' closed its input before receiving limits", exe));
  }

  const std::int64_t id = next_id_++;
  Request hello{id, std::string(op::handshake), json{{"version", kProtocolVersion}}};
  if (!process_->write_all(encode(hello) + "\n")) {
    process_->kill();
    throw StartupError(fmt::format("worker '{}' exited before the handshake", exe));
  }
  std::string line;
  auto status = process_->read_line(line, Subprocess::clock::now() + config_.handshake_timeout);
  if (status != Subprocess::ReadStatus::line) {
    process_->kill();
    throw StartupError(fmt::format("worker '{}' {} during the handshake", exe,
                                   status == Subprocess::ReadStatus::eof ? "exited" : "timed out"));
  }
  Response reply;
  try {
    reply = decode_response(line);
  } catch (const ProtocolError& e) {
    process_->kill();
    throw ProtocolError(fmt::format("worker '{}' sent a bad handshake: {}", exe, e.what()));
  }
  int version = reply.ok && reply.result.contains("version") && reply.result["version"].is_number_integer()
                    ? reply.result["version"].get<int>()
                    : -1;
  if (reply.id != id || version != kProtocolVersion) {
    process_->kill();
    throw ProtocolError(fmt::format("worker '{}' speaks protocol version {}, expected {}", exe, version,
                                    kProtocolVersion));
  }
  version_ = version;
  state_ = State::idle;
  spdlog::debug("worker '{}' pid {} ready", exe, process_->pid());
}

void WorkerHandle::restart() {
  if (process_) process_->kill();
  ++stats_.restarts;
  start();
}

void WorkerHandle::shutdown() {
  if (!process_ || state_ == State::dead) return;
  Request bye{next_id_++, std::string(op::shutdown), json::object()};
  if (process_->write_all(encode(bye) + "\n")) {
    std::string line;
    process_->read_line(line, Subprocess::clock::now() + config_.shutdown_grace);
  }
  process_->terminate(config_.shutdown_grace);
  state_ = State::dead;
}

void WorkerHandle::mark_loaded(std::string hash) {
  if (state_ == State::dead) return;
  state_ = State::loaded;
  program_hash_ = std::move(hash);
}

void WorkerHandle::mark_idle() {
  if (state_ == State::dead) return;
  state_ = State::idle;
  program_hash_.clear();
}

Response WorkerHandle::transport_failure(std::int64_t id, ErrorClass cls, std::string message) {
  if (process_) process_->kill();
  state_ = State::dead;
  program_hash_.clear();
  return Response::failure(id, ExecError{cls, std::move(message), ""});
}

Response WorkerHandle::call(std::string_view op_name, json args, std::optional<double> wall) {
  const std::int64_t id = next_id_++;
  if (state_ == State::dead || !process_) {
    return Response::failure(id, ExecError{ErrorClass::resource, "worker is dead", ""});
  }
  ++stats_.requests;
  Request request{id, std::string(op_name), std::move(args)};
  if (!process_->write_all(encode(request) + "\n")) {
    return transport_failure(id, ErrorClass::resource, "worker closed its input (crashed?)");
  }

  const double limit = wall.value_or(config_.limits.wall_timeout);
  auto deadline = Subprocess::clock::now() + std::chrono::duration_cast<Subprocess::clock::duration>(
                                                 std::chrono::duration<double>(limit));
  std::string line;
  switch (process_->read_line(line, deadline)) {
    case Subprocess::ReadStatus::timeout:
      return transport_failure(id, ErrorClass::timeout,
                               fmt::format("'{}' exceeded the wall timeout of {}s; worker killed", op_name, limit));
    case Subprocess::ReadStatus::eof:
      return transport_failure(id, ErrorClass::resource,
                               fmt::format("worker exited during '{}' (crash or resource limit)", op_name));
    case Subprocess::ReadStatus::line:
      break;
  }
  Response response;
  try {
    response = decode_response(line);
  } catch (const ProtocolError& e) {
    return transport_failure(id, ErrorClass::protocol, fmt::format("unparseable worker reply: {}", e.what()));
  }
  if (response.id != id) {
    return transport_failure(id, ErrorClass::protocol,
                             fmt::format("worker replied to request {} while {} was in flight", response.id, id));
  }
  return response;
}

RuntimePool::RuntimePool(std::size_t size, const Factory& factory) {
  if (size == 0) throw ValidationError("runtime pool needs at least one runtime");
  for (std::size_t i = 0; i < size; ++i) {
    runtimes_.push_back(factory());
    free_.push_back(size - 1 - i);
  }
}

RuntimePool::Lease RuntimePool::acquire() {
  std::unique_lock lock(mutex_);
  cv_.wait(lock, [&] { return !free_.empty(); });
  auto index = free_.back();
  free_.pop_back();
  return Lease(*this, index);
}

void RuntimePool::release(std::size_t index) {
  {
    std::lock_guard lock(mutex_);
    free_.push_back(index);
  }
  cv_.notify_one();
}

std::unique_ptr<ProgramRuntime> make_runtime(const std::string& worker, const Limits& limits) {
  if (worker == "native") {
    NativeRuntime::Options options;
    options.cpu_seconds_per_call = limits.cpu_seconds_per_call;
    return std::make_unique<NativeRuntime>(options);
  }
  WorkerConfig config;
  config.command = split_command(worker);
  config.limits = limits;
  return std::make_unique<WorkerRuntime>(std::move(config));
}

}  // namespace cwm::sandbox
