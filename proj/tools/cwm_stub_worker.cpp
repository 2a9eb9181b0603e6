// A worker that speaks the sandbox line protocol but runs programs through the
// native runtime instead of an interpreter. Used by the tests to exercise the
// client side of the protocol: timeouts, crashes, restarts and version checks.
//
//   cwm_stub_worker [--protocol-version N] [--garble-after N]
//
// --garble-after N answers the N-th request after the handshake with a line
// that is not JSON.

#include <cstdlib>
#include <iostream>
#include <string>

#include "cwm/core/json_io.hpp"
#include "cwm/sandbox/native_runtime.hpp"
#include "cwm/sandbox/protocol.hpp"

using namespace cwm;
using namespace cwm::sandbox;

namespace {

json item_json(const Fallible<Prediction>& p) {
  if (const auto* e = std::get_if<ExecError>(&p)) return json{{"ok", false}, {"error", error_to_json(*e)}};
  json j = prediction_to_json(std::get<Prediction>(p));
  j["ok"] = true;
  return j;
}

Response handle(NativeRuntime& runtime, const Request& req, int version) {
  const auto& args = req.args;
  if (req.op == op::handshake) return Response::success(req.id, json{{"version", version}});
  if (req.op == op::load) {
    if (auto err = runtime.load(args.at("source").get<std::string>())) return Response::failure(req.id, *err);
    return Response::success(req.id, json::object());
  }
  if (req.op == op::predict_batch) {
    std::vector<StepQuery> items;
    for (const auto& q : args.at("items")) items.push_back(StepQuery{value_from_json(q.at("s")), value_from_json(q.at("a"))});
    json results = json::array();
    for (const auto& p : runtime.predict_batch(items)) results.push_back(item_json(p));
    return Response::success(req.id, json{{"results", std::move(results)}});
  }
  if (req.op == op::step_from) {
    auto p = runtime.step_from(value_from_json(args.at("s")), value_from_json(args.at("a")));
    if (const auto* e = std::get_if<ExecError>(&p)) return Response::failure(req.id, *e);
    return Response::success(req.id, prediction_to_json(std::get<Prediction>(p)));
  }
  if (req.op == op::run_plan) {
    std::vector<Value> actions;
    for (const auto& a : args.at("actions")) actions.push_back(value_from_json(a));
    auto outcome = runtime.run_plan(value_from_json(args.at("s0")), actions);
    json steps = json::array();
    for (const auto& s : outcome.steps) steps.push_back(prediction_to_json(s));
    return Response::success(req.id, json{{"steps", std::move(steps)},
                                          {"error", outcome.error ? error_to_json(*outcome.error) : json(nullptr)}});
  }
  if (req.op == op::run_io) {
    auto outputs = runtime.run_io(args.at("source").get<std::string>(), args.at("inputs").get<std::vector<std::string>>(),
                                  args.value("timeout", 4.0));
    json results = json::array();
    for (const auto& o : outputs) {
      if (const auto* e = std::get_if<ExecError>(&o)) {
        results.push_back(json{{"ok", false}, {"error", error_to_json(*e)}});
      } else {
        results.push_back(json{{"ok", true}, {"stdout", std::get<std::string>(o)}});
      }
    }
    return Response::success(req.id, json{{"results", std::move(results)}});
  }
  return Response::failure(req.id, ExecError{ErrorClass::protocol, "unknown op '" + req.op + "'", ""});
}

}  // namespace

int main(int argc, char** argv) {
  int version = kProtocolVersion;
  long garble_after = -1;
  for (int i = 1; i + 1 < argc; i += 2) {
    std::string flag = argv[i];
    if (flag == "--protocol-version") version = std::atoi(argv[i + 1]);
    else if (flag == "--garble-after") garble_after = std::atol(argv[i + 1]);
  }

  std::string line;
  if (!std::getline(std::cin, line)) return 1;
  Limits limits;
  try {
    limits = Limits::from_json(json::parse(line));
  } catch (const std::exception& e) {
    std::cerr << "bad limits line: " << e.what() << "\n";
    return 1;
  }
  NativeRuntime::Options options;
  options.real_hazards = true;
  options.cpu_seconds_per_call = limits.cpu_seconds_per_call;
  NativeRuntime runtime(options);

  long served = 0;
  while (std::getline(std::cin, line)) {
    Request req;
    try {
      req = decode_request(line);
    } catch (const ProtocolError& e) {
      std::cout << encode(Response::failure(0, ExecError{ErrorClass::protocol, e.what(), ""})) << std::endl;
      continue;
    }
    if (req.op == op::shutdown) {
      std::cout << encode(Response::success(req.id, json::object())) << std::endl;
      return 0;
    }
    if (req.op != op::handshake && ++served == garble_after) {
      std::cout << "this is not a protocol message" << std::endl;
      continue;
    }
    Response resp;
    try {
      resp = handle(runtime, req, version);
    } catch (const std::exception& e) {
      resp = Response::failure(req.id, ExecError{ErrorClass::protocol, std::string("bad arguments: ") + e.what(), ""});
    }
    std::cout << encode(resp) << std::endl;
  }
  return 0;
}
