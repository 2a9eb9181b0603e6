#include "cwm/sandbox/protocol.hpp"

#include <fmt/format.h>

namespace cwm::sandbox {

Response Response::success(std::int64_t id, json result) {
  return Response{id, true, std::move(result), std::nullopt};
}

Response Response::failure(std::int64_t id, ExecError error) {
  return Response{id, false, json::object(), std::move(error)};
}

json Limits::to_json() const {
  return json{{"cpu_seconds_per_call", cpu_seconds_per_call},
              {"memory_cap_mb", memory_cap_mb},
              {"wall_timeout", wall_timeout}};
}

Limits Limits::from_json(const json& j) {
  Limits l;
  l.cpu_seconds_per_call = j.value("cpu_seconds_per_call", l.cpu_seconds_per_call);
  l.memory_cap_mb = j.value("memory_cap_mb", l.memory_cap_mb);
  l.wall_timeout = j.value("wall_timeout", l.wall_timeout);
  return l;
}

std::string encode(const Request& request) {
  return json{{"id", request.id}, {"op", request.op}, {"args", request.args}}.dump(
      -1, ' ', false, json::error_handler_t::replace);
}

std::string encode(const Response& response) {
  json j{{"id", response.id}, {"ok", response.ok}};
  if (response.ok) {
    j["result"] = response.result;
  } else {
    j["error"] = error_to_json(response.error.value_or(ExecError{}));
  }
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

namespace {

json parse_object(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ProtocolError(fmt::format("malformed protocol line: {}", e.what()));
  }
  if (!j.is_object()) throw ProtocolError("protocol message must be a JSON object");
  return j;
}

std::int64_t read_id(const json& j) {
  auto it = j.find("id");
  if (it == j.end() || !it->is_number_integer()) throw ProtocolError("protocol message needs an integer 'id'");
  return it->get<std::int64_t>();
}

}  // namespace

Request decode_request(std::string_view line) {
  auto j = parse_object(line);
  Request r;
  r.id = read_id(j);
  auto op_it = j.find("op");
  if (op_it == j.end() || !op_it->is_string()) throw ProtocolError("request needs a string 'op'");
  r.op = op_it->get<std::string>();
  if (auto args = j.find("args"); args != j.end()) {
    if (!args->is_object()) throw ProtocolError("request 'args' must be an object");
    r.args = *args;
  }
  return r;
}

Response decode_response(std::string_view line) {
  auto j = parse_object(line);
  Response r;
  r.id = read_id(j);
  auto ok = j.find("ok");
  if (ok == j.end() || !ok->is_boolean()) throw ProtocolError("response needs a boolean 'ok'");
  r.ok = ok->get<bool>();
  if (r.ok) {
    auto result = j.find("result");
    r.result = result == j.end() ? json::object() : *result;
  } else {
    auto err = j.find("error");
    if (err == j.end() || !err->is_object()) throw ProtocolError("failed response needs an 'error' object");
    try {
      r.error = error_from_json(*err);
    } catch (const ValidationError& e) {
      throw ProtocolError(fmt::format("bad error payload: {}", e.what()));
    }
  }
  return r;
}

}  // namespace cwm::sandbox
