#include <doctest.h>

#include "cwm/core/json_io.hpp"
#include "cwm/sandbox/protocol.hpp"
#include "support.hpp"

using namespace cwm;
using namespace cwm::sandbox;

namespace {

json random_payload(test::Gen& g, int depth = 0) {
  switch (g.integer(0, depth > 2 ? 3 : 5)) {
    case 0: return g.integer(-1000000, 1000000);
    case 1: return g.real(-1e6, 1e6);
    case 2: return g.text();
    case 3: return g.coin();
    case 4: {
      json arr = json::array();
      for (int i = g.integer(0, 4); i > 0; --i) arr.push_back(random_payload(g, depth + 1));
      return arr;
    }
    default: {
      json obj = json::object();
      for (int i = g.integer(0, 4); i > 0; --i) obj[g.word()] = random_payload(g, depth + 1);
      return obj;
    }
  }
}

const std::vector<std::string> kOps{"handshake", "load", "predict_batch", "step_from", "run_plan", "run_io", "shutdown"};

}  // namespace

TEST_CASE("requests and responses survive encode then decode") {
  test::Gen g(1234);
  const std::vector<ErrorClass> classes{ErrorClass::syntax,   ErrorClass::runtime,  ErrorClass::timeout,
                                        ErrorClass::protocol, ErrorClass::resource, ErrorClass::parse};
  for (int trial = 0; trial < 10000; ++trial) {
    json args = json::object();
    for (int i = g.integer(0, 3); i > 0; --i) args[g.word()] = random_payload(g);
    Request req{g.integer(0, 1 << 30), g.pick(kOps), args};
    auto line = encode(req);
    REQUIRE(line.find('\n') == std::string::npos);
    CHECK(decode_request(line) == req);

    Response resp = g.coin() ? Response::success(req.id, random_payload(g))
                             : Response::failure(req.id, ExecError{g.pick(classes), g.text(), trim_trace(g.text())});
    line = encode(resp);
    REQUIRE(line.find('\n') == std::string::npos);
    CHECK(decode_response(line) == resp);
  }
}

TEST_CASE("wire format") {
  CHECK(encode(Response::success(1, json{{"version", 1}})) == R"({"id":1,"ok":true,"result":{"version":1}})");
  auto failure = encode(Response::failure(2, ExecError{ErrorClass::syntax, "SyntaxError (line 3)", ""}));
  CHECK(json::parse(failure) ==
        json::parse(R"j({"id":2,"ok":false,"error":{"class":"syntax","message":"SyntaxError (line 3)","trace":""}})j"));
  CHECK(encode(Request{5, "step_from", json{{"s", 2}, {"a", 1}}}) == R"({"args":{"a":1,"s":2},"id":5,"op":"step_from"})");
}

TEST_CASE("malformed lines are protocol errors") {
  CHECK_THROWS_AS(decode_response("not json"), ProtocolError);
  CHECK_THROWS_AS(decode_response("[1,2]"), ProtocolError);
  CHECK_THROWS_AS(decode_response(R"({"ok":true})"), ProtocolError);
  CHECK_THROWS_AS(decode_response(R"({"id":1})"), ProtocolError);
  CHECK_THROWS_AS(decode_response(R"({"id":1,"ok":false})"), ProtocolError);
  CHECK_THROWS_AS(decode_response(R"({"id":1,"ok":false,"error":{"class":"weird"}})"), ProtocolError);
  CHECK_THROWS_AS(decode_request(R"({"id":1})"), ProtocolError);
  CHECK_THROWS_AS(decode_request(R"({"id":"1","op":"load"})"), ProtocolError);
  CHECK_THROWS_AS(decode_request(R"({"id":1,"op":"load","args":[]})"), ProtocolError);
  CHECK(decode_request(R"({"id":1,"op":"shutdown"})").args == json::object());
}

TEST_CASE("limits round-trip with defaults for missing fields") {
  Limits l{0.5, 256, 12.0};
  auto back = Limits::from_json(l.to_json());
  CHECK(back.cpu_seconds_per_call == 0.5);
  CHECK(back.memory_cap_mb == 256);
  CHECK(back.wall_timeout == 12.0);
  auto defaults = Limits::from_json(json::object());
  CHECK(defaults.cpu_seconds_per_call == 1.0);
  CHECK(defaults.wall_timeout == 60.0);
}
