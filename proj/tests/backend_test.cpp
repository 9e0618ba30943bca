#include <thread>

#include <httplib.h>

#include "doctest.h"
#include "helpers.hpp"
#include "wayfarer/backend.hpp"
#include "wayfarer/error.hpp"
#include "wayfarer/intent.hpp"

using namespace wayfarer;

namespace {

// Chat-completions stand-in on a loopback port.
struct FakeModel {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  nlohmann::json last_body;
  std::string last_auth;
  int status = 200;
  std::string reply = "(1.0, 0.0, 2.0)";

  FakeModel() {
    server.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      last_body = nlohmann::json::parse(req.body);
      last_auth = req.get_header_value("Authorization");
      res.status = status;
      nlohmann::json out = {{"choices", {{{"message", {{"role", "assistant"}, {"content", reply}}}}}}};
      res.set_content(out.dump(), "application/json");
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~FakeModel() {
    server.stop();
    thread.join();
  }
  RemoteConfig config() const {
    RemoteConfig cfg;
    cfg.url = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
    cfg.key = "secret";
    cfg.timeout = std::chrono::milliseconds(2000);
    return cfg;
  }
};

BackendRequest request_for(const std::string& transcript) {
  BackendRequest r;
  r.transcript = transcript;
  r.pose = {{100, 0, 100}, 0};
  r.prompts = {build_system_prompt(), build_user_prompt(transcript, serialize_context({}, r.pose), r.pose)};
  return r;
}

}  // namespace

TEST_SUITE("backend") {
  TEST_CASE("mock reports its configured latency") {
    MockBackend mock;
    const BackendResponse r = query_backend(request_for("move 10 meters forward"), mock);
    CHECK(r.text.find("(100.0, 0.0, 110.0)") != std::string::npos);
    CHECK(r.latency_s == doctest::Approx(0.97));
  }

  TEST_CASE("scripted backend repeats its last reply") {
    ScriptedBackend b({"one", "two"});
    const auto req = request_for("x");
    CHECK(b.complete(req).text == "one");
    CHECK(b.complete(req).text == "two");
    CHECK(b.complete(req).text == "two");
  }

  TEST_CASE("remote backend speaks chat-completions") {
    FakeModel model;
    RemoteBackend remote(model.config());
    const BackendResponse r = query_backend(request_for("go forward"), remote);
    CHECK(r.text == "(1.0, 0.0, 2.0)");
    CHECK(r.latency_s >= 0.0);
    CHECK(model.last_auth == "Bearer secret");
    REQUIRE(model.last_body["messages"].size() == 2);
    CHECK(model.last_body["messages"][0]["role"] == "system");
    CHECK(model.last_body["messages"][1]["role"] == "user");
    CHECK(model.last_body["messages"][1]["content"].get<std::string>().find("go forward") != std::string::npos);
    CHECK(model.last_body["model"] == "gpt-4o");
  }

  TEST_CASE("remote errors become BackendError") {
    FakeModel model;
    model.status = 500;
    RemoteBackend failing(model.config());
    CHECK_THROWS_AS(query_backend(request_for("x"), failing), BackendError);

    RemoteConfig nowhere;
    nowhere.url = "http://127.0.0.1:1/v1/chat/completions";
    nowhere.timeout = std::chrono::milliseconds(500);
    RemoteBackend unreachable(nowhere);
    CHECK_THROWS_AS(query_backend(request_for("x"), unreachable), BackendError);

    RemoteBackend unset(RemoteConfig{});
    CHECK_THROWS_AS(query_backend(request_for("x"), unset), BackendError);
  }

  TEST_CASE("backend failure surfaces as an outcome") {
    RemoteConfig nowhere;
    nowhere.url = "http://127.0.0.1:1/v1/chat/completions";
    nowhere.timeout = std::chrono::milliseconds(500);
    RemoteBackend unreachable(nowhere);
    const Resolution r = resolve_command("go", {{0, 0, 0}, 0}, testing::town(), {}, unreachable, 0);
    CHECK(r.outcome == Outcome::BackendError);
    CHECK_FALSE(r.error.empty());
  }

  TEST_CASE("make_backend selectors") {
    CHECK(make_backend("mock")->name() == "mock");
    CHECK(make_backend("remote")->name() == "remote");
    CHECK_THROWS_AS(make_backend("psychic"), ValidationError);
  }
}
