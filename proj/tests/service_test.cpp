#include <atomic>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>

#include "doctest.h"
#include "helpers.hpp"
#include "wayfarer/error.hpp"
#include "wayfarer/service.hpp"

using namespace wayfarer;
using namespace wayfarer::service;

namespace {

struct ManualClock {
  double now = 100.0;
  Clock fn() {
    return [this] { return now; };
  }
};

CommandInput say(std::string text) { return {std::move(text), std::nullopt, std::nullopt}; }

}  // namespace

TEST_SUITE("service") {
  TEST_CASE("fresh session starts at the scene start pose") {
    ManualClock clock;
    SessionManager m(testing::town(), {}, clock.fn());
    const std::string id = m.create({Technique::LlmDriven, "mock", std::nullopt});
    const auto s = m.get_state(id);
    CHECK(vec_from_json(s["pose"]["position"]) == testing::town().start_pose.position);
    CHECK(s["t"] == 0.0);
    CHECK(s["pending"].is_null());
    CHECK(s["done"] == false);
  }

  TEST_CASE("LLM command: latency split, pending countdown, delayed teleport") {
    ManualClock clock;
    SessionManager m(testing::town(), {}, clock.fn());
    const std::string id = m.create({Technique::LlmDriven, "mock", std::nullopt});
    const auto r = m.handle_command(id, say("move 50 meters forward"));
    CHECK(r["result"]["latency"]["total_s"].get<double>() == doctest::Approx(1.45));
    CHECK(r["result"]["resolution"]["outcome"] == "Scheduled");

    auto s = m.get_state(id);
    REQUIRE(s["pending"].is_object());
    CHECK(s["pending"]["remaining_s"].get<double>() == doctest::Approx(2.0));

    clock.now += 1.0;
    s = m.get_state(id);
    CHECK(s["pending"]["remaining_s"].get<double>() == doctest::Approx(1.0));
    CHECK(vec_from_json(s["pose"]["position"]) == Vec3{0, 0, 0});

    clock.now += 1.005;
    s = m.get_state(id);
    CHECK(s["pending"].is_null());
    CHECK(vec_from_json(s["pose"]["position"]) == Vec3{0, 0, 50});
  }

  TEST_CASE("out-of-range command leaves the avatar in place") {
    ManualClock clock;
    SessionManager m(testing::town(), {}, clock.fn());
    const std::string id = m.create({Technique::LlmDriven, "mock", std::nullopt});
    const auto r = m.handle_command(id, say("move 80 meters forward"));
    CHECK(r["result"]["resolution"]["outcome"] == "OutOfRange");
    clock.now += 5;
    CHECK(vec_from_json(m.get_state(id)["pose"]["position"]) == Vec3{0, 0, 0});
  }

  TEST_CASE("sim time follows the clock and never goes backwards") {
    ManualClock clock;
    SessionManager m(testing::town(), {}, clock.fn());
    const std::string id = m.create({Technique::Steering, "mock", std::nullopt});
    double last = 0;
    for (double dt : {0.013, 0.5, 0.0, 0.2, 1.7}) {
      clock.now += dt;
      const double t = m.get_state(id)["t"];
      CHECK(t >= last);
      CHECK(std::abs(t - (clock.now - 100.0)) <= 0.01 + 1e-9);
      last = t;
    }
  }

  TEST_CASE("steering stop shows in the response pose and state") {
    ManualClock clock;
    SessionManager m(testing::town(), {}, clock.fn());
    const std::string id = m.create({Technique::Steering, "mock", std::nullopt});
    m.handle_command(id, say("go forward"));
    clock.now += 2.0;
    m.handle_command(id, say("stop"));
    const auto s = m.get_state(id);
    CHECK(s["steering"]["moving"] == false);
    CHECK(vec_from_json(s["pose"]["position"]).z == doctest::Approx(2.8).epsilon(1e-9));
  }

  TEST_CASE("every response is recorded verbatim in the trace") {
    ManualClock clock;
    SessionManager m(testing::town(), {}, clock.fn());
    const std::string id = m.create({Technique::LlmDriven, "mock", std::nullopt});
    std::vector<nlohmann::json> responses;
    for (const char* text : {"move 20 meters forward", "do a dance", "move 10 meters right"}) {
      responses.push_back(m.handle_command(id, say(text)));
      clock.now += 0.7;
    }
    std::vector<nlohmann::json> recorded;
    for (const auto& e : parse_jsonl(to_jsonl(m.trace(id)))) {
      if (e.kind == TraceKind::Command) recorded.push_back(e.payload);
    }
    CHECK(recorded == responses);
  }

  TEST_CASE("errors: unknown session, empty transcript") {
    ManualClock clock;
    SessionManager m(testing::town(), {}, clock.fn());
    CHECK_THROWS_AS(m.get_state("nope"), SessionNotFound);
    const std::string id = m.create({Technique::LlmDriven, "mock", std::nullopt});
    CHECK_THROWS_AS(m.handle_command(id, say("")), EmptyTranscript);
    m.remove(id);
    CHECK_THROWS_AS(m.handle_command(id, say("go")), SessionNotFound);
    CHECK(m.size() == 0);
  }

  TEST_CASE("reset and completion") {
    ManualClock clock;
    TownLayout near_targets = testing::town();
    near_targets.targets = {{0, 0, 30}};
    SessionManager m(near_targets, {}, clock.fn());
    const std::string id = m.create({Technique::Teleport, "mock", std::nullopt});
    const auto r = m.handle_command(id, {"", Vec3{0, 0, 30}, std::nullopt});
    CHECK(r["result"]["verdict"] == "green");
    CHECK(m.get_state(id)["done"] == true);
    m.reset(id);
    const auto s = m.get_state(id);
    CHECK(s["done"] == false);
    CHECK(s["t"] == 0.0);
  }

  TEST_CASE("concurrent sessions do not interfere") {
    SessionManager m(testing::town());
    std::vector<std::string> ids;
    for (int i = 0; i < 8; ++i) ids.push_back(m.create({Technique::LlmDriven, "mock", std::nullopt}));
    std::vector<std::thread> threads;
    for (int i = 0; i < 8; ++i) {
      threads.emplace_back([&, i] {
        for (int k = 0; k < 5; ++k) m.handle_command(ids[static_cast<std::size_t>(i)], say(fmt::format("move {} meters forward", i + 1)));
      });
    }
    for (auto& t : threads) t.join();
    for (int i = 0; i < 8; ++i) {
      const auto s = m.get_state(ids[static_cast<std::size_t>(i)]);
      REQUIRE(s["pending"].is_object());
      CHECK(vec_from_json(s["pending"]["target"]) == Vec3{0, 0, static_cast<double>(i + 1)});
    }
  }

  TEST_CASE("http endpoints") {
    ManualClock clock;
    SessionManager m(testing::town(), {}, clock.fn());
    httplib::Server server;
    mount_routes(server, m);
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    httplib::Client c("127.0.0.1", port);

    auto created = c.Post("/api/sessions", R"({"technique": "llm", "backend": "mock"})", "application/json");
    REQUIRE(created);
    CHECK(created->status == 201);
    const std::string id = nlohmann::json::parse(created->body)["id"];
    const std::string base = "/api/sessions/" + id;

    auto cmd = c.Post(base + "/command", R"({"transcript": "move 50 meters forward"})", "application/json");
    REQUIRE(cmd);
    CHECK(cmd->status == 200);
    CHECK(nlohmann::json::parse(cmd->body)["result"]["resolution"]["outcome"] == "Scheduled");

    auto state = c.Get(base + "/state");
    CHECK(nlohmann::json::parse(state->body)["pending"]["remaining_s"].get<double>() == doctest::Approx(2.0));
    clock.now += 2.0;
    state = c.Get(base + "/state");
    CHECK(vec_from_json(nlohmann::json::parse(state->body)["pose"]["position"]) == Vec3{0, 0, 50});

    auto scene = c.Get(base + "/scene");
    CHECK(nlohmann::json::parse(scene->body)["segments"].size() == 8);

    CHECK(c.Post(base + "/command", R"({"transcript": ""})", "application/json")->status == 400);
    CHECK(c.Post(base + "/command", "{oops", "application/json")->status == 400);
    CHECK(c.Get("/api/sessions/zzz/state")->status == 404);
    CHECK(c.Post("/api/sessions", R"({"technique": "hover"})", "application/json")->status == 400);

    auto reset = c.Post(base + "/reset", "", "application/json");
    CHECK(reset->status == 200);
    CHECK(vec_from_json(nlohmann::json::parse(reset->body)["pose"]["position"]) == Vec3{0, 0, 0});

    CHECK(c.Delete(base)->status == 204);
    CHECK(c.Get(base + "/state")->status == 404);

    server.stop();
    th.join();
  }
}
