#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "wayfarer/agents.hpp"
#include "wayfarer/error.hpp"
#include "wayfarer/locomotion.hpp"

using namespace wayfarer;
using testing::town;

namespace {

SimState steering_at(Vec3 p, double yaw) {
  SimState s = initial_state(town(), Technique::Steering);
  s.pose = {p, yaw};
  s.steering.heading = yaw;
  return s;
}

SimState run_ticks(SimState s, int n, const SimConfig& cfg = {}) {
  for (int i = 0; i < n; ++i) s = step(std::move(s), town(), cfg.dt, cfg);
  return s;
}

}  // namespace

TEST_SUITE("locomotion") {
  TEST_CASE("fixed command recognition") {
    CHECK(recognize_fixed_command("go forward") == FixedCommand::Forward);
    CHECK(recognize_fixed_command("  FASTER ") == FixedCommand::Faster);
    CHECK(recognize_fixed_command("Turn   Left") == FixedCommand::TurnLeft);
    CHECK(recognize_fixed_command("walk ahead") == FixedCommand::Unrecognized);
    CHECK(recognize_fixed_command("go forward please") == FixedCommand::Unrecognized);
    for (FixedCommand c : {FixedCommand::Forward, FixedCommand::Back, FixedCommand::TurnLeft, FixedCommand::TurnRight,
                           FixedCommand::Stop, FixedCommand::Faster, FixedCommand::Slower}) {
      CHECK(recognize_fixed_command(to_string(c)) == c);
    }
  }

  TEST_CASE("steering state transitions") {
    SteeringState s;
    CHECK(apply_steering_command(s, FixedCommand::Faster).level_index == 1);
    CHECK(apply_steering_command(s, FixedCommand::Slower).level_index == 0);
    CHECK(apply_steering_command(s, FixedCommand::Unrecognized) == s);
    s.level_index = 3;
    CHECK(apply_steering_command(s, FixedCommand::Faster).level_index == 3);
    s = {};
    s = apply_steering_command(s, FixedCommand::Forward);
    CHECK(s.moving);
    CHECK(s.heading == 0.0);
    CHECK(apply_steering_command(s, FixedCommand::TurnRight).heading == 90.0);
    CHECK(apply_steering_command(s, FixedCommand::TurnLeft).heading == 270.0);
    CHECK(apply_steering_command(s, FixedCommand::Back).heading == 180.0);
    CHECK_FALSE(apply_steering_command(s, FixedCommand::Stop).moving);
  }

  TEST_CASE("level 0 for 1000 ticks covers 14 m") {
    SimState s = steering_at({0, 0, 100}, 0);
    s.steering.moving = true;
    s = run_ticks(std::move(s), 1000);
    CHECK(std::abs(s.pose.position.z - 114.0) < 1e-6);
    CHECK(s.pose.position.x == 0.0);
    CHECK(s.t == doctest::Approx(10.0));
  }

  TEST_CASE("walking into a wall stops at the corridor edge while time advances") {
    SimState s = steering_at({0, 0, 50}, 90);
    s.steering.moving = true;
    s.steering.level_index = 3;
    s = run_ticks(std::move(s), 300);
    CHECK(s.pose.position.x == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(within_corridor(town(), s.pose.position));
    CHECK(s.t == doctest::Approx(3.0));
  }

  TEST_CASE("pending teleport fires on the tick reaching execute_at") {
    SimState s = initial_state(town(), Technique::LlmDriven);
    s.pending = ScheduledTeleport{{0, 0, 40}, 7.0};
    s = run_ticks(std::move(s), 699);
    CHECK(s.t == doctest::Approx(6.99));
    CHECK(s.pose.position == Vec3{0, 0, 0});
    s = step(std::move(s), town(), 0.01);
    CHECK(s.pose.position == Vec3{0, 0, 40});
    CHECK_FALSE(s.pending);
  }

  TEST_CASE("a new command cancels the pending teleport") {
    SimState s = initial_state(town(), Technique::LlmDriven);
    MockBackend mock;
    std::vector<TraceEvent> trace;
    auto r1 = apply_command(s, town(), {"move 30 meters forward", {}, {}}, {}, &mock, &trace);
    CHECK_FALSE(r1.cancelled_pending);
    REQUIRE(s.pending);
    CHECK(s.pending->target == Vec3{0, 0, 30});
    auto r2 = apply_command(s, town(), {"move 10 meters forward", {}, {}}, {}, &mock, &trace);
    CHECK(r2.cancelled_pending);
    CHECK(s.pending->target == Vec3{0, 0, 10});
    CHECK(r2.total_s == doctest::Approx(1.45));
  }

  TEST_CASE("controller teleport verdicts") {
    SimState s = initial_state(town(), Technique::Teleport);
    auto green = controller_teleport(s, town(), {0, 0, 80});
    CHECK(green.valid);
    CHECK(green.state.pose.position == Vec3{0, 0, 80});
    auto red = controller_teleport(s, town(), {50, 0, 50});
    CHECK_FALSE(red.valid);
    CHECK(red.state.pose == s.pose);
    auto same = controller_teleport(s, town(), s.pose.position);
    CHECK(same.valid);
    CHECK(same.state.pose.position == s.pose.position);
  }

  TEST_CASE("voice techniques require a transcript, the controller an aim") {
    SimState s = initial_state(town(), Technique::Steering);
    MockBackend mock;
    CHECK_THROWS_AS(apply_command(s, town(), {"  ", {}, {}}, {}, &mock, nullptr), EmptyTranscript);
    SimState t = initial_state(town(), Technique::Teleport);
    CHECK_THROWS_AS(apply_command(t, town(), {"go", {}, {}}, {}, &mock, nullptr), ValidationError);
  }

  TEST_CASE("scripted teleport session completes at the sum of waits") {
    std::vector<ScriptInput> script;
    double t = 0;
    for (const Vec3 aim : {Vec3{0, 0, 20}, Vec3{0, 0, 40}, Vec3{0, 0, 60}}) {
      t += 1.5;
      script.push_back({t, {"", aim, {}}});
    }
    TownLayout layout = town();
    layout.targets = {{0, 0, 40}, {0, 0, 60}};
    const SessionRun run = run_session(layout, Technique::Teleport, script, nullptr);
    CHECK(run.final_state.done);
    REQUIRE(run.completion_time);
    CHECK(*run.completion_time == doctest::Approx(4.5));
  }

  TEST_CASE("empty script runs to the time cap") {
    SimConfig cfg;
    cfg.time_cap = 5.0;
    const SessionRun run = run_session(town(), Technique::Steering, {}, nullptr, cfg);
    CHECK_FALSE(run.final_state.done);
    CHECK(run.final_state.t == doctest::Approx(5.0));
    CHECK_FALSE(run.completion_time);
  }

  TEST_CASE("decreasing script times are rejected") {
    std::vector<ScriptInput> script = {{2.0, {"go forward", {}, {}}}, {1.0, {"stop", {}, {}}}};
    CHECK_THROWS_AS(run_session(town(), Technique::Steering, script, nullptr), ScriptError);
  }

  TEST_CASE("replays are byte-identical and survive a jsonl round trip") {
    const auto script = agent_script(town(), Technique::LlmDriven);
    MockBackend a, b;
    const SessionRun r1 = run_session(town(), Technique::LlmDriven, script, &a);
    const SessionRun r2 = run_session(town(), Technique::LlmDriven, script, &b);
    const std::string j1 = to_jsonl(r1.trace);
    CHECK(j1 == to_jsonl(r2.trace));
    CHECK(to_jsonl(parse_jsonl(j1)) == j1);
    CHECK(r1.final_state.done);
  }

  TEST_CASE("script json round trip") {
    const auto script = agent_script(town(), Technique::Teleport);
    const auto again = parse_script(script_to_json(script));
    CHECK(script_to_json(again) == script_to_json(script));
    CHECK_THROWS_AS(parse_script(nlohmann::json::parse(R"([{"t": 1}])")), ScriptError);
  }

  TEST_CASE("agents finish in the expected order") {
    MockBackend mock;
    double done_at[3] = {};
    int i = 0;
    for (Technique t : {Technique::Teleport, Technique::Steering, Technique::LlmDriven}) {
      const SessionRun run = run_session(town(), t, agent_script(town(), t), &mock);
      REQUIRE(run.completion_time);
      done_at[i++] = *run.completion_time;
    }
    CHECK(done_at[0] < done_at[2]);
    CHECK(done_at[0] < done_at[1]);
  }
}
