#include "wayfarer/locomotion.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "wayfarer/error.hpp"

namespace wayfarer {
namespace {

std::string normalize_phrase(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

nlohmann::json pose_json(const Pose& pose) {
  return {{"position", vec_json(pose.position)}, {"yaw", pose.yaw}};
}

nlohmann::json input_json(const CommandInput& in) {
  nlohmann::json j = nlohmann::json::object();
  if (!in.transcript.empty()) j["transcript"] = in.transcript;
  if (in.aim) j["aim"] = vec_json(*in.aim);
  if (in.yaw) j["yaw"] = *in.yaw;
  return j;
}

nlohmann::json resolution_json(const Resolution& r) {
  nlohmann::json j = {{"outcome", to_string(r.outcome)},
                      {"response_text", r.response_text},
                      {"stt_s", r.stt_latency_s},
                      {"llm_s", r.llm_latency_s}};
  if (r.schedule) {
    j["target"] = vec_json(r.schedule->target);
    j["execute_at"] = r.schedule->execute_at;
  }
  if (r.raw_target) j["raw_target"] = vec_json(*r.raw_target);
  if (r.snapped_target) j["snapped_target"] = vec_json(*r.snapped_target);
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

void emit(std::vector<TraceEvent>* events, double t, TraceKind kind, nlohmann::json payload) {
  if (events) events->push_back({t, kind, std::move(payload)});
}

}  // namespace

std::string_view to_string(Technique technique) {
  switch (technique) {
    case Technique::Teleport: return "teleport";
    case Technique::Steering: return "steering";
    case Technique::LlmDriven: return "llm";
  }
  return "unknown";
}

Technique parse_technique(std::string_view name) {
  const std::string n = normalize_phrase(name);
  if (n == "teleport" || n == "teleportation") return Technique::Teleport;
  if (n == "steering" || n == "fixed") return Technique::Steering;
  if (n == "llm" || n == "llm-driven" || n == "llmdriven") return Technique::LlmDriven;
  throw ValidationError("technique: expected teleport, steering or llm, got '" + std::string(name) + "'");
}

std::string_view to_string(FixedCommand cmd) {
  switch (cmd) {
    case FixedCommand::Forward: return "go forward";
    case FixedCommand::Back: return "go back";
    case FixedCommand::TurnLeft: return "turn left";
    case FixedCommand::TurnRight: return "turn right";
    case FixedCommand::Stop: return "stop";
    case FixedCommand::Faster: return "faster";
    case FixedCommand::Slower: return "slower";
    case FixedCommand::Unrecognized: return "unrecognized";
  }
  return "unrecognized";
}

FixedCommand recognize_fixed_command(std::string_view transcript) {
  static constexpr FixedCommand kAll[] = {FixedCommand::Forward, FixedCommand::Back,   FixedCommand::TurnLeft,
                                          FixedCommand::TurnRight, FixedCommand::Stop, FixedCommand::Faster,
                                          FixedCommand::Slower};
  const std::string phrase = normalize_phrase(transcript);
  for (FixedCommand c : kAll) {
    if (phrase == to_string(c)) return c;
  }
  return FixedCommand::Unrecognized;
}

SteeringState apply_steering_command(SteeringState state, FixedCommand cmd, const SteeringConfig& cfg) {
  const int top = static_cast<int>(cfg.speed_levels.size()) - 1;
  switch (cmd) {
    case FixedCommand::Forward: state.moving = true; break;
    case FixedCommand::Back:
      state.moving = true;
      state.heading = normalize_yaw(state.heading + 180.0);
      break;
    case FixedCommand::TurnLeft: state.heading = normalize_yaw(state.heading - cfg.turn_step); break;
    case FixedCommand::TurnRight: state.heading = normalize_yaw(state.heading + cfg.turn_step); break;
    case FixedCommand::Stop: state.moving = false; break;
    case FixedCommand::Faster: state.level_index = std::min(state.level_index + 1, top); break;
    case FixedCommand::Slower: state.level_index = std::max(state.level_index - 1, 0); break;
    case FixedCommand::Unrecognized: break;
  }
  return state;
}

std::string_view to_string(TraceKind kind) {
  switch (kind) {
    case TraceKind::Command: return "command";
    case TraceKind::Resolution: return "resolution";
    case TraceKind::Teleport: return "teleport";
    case TraceKind::Tick: return "tick";
    case TraceKind::TargetReached: return "target_reached";
  }
  return "tick";
}

TraceKind parse_trace_kind(std::string_view name) {
  for (TraceKind k : {TraceKind::Command, TraceKind::Resolution, TraceKind::Teleport, TraceKind::Tick,
                      TraceKind::TargetReached}) {
    if (name == to_string(k)) return k;
  }
  throw ParseError("unknown trace kind '" + std::string(name) + "'");
}

SimState initial_state(const TownLayout& layout, Technique technique) {
  SimState s;
  s.technique = technique;
  s.pose = layout.start_pose;
  s.pose.yaw = normalize_yaw(s.pose.yaw);
  s.steering.heading = s.pose.yaw;
  s.done = layout.targets.empty();
  return s;
}

void check_targets(SimState& state, const TownLayout& layout, double radius, std::vector<TraceEvent>* events) {
  while (state.next_target_index < layout.targets.size() &&
         ground_distance(state.pose.position, layout.targets[state.next_target_index]) < radius) {
    emit(events, state.t, TraceKind::TargetReached,
         {{"index", state.next_target_index},
          {"target", vec_json(layout.targets[state.next_target_index])},
          {"position", vec_json(state.pose.position)}});
    ++state.next_target_index;
  }
  state.done = state.next_target_index == layout.targets.size();
}

SimState step(SimState state, const TownLayout& layout, double dt, const SimConfig& cfg,
              std::vector<TraceEvent>* events) {
  if (state.technique == Technique::Steering && state.steering.moving) {
    const double speed = cfg.steering.speed_levels.at(static_cast<std::size_t>(state.steering.level_index));
    const Vec3 from = state.pose.position;
    const Vec3 to = from + (speed * dt) * heading_vector(state.steering.heading);
    const double reach = corridor_reach(layout, from, to);
    state.pose.position = from + reach * (to - from);
  }

  const double next_t = state.t + dt;
  if (state.pending && next_t >= state.pending->execute_at - 1e-9) {
    const Vec3 from = state.pose.position;
    state.pose.position = state.pending->target;
    emit(events, next_t, TraceKind::Teleport,
         {{"from", vec_json(from)}, {"to", vec_json(state.pending->target)},
          {"scheduled_at", state.pending->execute_at}});
    state.pending.reset();
  }

  state.t = next_t;
  ++state.ticks;
  check_targets(state, layout, cfg.target_radius, events);

  if (cfg.trajectory_interval > 0.0) {
    const auto every = static_cast<std::uint64_t>(std::max(1.0, std::round(cfg.trajectory_interval / dt)));
    if (state.ticks % every == 0) {
      emit(events, state.t, TraceKind::Tick, {{"pose", pose_json(state.pose)}});
    }
  }
  return state;
}

TeleportAttempt controller_teleport(SimState state, const TownLayout& layout, Vec3 aim) {
  const Vec3 ground{aim.x, 0.0, aim.z};
  if (!within_corridor(layout, ground)) return {std::move(state), false};
  state.pose.position = nearest_walkable_point(layout, ground, state.pose.yaw);
  return {std::move(state), true};
}

nlohmann::json to_json(const CommandResult& r) {
  nlohmann::json j = {{"technique", to_string(r.technique)},
                      {"cancelled_pending", r.cancelled_pending},
                      {"latency", {{"stt_s", r.stt_s}, {"llm_s", r.llm_s}, {"total_s", r.total_s}}}};
  if (r.fixed) j["fixed_command"] = to_string(*r.fixed);
  if (r.resolution) j["resolution"] = resolution_json(*r.resolution);
  if (r.aim_valid) {
    j["aim_valid"] = *r.aim_valid;
    j["verdict"] = *r.aim_valid ? "green" : "red";
  }
  return j;
}

CommandResult apply_command(SimState& state, const TownLayout& layout, const CommandInput& input,
                            const SimConfig& cfg, Backend* backend, std::vector<TraceEvent>* events) {
  CommandResult result;
  result.technique = state.technique;

  if (input.yaw) {
    if (!std::isfinite(*input.yaw)) throw ValidationError("yaw: non-finite");
    state.pose.yaw = normalize_yaw(*input.yaw);
    state.steering.heading = state.pose.yaw;
  }
  const bool yaw_only = input.yaw && !input.aim && is_blank(input.transcript);
  std::vector<TraceEvent> extra;

  if (yaw_only) {
    // Head rotation without a command.
  } else if (state.technique == Technique::Teleport) {
    if (!input.aim) throw ValidationError("aim: required for controller teleportation");
    if (!input.aim->finite()) throw ValidationError("aim: non-finite");
    const Vec3 from = state.pose.position;
    TeleportAttempt attempt = controller_teleport(state, layout, *input.aim);
    state = std::move(attempt.state);
    result.aim_valid = attempt.valid;
    if (attempt.valid) {
      extra.push_back({state.t, TraceKind::Teleport, {{"from", vec_json(from)}, {"to", vec_json(state.pose.position)}}});
    }
  } else {
    if (is_blank(input.transcript)) throw EmptyTranscript();
    result.stt_s = cfg.resolver.stt_latency_s;
    if (state.technique == Technique::Steering) {
      const FixedCommand cmd = recognize_fixed_command(input.transcript);
      result.fixed = cmd;
      state.steering = apply_steering_command(state.steering, cmd, cfg.steering);
      state.pose.yaw = state.steering.heading;
    } else {
      if (!backend) throw BackendError("no backend configured for LLM-driven locomotion");
      if (state.pending) {
        state.pending.reset();
        result.cancelled_pending = true;
      }
      Resolution res = resolve_command(input.transcript, state.pose, layout, cfg.resolver, *backend, state.t);
      if (res.schedule) state.pending = res.schedule;
      result.stt_s = res.stt_latency_s;
      result.llm_s = res.llm_latency_s;
      extra.push_back({state.t, TraceKind::Resolution, resolution_json(res)});
      result.resolution = std::move(res);
    }
    result.total_s = result.stt_s + result.llm_s;
  }

  emit(events, state.t, TraceKind::Command,
       {{"input", input_json(input)}, {"result", to_json(result)}, {"pose", pose_json(state.pose)}});
  if (events) {
    for (auto& e : extra) events->push_back(std::move(e));
  }
  check_targets(state, layout, cfg.target_radius, events);
  return result;
}

SessionRun run_session(const TownLayout& layout, Technique technique, const std::vector<ScriptInput>& script,
                       Backend* backend, const SimConfig& cfg) {
  for (std::size_t i = 1; i < script.size(); ++i) {
    if (script[i].t < script[i - 1].t) {
      throw ScriptError("script: entry " + std::to_string(i) + " is earlier than entry " + std::to_string(i - 1));
    }
  }
  if (!(cfg.dt > 0.0)) throw ValidationError("dt: must be positive");

  SessionRun run;
  SimState state = initial_state(layout, technique);
  check_targets(state, layout, cfg.target_radius, &run.trace);

  std::size_t next = 0;
  for (;;) {
    while (next < script.size() && script[next].t <= state.t + 1e-9) {
      apply_command(state, layout, script[next].input, cfg, backend, &run.trace);
      ++next;
    }
    if (state.done || state.t >= cfg.time_cap - 1e-9) break;
    state = step(std::move(state), layout, cfg.dt, cfg, &run.trace);
  }

  if (state.done && !layout.targets.empty()) {
    for (auto it = run.trace.rbegin(); it != run.trace.rend(); ++it) {
      if (it->kind == TraceKind::TargetReached) {
        run.completion_time = it->t;
        break;
      }
    }
  }
  run.final_state = std::move(state);
  return run;
}

}  // namespace wayfarer
