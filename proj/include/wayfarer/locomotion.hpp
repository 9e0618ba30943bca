#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "wayfarer/intent.hpp"
#include "wayfarer/world.hpp"

namespace wayfarer {

enum class Technique { Teleport, Steering, LlmDriven };

std::string_view to_string(Technique technique);
// Accepts "teleport", "steering" and "llm".
Technique parse_technique(std::string_view name);

struct SteeringConfig {
  std::vector<double> speed_levels = {1.4, 2.8, 4.2, 5.6};  // m/s
  double turn_step = 90.0;                                   // degrees per turn command
};

struct SteeringState {
  bool moving = false;
  double heading = 0.0;
  int level_index = 0;

  friend bool operator==(const SteeringState&, const SteeringState&) = default;
};

enum class FixedCommand { Forward, Back, TurnLeft, TurnRight, Stop, Faster, Slower, Unrecognized };

std::string_view to_string(FixedCommand cmd);

FixedCommand recognize_fixed_command(std::string_view transcript);
SteeringState apply_steering_command(SteeringState state, FixedCommand cmd, const SteeringConfig& cfg = {});

struct SimConfig {
  double dt = 0.01;
  double target_radius = 2.0;
  double time_cap = 600.0;
  double trajectory_interval = 1.0;  // seconds between tick events; <= 0 disables them
  SteeringConfig steering;
  ResolverConfig resolver;
};

struct SimState {
  double t = 0.0;
  std::uint64_t ticks = 0;
  Pose pose;
  Technique technique = Technique::Teleport;
  SteeringState steering;
  std::optional<ScheduledTeleport> pending;
  std::size_t next_target_index = 0;
  bool done = false;
};

enum class TraceKind { Command, Resolution, Teleport, Tick, TargetReached };

std::string_view to_string(TraceKind kind);
TraceKind parse_trace_kind(std::string_view name);

struct TraceEvent {
  double t = 0.0;
  TraceKind kind = TraceKind::Tick;
  nlohmann::json payload;
};

SimState initial_state(const TownLayout& layout, Technique technique);

// Marks every target within the radius as reached, in order.
void check_targets(SimState& state, const TownLayout& layout, double radius, std::vector<TraceEvent>* events);

// Advances the simulation by one tick.
SimState step(SimState state, const TownLayout& layout, double dt, const SimConfig& cfg = {},
              std::vector<TraceEvent>* events = nullptr);

struct TeleportAttempt {
  SimState state;
  bool valid = false;  // green arc when true, red otherwise
};

TeleportAttempt controller_teleport(SimState state, const TownLayout& layout, Vec3 aim);

// One user action: a transcript for voice techniques, an aim point for the
// controller, optionally with a new head yaw.
struct CommandInput {
  std::string transcript;
  std::optional<Vec3> aim;
  std::optional<double> yaw;
};

struct CommandResult {
  Technique technique = Technique::Teleport;
  std::optional<FixedCommand> fixed;
  std::optional<Resolution> resolution;
  std::optional<bool> aim_valid;
  bool cancelled_pending = false;
  double stt_s = 0.0;
  double llm_s = 0.0;
  double total_s = 0.0;
};

nlohmann::json to_json(const CommandResult& result);

// Routes `input` to the state's technique, mutating `state` and appending
// trace events. Throws EmptyTranscript when a voice technique gets no text.
CommandResult apply_command(SimState& state, const TownLayout& layout, const CommandInput& input,
                            const SimConfig& cfg, Backend* backend, std::vector<TraceEvent>* events);

struct ScriptInput {
  double t = 0.0;
  CommandInput input;
};

std::vector<ScriptInput> parse_script(const nlohmann::json& doc);
std::vector<ScriptInput> load_script(const std::filesystem::path& path);
nlohmann::json script_to_json(const std::vector<ScriptInput>& script);

struct SessionRun {
  std::vector<TraceEvent> trace;
  SimState final_state;
  std::optional<double> completion_time;  // time of the last target_reached event when done
};

// Deterministic replay of a scripted session. Throws ScriptError on decreasing times.
SessionRun run_session(const TownLayout& layout, Technique technique, const std::vector<ScriptInput>& script,
                       Backend* backend, const SimConfig& cfg = {});

nlohmann::json to_json(const TraceEvent& event);
TraceEvent trace_event_from_json(const nlohmann::json& doc);
std::string to_jsonl(const std::vector<TraceEvent>& trace);
std::vector<TraceEvent> parse_jsonl(std::string_view text);

nlohmann::json vec_json(Vec3 v);
Vec3 vec_from_json(const nlohmann::json& j);

}  // namespace wayfarer
