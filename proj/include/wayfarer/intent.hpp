#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wayfarer/backend.hpp"
#include "wayfarer/world.hpp"

namespace wayfarer {

struct ResolverConfig {
  double max_travel = 50.0;       // meters, measured on the ground after snapping
  double teleport_delay = 2.0;    // seconds between resolution and teleport
  double stt_latency_s = 0.48;    // simulated speech-to-text time reported with each request
  VisibilityConfig visibility;
};

struct ScheduledTeleport {
  Vec3 target;
  double execute_at = 0.0;
};

enum class Outcome { Scheduled, NoTarget, OutOfRange, BackendError };

std::string_view to_string(Outcome outcome);

struct Resolution {
  Outcome outcome = Outcome::NoTarget;
  std::optional<ScheduledTeleport> schedule;  // set only for Scheduled
  std::optional<Vec3> raw_target;             // what the model answered
  std::optional<Vec3> snapped_target;         // raw target moved onto the road network
  double stt_latency_s = 0.0;
  double llm_latency_s = 0.0;
  std::string response_text;
  std::string error;
};

std::string build_system_prompt();

// Throws EmptyTranscript for blank input.
std::string build_user_prompt(std::string_view transcript, std::string_view context, const Pose& pose,
                              double max_travel = 50.0);

// First three finite real numbers in the text, read left to right.
std::optional<Vec3> parse_target(std::string_view text);

// Deterministic answer used by MockBackend.
std::string mock_resolve(std::string_view transcript, const Pose& pose, const std::vector<SceneObject>& visible);

Resolution resolve_command(std::string_view transcript, const Pose& pose, const TownLayout& layout,
                           const ResolverConfig& cfg, Backend& backend, double now);

}  // namespace wayfarer
