#pragma once

#include <vector>

#include "wayfarer/locomotion.hpp"
#include "wayfarer/world.hpp"

namespace wayfarer {

// Pacing of the scripted users that drive the two-target task. These are
// behavioural assumptions, not measurements.
struct AgentPacing {
  double teleport_hop = 20.0;       // farthest aim of one controller teleport (m)
  double teleport_interval = 1.0;   // time between consecutive aims (s)
  double llm_hop = 50.0;            // longest requested move (m)
  double speech_time = 1.5;         // time to utter one command (s)
  double processing_time = 1.45;    // speech-to-text plus model response (s)
  double think_time = 0.5;          // pause after arriving before speaking again (s)
};

// Road route start -> target 1 -> target 2 -> ..., as turn points.
std::vector<Vec3> task_route(const TownLayout& layout);

std::vector<ScriptInput> teleport_agent_script(const TownLayout& layout, const AgentPacing& pacing = {});
std::vector<ScriptInput> steering_agent_script(const TownLayout& layout, const SimConfig& cfg = {},
                                               const AgentPacing& pacing = {});
std::vector<ScriptInput> llm_agent_script(const TownLayout& layout, const SimConfig& cfg = {},
                                          const AgentPacing& pacing = {});

std::vector<ScriptInput> agent_script(const TownLayout& layout, Technique technique, const SimConfig& cfg = {},
                                      const AgentPacing& pacing = {});

}  // namespace wayfarer
