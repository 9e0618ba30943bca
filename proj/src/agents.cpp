#include "wayfarer/agents.hpp"

#include <cmath>

#include <fmt/format.h>

#include "wayfarer/route.hpp"

namespace wayfarer {
namespace {

struct Leg {
  Vec3 from;
  Vec3 to;
  double length() const { return ground_distance(from, to); }
  double yaw() const { return yaw_of(to.x - from.x, to.z - from.z); }
};

std::vector<Leg> legs_of(const TownLayout& layout) {
  std::vector<Leg> legs;
  Vec3 at = layout.start_pose.position;
  for (const Vec3& w : task_route(layout)) {
    if (ground_distance(at, w) > 1e-9) legs.push_back({at, w});
    at = w;
  }
  return legs;
}

}  // namespace

std::vector<Vec3> task_route(const TownLayout& layout) {
  std::vector<Vec3> route;
  Vec3 from = layout.start_pose.position;
  for (const Vec3& target : layout.targets) {
    std::vector<Vec3> part = plan_route(layout, from, target);
    for (const Vec3& p : part) {
      if (route.empty() || ground_distance(route.back(), p) > 1e-9) route.push_back(p);
    }
    from = target;
  }
  return route;
}

std::vector<ScriptInput> teleport_agent_script(const TownLayout& layout, const AgentPacing& pacing) {
  std::vector<ScriptInput> script;
  double t = 0.0;
  for (const Leg& leg : legs_of(layout)) {
    const int hops = std::max(1, static_cast<int>(std::ceil(leg.length() / pacing.teleport_hop - 1e-9)));
    for (int k = 1; k <= hops; ++k) {
      t += pacing.teleport_interval;
      const double f = static_cast<double>(k) / hops;
      ScriptInput in;
      in.t = t;
      in.input.aim = leg.from + f * (leg.to - leg.from);
      script.push_back(std::move(in));
    }
  }
  return script;
}

std::vector<ScriptInput> steering_agent_script(const TownLayout& layout, const SimConfig& cfg,
                                               const AgentPacing&) {
  std::vector<ScriptInput> script;
  auto say = [&](double t, std::string text) {
    ScriptInput in;
    in.t = t;
    in.input.transcript = std::move(text);
    script.push_back(std::move(in));
  };

  const int top = static_cast<int>(cfg.steering.speed_levels.size()) - 1;
  for (int i = 0; i < top; ++i) say(0.0, "faster");
  const double speed = cfg.steering.speed_levels.back();

  double heading = normalize_yaw(layout.start_pose.yaw);
  double t = 0.0;
  bool moving = false;
  for (const Leg& leg : legs_of(layout)) {
    const double want = leg.yaw();
    const double turn = angle_diff(want, heading);
    if (std::abs(std::abs(turn) - cfg.steering.turn_step) < 1e-6) {
      say(t, turn > 0 ? "turn right" : "turn left");
    } else if (std::abs(turn) > 1e-6) {
      // Physical body rotation for headings the turn commands cannot reach.
      ScriptInput in;
      in.t = t;
      in.input.yaw = want;
      script.push_back(std::move(in));
    }
    heading = want;
    if (!moving) {
      say(t, "go forward");
      moving = true;
    }
    t += leg.length() / speed;
  }
  return script;
}

std::vector<ScriptInput> llm_agent_script(const TownLayout& layout, const SimConfig& cfg,
                                          const AgentPacing& pacing) {
  std::vector<ScriptInput> script;
  const double cycle =
      pacing.speech_time + pacing.processing_time + cfg.resolver.teleport_delay + pacing.think_time + 2 * cfg.dt;
  double t = pacing.speech_time;
  for (const Leg& leg : legs_of(layout)) {
    const int hops = std::max(1, static_cast<int>(std::ceil(leg.length() / pacing.llm_hop - 1e-9)));
    const double hop = leg.length() / hops;
    for (int k = 0; k < hops; ++k) {
      ScriptInput in;
      in.t = t;
      in.input.yaw = leg.yaw();
      in.input.transcript = fmt::format("move {:.3f} meters forward", hop);
      script.push_back(std::move(in));
      t += cycle;
    }
  }
  return script;
}

std::vector<ScriptInput> agent_script(const TownLayout& layout, Technique technique, const SimConfig& cfg,
                                      const AgentPacing& pacing) {
  switch (technique) {
    case Technique::Teleport: return teleport_agent_script(layout, pacing);
    case Technique::Steering: return steering_agent_script(layout, cfg, pacing);
    case Technique::LlmDriven: return llm_agent_script(layout, cfg, pacing);
  }
  return {};
}

}  // namespace wayfarer
