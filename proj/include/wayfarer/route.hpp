#pragma once

#include <vector>

#include "wayfarer/world.hpp"

namespace wayfarer {

// Shortest path along road centerlines. Both endpoints are first snapped to
// the network; the result starts at the snapped `from` and ends at the
// snapped `to`, with a waypoint at every junction where the path turns.
std::vector<Vec3> plan_route(const TownLayout& layout, Vec3 from, Vec3 to);

double path_length(const std::vector<Vec3>& waypoints);

}  // namespace wayfarer
