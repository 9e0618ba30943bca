#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "wayfarer/geometry.hpp"

namespace wayfarer {

// Axis-aligned rectangle on the ground plane.
struct Footprint {
  double min_x = 0.0;
  double min_z = 0.0;
  double max_x = 0.0;
  double max_z = 0.0;

  bool contains(double x, double z) const {
    return x >= min_x && x <= max_x && z >= min_z && z <= max_z;
  }
};

struct SceneObject {
  std::string id;
  std::string name;
  std::string color;
  std::string tag;  // e.g. landmark, building, vehicle
  Vec3 position;
  std::optional<Footprint> footprint;
};

struct RoadSegment {
  Vec3 a;
  Vec3 b;
  double half_width = 4.0;
};

struct TownLayout {
  std::vector<RoadSegment> segments;
  std::vector<SceneObject> objects;
  Pose start_pose;
  std::vector<Vec3> targets;
};

struct VisibilityConfig {
  double max_distance = 50.0;
  double fov_half_angle = 57.5;
  bool occlusion_enabled = true;
  // Only objects carrying one of these tags are reported; empty accepts any tag.
  std::vector<std::string> tags = {"landmark", "building", "vehicle"};
};

// Two nearest centerline distances closer than this count as an ambiguous
// snap (intersections, corners) and are resolved by head orientation.
inline constexpr double kSnapTieEpsilon = 0.5;

// Tolerance for corridor membership tests.
inline constexpr double kCorridorTolerance = 1e-9;

TownLayout parse_scene(const nlohmann::json& doc);
TownLayout load_scene(const std::filesystem::path& path);
nlohmann::json scene_to_json(const TownLayout& layout);

// Checks every TownLayout invariant, throwing ValidationError naming the field.
void validate(const TownLayout& layout);

std::filesystem::path default_scene_path();

std::vector<SceneObject> visible_objects(const TownLayout& layout, const Pose& pose,
                                         const VisibilityConfig& cfg = {});

std::string serialize_context(const std::vector<SceneObject>& objects, const Pose& pose);

struct SegmentProjection {
  Vec3 point;         // closest centerline point, y = 0
  double distance;    // ground distance from the query to `point`
  double along;       // 0 at a, 1 at b
};

SegmentProjection project_onto_segment(const RoadSegment& segment, Vec3 p);

// Acute angle in [0, 90] between the segment's line and the heading `yaw`.
double line_heading_angle(const RoadSegment& segment, double yaw);

struct SnapResult {
  Vec3 point;
  std::size_t segment_index;
  bool tie_break_applied;  // true when more than one segment was within kSnapTieEpsilon
};

SnapResult snap_to_road(const TownLayout& layout, Vec3 p, double yaw);
Vec3 nearest_walkable_point(const TownLayout& layout, Vec3 p, double yaw);

bool within_corridor(const TownLayout& layout, Vec3 p);

// Largest fraction s in [0, 1] such that every point of from + t (to - from),
// t in [0, s], lies inside some corridor. Returns 0 if `from` is outside.
double corridor_reach(const TownLayout& layout, Vec3 from, Vec3 to);

}  // namespace wayfarer
