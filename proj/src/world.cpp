#include "wayfarer/world.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>

#include <fmt/format.h>

#include "wayfarer/error.hpp"

namespace wayfarer {
namespace {

using nlohmann::json;

Vec3 parse_vec3(const json& j, const std::string& field) {
  if (j.is_array() && j.size() == 3) {
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
  }
  if (j.is_object()) {
    return {j.at("x").get<double>(), j.at("y").get<double>(), j.at("z").get<double>()};
  }
  throw ParseError(fmt::format("{}: expected [x, y, z] or {{x, y, z}}", field));
}

json vec3_json(Vec3 v) { return json::array({v.x, v.y, v.z}); }

void require_finite(Vec3 v, const std::string& field) {
  if (!v.finite()) throw ValidationError(field + ": non-finite coordinate");
}

// One-decimal formatting that never prints "-0.0".
std::string one_decimal(double v) {
  std::string s = fmt::format("{:.1f}", v);
  if (s == "-0.0") s = "0.0";
  return s;
}

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool empty() const { return lo > hi; }
};

// Restricts `iv` to the parameters t with lo <= origin + t * rate <= hi.
void clip_slab(Interval& iv, double origin, double rate, double lo, double hi) {
  if (std::abs(rate) < 1e-15) {
    if (origin < lo || origin > hi) iv = {1.0, 0.0};
    return;
  }
  double t0 = (lo - origin) / rate;
  double t1 = (hi - origin) / rate;
  if (t0 > t1) std::swap(t0, t1);
  iv.lo = std::max(iv.lo, t0);
  iv.hi = std::min(iv.hi, t1);
}

// Parameters t where the ground point (px + t dx, pz + t dz) is within r of (cx, cz).
Interval disc_interval(double px, double pz, double dx, double dz, double cx, double cz, double r) {
  const double fx = px - cx;
  const double fz = pz - cz;
  const double a = dx * dx + dz * dz;
  const double b = 2.0 * (fx * dx + fz * dz);
  const double c = fx * fx + fz * fz - r * r;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return {1.0, 0.0};
  const double sq = std::sqrt(disc);
  return {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)};
}

Interval capsule_interval(const RoadSegment& s, Vec3 from, Vec3 dir) {
  const double r = s.half_width;
  const double ex = s.b.x - s.a.x;
  const double ez = s.b.z - s.a.z;
  const double len = std::hypot(ex, ez);
  const double ux = ex / len;
  const double uz = ez / len;

  // Segment-local frame: u along the centerline, v across it.
  const double u0 = (from.x - s.a.x) * ux + (from.z - s.a.z) * uz;
  const double v0 = (from.x - s.a.x) * uz - (from.z - s.a.z) * ux;
  const double du = dir.x * ux + dir.z * uz;
  const double dv = dir.x * uz - dir.z * ux;

  Interval body;
  clip_slab(body, u0, du, 0.0, len);
  clip_slab(body, v0, dv, -r, r);

  Interval out{1.0, 0.0};
  auto merge = [&](const Interval& iv) {
    if (iv.empty()) return;
    if (out.empty()) {
      out = iv;
    } else {
      out.lo = std::min(out.lo, iv.lo);
      out.hi = std::max(out.hi, iv.hi);
    }
  };
  merge(body);
  merge(disc_interval(from.x, from.z, dir.x, dir.z, s.a.x, s.a.z, r));
  merge(disc_interval(from.x, from.z, dir.x, dir.z, s.b.x, s.b.z, r));
  return out;
}

// Liang-Barsky clip of the ground segment p -> q against a rectangle.
bool segment_hits_rect(Vec3 p, Vec3 q, const Footprint& f) {
  Interval iv{0.0, 1.0};
  clip_slab(iv, p.x, q.x - p.x, f.min_x, f.max_x);
  clip_slab(iv, p.z, q.z - p.z, f.min_z, f.max_z);
  return !iv.empty();
}

bool tag_accepted(const std::string& tag, const VisibilityConfig& cfg) {
  if (tag.empty()) return false;
  if (cfg.tags.empty()) return true;
  return std::find(cfg.tags.begin(), cfg.tags.end(), tag) != cfg.tags.end();
}

}  // namespace

TownLayout parse_scene(const json& doc) {
  TownLayout layout;
  try {
    for (std::size_t i = 0; i < doc.at("segments").size(); ++i) {
      const json& s = doc["segments"][i];
      const std::string field = fmt::format("segments[{}]", i);
      layout.segments.push_back({parse_vec3(s.at("a"), field + ".a"),
                                 parse_vec3(s.at("b"), field + ".b"),
                                 s.value("half_width", 4.0)});
    }
    for (std::size_t i = 0; i < doc.value("objects", json::array()).size(); ++i) {
      const json& o = doc["objects"][i];
      SceneObject obj;
      obj.id = o.at("id").get<std::string>();
      obj.name = o.at("name").get<std::string>();
      obj.color = o.value("color", "");
      obj.tag = o.value("tag", "");
      obj.position = parse_vec3(o.at("position"), fmt::format("objects[{}].position", i));
      if (o.contains("footprint") && !o["footprint"].is_null()) {
        const json& f = o["footprint"];
        obj.footprint = Footprint{f.at("min_x").get<double>(), f.at("min_z").get<double>(),
                                  f.at("max_x").get<double>(), f.at("max_z").get<double>()};
      }
      layout.objects.push_back(std::move(obj));
    }
    const json& sp = doc.at("start_pose");
    layout.start_pose.position = parse_vec3(sp.at("position"), "start_pose.position");
    layout.start_pose.yaw = sp.value("yaw", 0.0);
    for (std::size_t i = 0; i < doc.value("targets", json::array()).size(); ++i) {
      layout.targets.push_back(parse_vec3(doc["targets"][i], fmt::format("targets[{}]", i)));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("scene: ") + e.what());
  }
  validate(layout);
  layout.start_pose.yaw = normalize_yaw(layout.start_pose.yaw);
  return layout;
}

void validate(const TownLayout& layout) {
  if (layout.segments.empty()) throw ValidationError("segments: at least one road segment required");
  for (std::size_t i = 0; i < layout.segments.size(); ++i) {
    const RoadSegment& s = layout.segments[i];
    const std::string field = fmt::format("segments[{}]", i);
    require_finite(s.a, field + ".a");
    require_finite(s.b, field + ".b");
    if (s.a.y != 0.0 || s.b.y != 0.0) throw ValidationError(field + ": endpoints must have y = 0");
    if (ground_distance(s.a, s.b) == 0.0) throw ValidationError(field + ": a and b coincide");
    if (!(s.half_width > 0.0) || !std::isfinite(s.half_width)) {
      throw ValidationError(field + ".half_width: must be positive");
    }
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < layout.objects.size(); ++i) {
    const SceneObject& o = layout.objects[i];
    const std::string field = fmt::format("objects[{}]", i);
    if (o.id.empty()) throw ValidationError(field + ".id: empty");
    if (!ids.insert(o.id).second) throw ValidationError(field + ".id: duplicate id '" + o.id + "'");
    if (o.tag.empty()) throw ValidationError(field + ".tag: empty");
    require_finite(o.position, field + ".position");
    if (o.footprint && (o.footprint->min_x >= o.footprint->max_x ||
                        o.footprint->min_z >= o.footprint->max_z)) {
      throw ValidationError(field + ".footprint: min must be below max");
    }
  }
  require_finite(layout.start_pose.position, "start_pose.position");
  if (!std::isfinite(layout.start_pose.yaw)) throw ValidationError("start_pose.yaw: non-finite");
  for (std::size_t i = 0; i < layout.targets.size(); ++i) {
    require_finite(layout.targets[i], fmt::format("targets[{}]", i));
    if (!within_corridor(layout, layout.targets[i])) {
      throw ValidationError(fmt::format("targets[{}]: not inside any road corridor", i));
    }
  }
}

TownLayout load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scene file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return parse_scene(doc);
}

json scene_to_json(const TownLayout& layout) {
  json doc;
  doc["segments"] = json::array();
  for (const auto& s : layout.segments) {
    doc["segments"].push_back({{"a", vec3_json(s.a)}, {"b", vec3_json(s.b)}, {"half_width", s.half_width}});
  }
  doc["objects"] = json::array();
  for (const auto& o : layout.objects) {
    json jo = {{"id", o.id}, {"name", o.name}, {"color", o.color}, {"tag", o.tag},
               {"position", vec3_json(o.position)}};
    if (o.footprint) {
      jo["footprint"] = {{"min_x", o.footprint->min_x}, {"min_z", o.footprint->min_z},
                         {"max_x", o.footprint->max_x}, {"max_z", o.footprint->max_z}};
    }
    doc["objects"].push_back(std::move(jo));
  }
  doc["start_pose"] = {{"position", vec3_json(layout.start_pose.position)}, {"yaw", layout.start_pose.yaw}};
  doc["targets"] = json::array();
  for (const auto& t : layout.targets) doc["targets"].push_back(vec3_json(t));
  return doc;
}

std::filesystem::path default_scene_path() {
  return std::filesystem::path(WAYFARER_DATA_DIR) / "default_scene.json";
}

std::vector<SceneObject> visible_objects(const TownLayout& layout, const Pose& pose,
                                         const VisibilityConfig& cfg) {
  struct Candidate {
    double distance;
    const SceneObject* object;
  };
  std::vector<Candidate> found;
  const Vec3 eye = pose.position;
  for (const SceneObject& o : layout.objects) {
    if (!tag_accepted(o.tag, cfg)) continue;
    const double d = ground_distance(eye, o.position);
    if (d > cfg.max_distance) continue;
    if (d > 0.0) {
      const double bearing = std::abs(angle_diff(yaw_of(o.position.x - eye.x, o.position.z - eye.z), pose.yaw));
      if (bearing > cfg.fov_half_angle) continue;
    }
    if (cfg.occlusion_enabled) {
      const bool blocked = std::any_of(layout.objects.begin(), layout.objects.end(), [&](const SceneObject& other) {
        return &other != &o && other.footprint && segment_hits_rect(eye, o.position, *other.footprint);
      });
      if (blocked) continue;
    }
    found.push_back({d, &o});
  }
  std::sort(found.begin(), found.end(), [](const Candidate& l, const Candidate& r) {
    if (l.distance != r.distance) return l.distance < r.distance;
    return l.object->id < r.object->id;
  });
  std::vector<SceneObject> out;
  out.reserve(found.size());
  for (const auto& c : found) out.push_back(*c.object);
  return out;
}

std::string serialize_context(const std::vector<SceneObject>& objects, const Pose& pose) {
  std::string text;
  if (objects.empty()) text += "No visible objects.\n";
  for (const SceneObject& o : objects) {
    text += fmt::format("{} ({} {}) at ({}, {}, {})\n", o.name, o.color, o.tag, one_decimal(o.position.x),
                        one_decimal(o.position.y), one_decimal(o.position.z));
  }
  text += fmt::format("User position: ({}, {}, {}), yaw {} degrees\n", one_decimal(pose.position.x),
                      one_decimal(pose.position.y), one_decimal(pose.position.z), one_decimal(pose.yaw));
  return text;
}

SegmentProjection project_onto_segment(const RoadSegment& s, Vec3 p) {
  const double ex = s.b.x - s.a.x;
  const double ez = s.b.z - s.a.z;
  const double len2 = ex * ex + ez * ez;
  double t = ((p.x - s.a.x) * ex + (p.z - s.a.z) * ez) / len2;
  t = std::clamp(t, 0.0, 1.0);
  const Vec3 q{s.a.x + t * ex, 0.0, s.a.z + t * ez};
  return {q, ground_distance(p, q), t};
}

double line_heading_angle(const RoadSegment& s, double yaw) {
  const double a = std::abs(angle_diff(yaw_of(s.b.x - s.a.x, s.b.z - s.a.z), yaw));
  return std::min(a, 180.0 - a);
}

SnapResult snap_to_road(const TownLayout& layout, Vec3 p, double yaw) {
  std::vector<SegmentProjection> proj;
  proj.reserve(layout.segments.size());
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : layout.segments) {
    proj.push_back(project_onto_segment(s, p));
    best = std::min(best, proj.back().distance);
  }

  std::size_t winner = layout.segments.size();
  std::size_t contenders = 0;
  double winner_angle = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < proj.size(); ++i) {
    if (proj[i].distance - best >= kSnapTieEpsilon) continue;
    ++contenders;
    const double angle = line_heading_angle(layout.segments[i], yaw);
    if (angle < winner_angle - 1e-9) {
      winner = i;
      winner_angle = angle;
    }
  }
  return {proj[winner].point, winner, contenders > 1};
}

Vec3 nearest_walkable_point(const TownLayout& layout, Vec3 p, double yaw) {
  return snap_to_road(layout, p, yaw).point;
}

bool within_corridor(const TownLayout& layout, Vec3 p) {
  return std::any_of(layout.segments.begin(), layout.segments.end(), [&](const RoadSegment& s) {
    return project_onto_segment(s, p).distance <= s.half_width + kCorridorTolerance;
  });
}

double corridor_reach(const TownLayout& layout, Vec3 from, Vec3 to) {
  const Vec3 dir{to.x - from.x, 0.0, to.z - from.z};
  if (dir.x == 0.0 && dir.z == 0.0) return within_corridor(layout, from) ? 1.0 : 0.0;

  std::vector<Interval> pieces;
  for (const auto& s : layout.segments) {
    Interval iv = capsule_interval(s, from, dir);
    if (!iv.empty()) pieces.push_back(iv);
  }
  constexpr double kSlack = 1e-12;
  if (std::none_of(pieces.begin(), pieces.end(),
                   [](const Interval& iv) { return iv.lo <= kSlack && iv.hi >= -kSlack; })) {
    return 0.0;
  }
  double reach = 0.0;
  bool grew = true;
  while (grew && reach < 1.0) {
    grew = false;
    for (const auto& iv : pieces) {
      if (iv.lo <= reach + kSlack && iv.hi > reach) {
        reach = iv.hi;
        grew = true;
      }
    }
  }
  return std::clamp(reach, 0.0, 1.0);
}

}  // namespace wayfarer
