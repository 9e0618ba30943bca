#include "wayfarer/route.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace wayfarer {
namespace {

constexpr double kMergeDistance = 1e-6;

struct Graph {
  std::vector<Vec3> nodes;
  std::vector<std::vector<std::pair<std::size_t, double>>> edges;

  std::size_t intern(Vec3 p) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (ground_distance(nodes[i], p) < kMergeDistance) return i;
    }
    nodes.push_back(p);
    edges.emplace_back();
    return nodes.size() - 1;
  }

  void connect(std::size_t a, std::size_t b) {
    if (a == b) return;
    const double w = ground_distance(nodes[a], nodes[b]);
    edges[a].emplace_back(b, w);
    edges[b].emplace_back(a, w);
  }
};

// Crossing point of two centerlines, if they intersect within both segments.
bool intersect(const RoadSegment& s, const RoadSegment& t, Vec3& out) {
  const double rx = s.b.x - s.a.x, rz = s.b.z - s.a.z;
  const double qx = t.b.x - t.a.x, qz = t.b.z - t.a.z;
  const double denom = rx * qz - rz * qx;
  if (std::abs(denom) < 1e-12) return false;
  const double wx = t.a.x - s.a.x, wz = t.a.z - s.a.z;
  const double u = (wx * qz - wz * qx) / denom;
  const double v = (wx * rz - wz * rx) / denom;
  if (u < -1e-12 || u > 1 + 1e-12 || v < -1e-12 || v > 1 + 1e-12) return false;
  out = {s.a.x + u * rx, 0.0, s.a.z + u * rz};
  return true;
}

}  // namespace

std::vector<Vec3> plan_route(const TownLayout& layout, Vec3 from, Vec3 to) {
  const SnapResult start = snap_to_road(layout, from, 0.0);
  const SnapResult goal = snap_to_road(layout, to, 0.0);

  // Every interesting point, grouped by the segment it lies on.
  const std::size_t n_seg = layout.segments.size();
  std::vector<std::vector<Vec3>> on_segment(n_seg);
  for (std::size_t i = 0; i < n_seg; ++i) {
    on_segment[i].push_back(layout.segments[i].a);
    on_segment[i].push_back(layout.segments[i].b);
    for (std::size_t j = i + 1; j < n_seg; ++j) {
      Vec3 x;
      if (intersect(layout.segments[i], layout.segments[j], x)) {
        on_segment[i].push_back(x);
        on_segment[j].push_back(x);
      }
    }
  }
  on_segment[start.segment_index].push_back(start.point);
  on_segment[goal.segment_index].push_back(goal.point);

  Graph g;
  for (std::size_t i = 0; i < n_seg; ++i) {
    auto& pts = on_segment[i];
    const RoadSegment& s = layout.segments[i];
    std::sort(pts.begin(), pts.end(), [&](Vec3 l, Vec3 r) {
      return project_onto_segment(s, l).along < project_onto_segment(s, r).along;
    });
    for (std::size_t k = 1; k < pts.size(); ++k) g.connect(g.intern(pts[k - 1]), g.intern(pts[k]));
  }

  const std::size_t src = g.intern(start.point);
  const std::size_t dst = g.intern(goal.point);
  std::vector<double> dist(g.nodes.size(), std::numeric_limits<double>::infinity());
  std::vector<std::size_t> prev(g.nodes.size(), g.nodes.size());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[src] = 0.0;
  open.emplace(0.0, src);
  while (!open.empty()) {
    auto [d, u] = open.top();
    open.pop();
    if (d > dist[u]) continue;
    if (u == dst) break;
    for (auto [v, w] : g.edges[u]) {
      if (d + w < dist[v]) {
        dist[v] = d + w;
        prev[v] = u;
        open.emplace(dist[v], v);
      }
    }
  }
  if (!std::isfinite(dist[dst])) return {};

  std::vector<Vec3> path;
  for (std::size_t v = dst; v != g.nodes.size(); v = prev[v]) path.push_back(g.nodes[v]);
  std::reverse(path.begin(), path.end());

  // Drop collinear interior points so only turns remain.
  std::vector<Vec3> simplified;
  for (const Vec3& p : path) {
    if (simplified.size() >= 2) {
      const Vec3 a = simplified[simplified.size() - 2];
      const Vec3 b = simplified.back();
      const double c = (b.x - a.x) * (p.z - b.z) - (b.z - a.z) * (p.x - b.x);
      const double d = (b.x - a.x) * (p.x - b.x) + (b.z - a.z) * (p.z - b.z);
      if (std::abs(c) < 1e-9 && d > 0.0) simplified.back() = p;
      else simplified.push_back(p);
    } else {
      simplified.push_back(p);
    }
  }
  return simplified;
}

double path_length(const std::vector<Vec3>& waypoints) {
  double total = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) total += ground_distance(waypoints[i - 1], waypoints[i]);
  return total;
}

}  // namespace wayfarer
