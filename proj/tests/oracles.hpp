#pragma once

// Reference implementations used only by tests. They are written
// independently of the library: brute force where the library is clever,
// different formulas where the library has a closed form.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "wayfarer/gaze.hpp"
#include "wayfarer/world.hpp"

namespace oracle {

using wayfarer::Vec3;

// ---------- I-VT ----------

struct Event {
  int kind;  // 1 fixation, 2 saccade
  std::size_t first, last;
  double duration_ms;
};

inline double acos_angle_deg(Vec3 a, Vec3 b) {
  const double c = std::clamp((a.x * b.x + a.y * b.y + a.z * b.z) /
                                  (std::sqrt(a.x * a.x + a.y * a.y + a.z * a.z) *
                                   std::sqrt(b.x * b.x + b.y * b.y + b.z * b.z)),
                              -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

// Per-sample labels: a sample's velocity is that of the interval ending at it;
// the first sample borrows the first interval. Invalid endpoints give 0.
inline std::vector<int> ivt_labels(const std::vector<wayfarer::gaze::GazeSample>& s) {
  std::vector<int> label(s.size(), 0);
  auto classify = [&](std::size_t a, std::size_t b) {
    if (!s[a].valid || !s[b].valid) return 0;
    const double dt = s[b].t - s[a].t;
    const double vg = acos_angle_deg(s[a].gaze_dir, s[b].gaze_dir) / dt;
    const double vh = acos_angle_deg(s[a].head_dir, s[b].head_dir) / dt;
    if (vg < 30.0 && vh < 7.0) return 1;
    if (vg > 40.0) return 2;
    return 0;
  };
  for (std::size_t i = 1; i < s.size(); ++i) label[i] = classify(i - 1, i);
  if (s.size() > 1 && s[0].valid) label[0] = label[1];
  return label;
}

inline std::vector<Event> ivt_events(const std::vector<wayfarer::gaze::GazeSample>& s) {
  const std::vector<int> label = ivt_labels(s);
  std::vector<Event> out;
  std::size_t i = 0;
  while (i < label.size()) {
    std::size_t j = i;
    while (j + 1 < label.size() && label[j + 1] == label[i]) ++j;
    if (label[i] != 0) {
      const double d = (s[j].t - s[i].t) * 1000.0;
      const bool keep = label[i] == 1 ? (d > 80.0 && d < 500.0) : (d > 20.0 && d < 70.0);
      if (keep) out.push_back({label[i], i, j, d});
    }
    i = j + 1;
  }
  return out;
}

// Piecewise-constant angular speeds with invalid dropouts. Speeds keep at
// least 5 deg/s away from every threshold.
inline std::vector<wayfarer::gaze::GazeSample> ivt_trace(std::uint64_t seed, std::size_t n = 600, double rate = 200.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double gaze_speeds[] = {2.0, 12.0, 24.0, 35.0, 55.0, 140.0, 320.0};
  const double head_speeds[] = {0.5, 3.0, 5.5, 12.0};

  auto unit = [](Vec3 v) {
    const double n = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
    return Vec3{v.x / n, v.y / n, v.z / n};
  };
  auto cross = [](Vec3 a, Vec3 b) {
    return Vec3{a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
  };
  // Rotates v (unit) by angle about an axis perpendicular to it.
  auto rotate = [&](Vec3 v, Vec3 axis, double deg) {
    const double r = deg * std::numbers::pi / 180.0;
    const Vec3 w = cross(axis, v);
    return unit(Vec3{v.x * std::cos(r) + w.x * std::sin(r), v.y * std::cos(r) + w.y * std::sin(r),
                     v.z * std::cos(r) + w.z * std::sin(r)});
  };
  auto random_axis = [&](Vec3 v) {
    const Vec3 r{u(rng) - 0.5, u(rng) - 0.5, u(rng) - 0.5};
    return unit(cross(v, r));
  };

  std::vector<wayfarer::gaze::GazeSample> out;
  out.reserve(n);
  Vec3 gaze{0, 0, 1}, head{0, 0, 1};
  double vg = 0, vh = 0;
  std::size_t left = 0;
  std::size_t invalid_left = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (left == 0) {
      vg = gaze_speeds[static_cast<std::size_t>(u(rng) * 7)];
      vh = head_speeds[static_cast<std::size_t>(u(rng) * 4)];
      left = 2 + static_cast<std::size_t>(u(rng) * 120);
    }
    --left;
    wayfarer::gaze::GazeSample s;
    s.t = static_cast<double>(i) / rate;
    if (i > 0) {
      gaze = rotate(gaze, random_axis(gaze), vg / rate);
      head = rotate(head, random_axis(head), vh / rate);
    }
    if (invalid_left == 0 && u(rng) < 0.004) invalid_left = 1 + static_cast<std::size_t>(u(rng) * 6);
    if (invalid_left > 0) {
      --invalid_left;
      s.valid = false;
    }
    s.gaze_dir = gaze;
    s.head_dir = head;
    s.pupil_mm = 3.5;
    out.push_back(s);
  }
  return out;
}

// ---------- road snapping ----------

struct Snap {
  Vec3 point;
  std::size_t segment;
  std::size_t contenders;
};

// 1 cm sampling of every centerline, then golden-section refinement around
// the best sample. Tie rule: distances within 0.5 m of the minimum compete on
// the acute angle between the road line and the heading, then on index.
inline Snap snap_fine_grid(const wayfarer::TownLayout& layout, Vec3 p, double yaw) {
  struct Cand {
    Vec3 point;
    double dist;
  };
  std::vector<Cand> per_segment;
  for (const auto& seg : layout.segments) {
    const double len = std::hypot(seg.b.x - seg.a.x, seg.b.z - seg.a.z);
    const auto steps = static_cast<std::size_t>(std::ceil(len / 0.01));
    auto at = [&](double s) { return Vec3{seg.a.x + (seg.b.x - seg.a.x) * s, 0.0, seg.a.z + (seg.b.z - seg.a.z) * s}; };
    auto dist = [&](double s) {
      const Vec3 q = at(s);
      return std::hypot(q.x - p.x, q.z - p.z);
    };
    double best_s = 0.0, best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= steps; ++k) {
      const double s = static_cast<double>(k) / static_cast<double>(steps);
      const double d = dist(s);
      if (d < best_d) {
        best_d = d;
        best_s = s;
      }
    }
    const double h = 1.0 / static_cast<double>(steps);
    double lo = std::max(0.0, best_s - h), hi = std::min(1.0, best_s + h);
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
      if (dist(m1) <= dist(m2)) hi = m2;
      else lo = m1;
    }
    double s = 0.5 * (lo + hi);
    for (double edge : {0.0, 1.0}) {
      if (dist(edge) < dist(s)) s = edge;
    }
    per_segment.push_back({at(s), dist(s)});
  }

  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : per_segment) best = std::min(best, c.dist);
  const Vec3 heading{std::sin(yaw * std::numbers::pi / 180.0), 0.0, std::cos(yaw * std::numbers::pi / 180.0)};
  Snap out{{}, 0, 0};
  double best_angle = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < per_segment.size(); ++i) {
    if (per_segment[i].dist - best >= wayfarer::kSnapTieEpsilon) continue;
    ++out.contenders;
    const auto& seg = layout.segments[i];
    const Vec3 dir{seg.b.x - seg.a.x, 0.0, seg.b.z - seg.a.z};
    const double angle = acos_angle_deg(heading, dir);
    const double acute = std::min(angle, 180.0 - angle);
    if (acute < best_angle - 1e-9) {
      best_angle = acute;
      out.point = per_segment[i].point;
      out.segment = i;
    }
  }
  return out;
}

// ---------- k-NN ----------

// Exhaustive: z-score with training mean and population deviation, all
// distances, full stable sort, then vote with ties to the label met first.
inline std::vector<std::string> knn_brute(const std::vector<std::vector<double>>& train,
                                          const std::vector<std::string>& labels,
                                          const std::vector<std::vector<double>>& queries, int k) {
  const std::size_t w = train.front().size();
  std::vector<double> mean(w, 0.0), sd(w, 0.0);
  for (std::size_t f = 0; f < w; ++f) {
    for (const auto& r : train) mean[f] += r[f];
    mean[f] /= static_cast<double>(train.size());
    for (const auto& r : train) sd[f] += (r[f] - mean[f]) * (r[f] - mean[f]);
    sd[f] = std::sqrt(sd[f] / static_cast<double>(train.size()));
  }
  std::vector<std::string> out;
  for (const auto& q : queries) {
    std::vector<std::pair<double, std::size_t>> d;
    for (std::size_t i = 0; i < train.size(); ++i) {
      double s = 0.0;
      for (std::size_t f = 0; f < w; ++f) {
        if (sd[f] <= 1e-12 * std::max(1.0, std::abs(mean[f]))) continue;
        const double a = (q[f] - mean[f]) / sd[f];
        const double b = (train[i][f] - mean[f]) / sd[f];
        s += (a - b) * (a - b);
      }
      d.emplace_back(s, i);
    }
    std::stable_sort(d.begin(), d.end());
    std::map<std::string, int> votes;
    std::vector<std::string> order;
    const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), d.size());
    for (std::size_t r = 0; r < kk; ++r) {
      const std::string& l = labels[d[r].second];
      if (votes[l]++ == 0) order.push_back(l);
    }
    int top = 0;
    for (const auto& [l, c] : votes) top = std::max(top, c);
    for (const auto& l : order) {
      if (votes[l] == top) {
        out.push_back(l);
        break;
      }
    }
  }
  return out;
}

// ---------- statistics ----------

// Pooled two-sample t statistic.
inline double pooled_t(const std::vector<double>& a, const std::vector<double>& b) {
  auto mean = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  const double ma = mean(a), mb = mean(b);
  double sa = 0, sb = 0;
  for (double x : a) sa += (x - ma) * (x - ma);
  for (double x : b) sb += (x - mb) * (x - mb);
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double sp2 = (sa + sb) / (na + nb - 2.0);
  return (ma - mb) / std::sqrt(sp2 * (1.0 / na + 1.0 / nb));
}

// H as (n - 1) times the between-group share of rank variance, which carries
// the tie correction implicitly.
inline double kruskal_rank_variance(const std::vector<std::vector<double>>& groups) {
  std::vector<double> all;
  for (const auto& g : groups) all.insert(all.end(), g.begin(), g.end());
  auto rank = [&](double x) {
    double below = 0, equal = 0;
    for (double y : all) {
      if (y < x) ++below;
      else if (y == x) ++equal;
    }
    return below + (equal + 1.0) / 2.0;
  };
  const double n = static_cast<double>(all.size());
  const double rbar = (n + 1.0) / 2.0;
  double between = 0, total = 0;
  for (const auto& g : groups) {
    double s = 0;
    for (double x : g) {
      const double r = rank(x);
      s += r;
      total += (r - rbar) * (r - rbar);
    }
    const double m = s / static_cast<double>(g.size());
    between += static_cast<double>(g.size()) * (m - rbar) * (m - rbar);
  }
  return total == 0.0 ? 0.0 : (n - 1.0) * between / total;
}

}  // namespace oracle
