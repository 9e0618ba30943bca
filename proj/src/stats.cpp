#include "wayfarer/stats.hpp"

#include <algorithm>
#include <numeric>

#include "wayfarer/error.hpp"

namespace wayfarer::stats {

AnovaResult anova_oneway(const std::vector<Group>& groups) {
  if (groups.size() < 2) throw DegenerateGroups("anova: need at least 2 groups");
  double total = 0.0;
  std::size_t n = 0;
  for (const Group& g : groups) {
    if (g.size() < 2) throw DegenerateGroups("anova: each group needs at least 2 values");
    total += std::accumulate(g.begin(), g.end(), 0.0);
    n += g.size();
  }
  const double grand = total / static_cast<double>(n);

  AnovaResult r;
  for (const Group& g : groups) {
    const double m = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
    r.ss_between += static_cast<double>(g.size()) * (m - grand) * (m - grand);
    for (double x : g) r.ss_within += (x - m) * (x - m);
  }
  r.df_between = static_cast<int>(groups.size()) - 1;
  r.df_within = static_cast<int>(n - groups.size());

  const double sst = r.ss_between + r.ss_within;
  const double eps = 1e-12 * std::max(1.0, grand * grand) * static_cast<double>(n);
  if (r.ss_within <= eps) {
    if (r.ss_between <= eps) return r;  // F = 0, eta^2 = 0
    throw DegenerateGroups("anova: zero within-group variance");
  }
  r.F = (r.ss_between / r.df_between) / (r.ss_within / r.df_within);
  r.eta_squared = r.ss_between / sst;
  return r;
}

KruskalResult kruskal_wallis(const std::vector<Group>& groups) {
  if (groups.size() < 2) throw DegenerateGroups("kruskal-wallis: need at least 2 groups");
  std::vector<std::pair<double, std::size_t>> pooled;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) throw DegenerateGroups("kruskal-wallis: empty group");
    for (double x : groups[g]) pooled.emplace_back(x, g);
  }
  const std::size_t n = pooled.size();
  if (n < 3) throw DegenerateGroups("kruskal-wallis: need at least 3 values");
  std::sort(pooled.begin(), pooled.end());

  std::vector<double> rank_sum(groups.size(), 0.0);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && pooled[j].first == pooled[i].first) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) rank_sum[pooled[k].second] += avg;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }

  const double nn = static_cast<double>(n);
  KruskalResult r;
  r.df = static_cast<int>(groups.size()) - 1;
  r.tie_correction = 1.0 - tie_term / (nn * nn * nn - nn);
  if (r.tie_correction <= 0.0) {
    r.tie_correction = 0.0;
    return r;
  }
  double s = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) s += rank_sum[g] * rank_sum[g] / static_cast<double>(groups[g].size());
  const double h = 12.0 / (nn * (nn + 1.0)) * s - 3.0 * (nn + 1.0);
  r.H = std::max(0.0, h / r.tie_correction);
  return r;
}

std::vector<FeatureStats> per_feature_stats(const analytics::Dataset& ds) {
  std::map<std::string, std::vector<std::size_t>> idx;
  for (std::size_t i = 0; i < ds.labels.size(); ++i) idx[ds.labels[i]].push_back(i);

  std::vector<FeatureStats> out;
  for (std::size_t f = 0; f < ds.width(); ++f) {
    std::vector<Group> groups;
    for (const auto& [label, rows] : idx) {
      Group g;
      for (std::size_t i : rows) g.push_back(ds.matrix[i][f]);
      groups.push_back(std::move(g));
    }
    FeatureStats fs;
    fs.feature = ds.feature_names[f];
    try {
      fs.anova = anova_oneway(groups);
    } catch (const DegenerateGroups&) {
      fs.anova_defined = false;
    }
    fs.kruskal = kruskal_wallis(groups);
    out.push_back(std::move(fs));
  }
  return out;
}

}  // namespace wayfarer::stats
