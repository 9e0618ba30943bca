#pragma once

#include <map>
#include <string>
#include <vector>

#include "wayfarer/analytics.hpp"

namespace wayfarer::stats {

using Group = std::vector<double>;

struct AnovaResult {
  double F = 0.0;
  double ss_between = 0.0;
  double ss_within = 0.0;
  double eta_squared = 0.0;
  int df_between = 0;
  int df_within = 0;
};

struct KruskalResult {
  double H = 0.0;
  int df = 0;
  double tie_correction = 1.0;
};

// Needs >= 2 groups of >= 2 values. Zero within-group variance with nonzero
// between-group variance throws DegenerateGroups; all-equal data gives F = 0.
AnovaResult anova_oneway(const std::vector<Group>& groups);

// Average ranks for ties, tie-corrected. All-equal data gives H = 0.
KruskalResult kruskal_wallis(const std::vector<Group>& groups);

struct FeatureStats {
  std::string feature;
  AnovaResult anova;
  KruskalResult kruskal;
  bool anova_defined = true;
};

// Groups each column by label (sorted label order) and tests it.
std::vector<FeatureStats> per_feature_stats(const analytics::Dataset& ds);

}  // namespace wayfarer::stats
