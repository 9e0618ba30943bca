#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wayfarer::analytics {

using Row = std::vector<double>;
using Matrix = std::vector<Row>;

struct Dataset {
  Matrix matrix;
  std::vector<std::string> labels;
  std::vector<std::string> feature_names;

  std::size_t rows() const { return matrix.size(); }
  std::size_t width() const { return feature_names.size(); }
  Dataset subset(std::span<const std::size_t> indices) const;
  // Row widths, finiteness, label count. With `techniques_only`, labels must
  // be one of teleport / steering / llm.
  void validate(bool techniques_only = false) const;
};

Dataset parse_feature_matrix(std::string_view text);
Dataset read_feature_matrix(const std::filesystem::path& path);

// Deterministic generator. mt19937_64 is fully specified by the standard; the
// bounded draw and shuffle are implemented here so results do not depend on
// the standard library's distribution code.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  std::size_t below(std::size_t n);
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

// Mixes several integers into one seed (SplitMix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

struct SplitSpec {
  double test_fraction = 0.2;
  std::uint64_t seed = 42;
  bool stratified = true;
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Per-class proportional split (each class keeps at least one row on each side).
Split stratified_split(const Dataset& ds, const SplitSpec& spec);

double accuracy(std::span<const std::string> truth, std::span<const std::string> predicted);

std::string majority_label(std::span<const std::string> labels);
double majority_baseline(std::span<const std::string> train_labels, std::span<const std::string> test_labels);

struct ClassifierConfig {
  int k = 5;
  std::vector<int> candidate_ks = {3, 5, 7, 9};
  int folds = 5;
  std::uint64_t seed = 42;
};

// Euclidean k-NN on features z-scored with training statistics. Features with
// zero training variance are dropped. Vote ties go to the tied label whose
// closest member ranks nearest.
class KnnClassifier {
 public:
  explicit KnnClassifier(int k = 5);

  void fit(const Matrix& x, std::vector<std::string> y);
  std::string predict(const Row& x) const;
  std::vector<std::string> predict(const Matrix& x) const;

  int k() const { return k_; }
  const std::vector<std::size_t>& dropped_features() const { return dropped_; }

 private:
  Row transform(const Row& x) const;

  int k_;
  std::vector<std::size_t> kept_;
  std::vector<std::size_t> dropped_;
  Row mean_;
  Row scale_;
  Matrix train_;
  std::vector<std::string> labels_;
};

struct KnnResult {
  std::vector<std::string> predictions;
  double accuracy = 0.0;
  std::vector<std::size_t> dropped_features;
};

KnnResult knn_fit_predict(const Dataset& train, const Dataset& test, const ClassifierConfig& cfg);

struct CrossValidation {
  int best_k = 0;
  std::map<int, std::vector<double>> fold_accuracies;
  std::map<int, double> mean_accuracy;
};

// Stratified k-fold assignment: fold index per row.
std::vector<int> stratified_folds(std::span<const std::string> labels, int folds, std::uint64_t seed);

CrossValidation cross_validate(const Dataset& train, const ClassifierConfig& cfg);

struct Importance {
  std::size_t feature = 0;
  std::string name;
  double mean_drop = 0.0;
  double std_drop = 0.0;
};

// Mean accuracy drop when one column of `test` is shuffled, over `repeats`
// seeded shuffles per feature; sorted by descending drop, ties by column.
template <typename Model>
std::vector<Importance> permutation_importance(const Model& model, const Dataset& test, int repeats = 30,
                                               std::uint64_t seed = 42) {
  const double base = accuracy(test.labels, model.predict(test.matrix));
  std::vector<Importance> out;
  for (std::size_t f = 0; f < test.width(); ++f) {
    std::vector<double> drops;
    drops.reserve(static_cast<std::size_t>(repeats));
    Matrix shuffled = test.matrix;
    for (int r = 0; r < repeats; ++r) {
      std::vector<double> column;
      column.reserve(test.rows());
      for (const Row& row : test.matrix) column.push_back(row[f]);
      Rng rng(derive_seed(seed, f, static_cast<std::uint64_t>(r)));
      rng.shuffle(column);
      for (std::size_t i = 0; i < shuffled.size(); ++i) shuffled[i][f] = column[i];
      drops.push_back(base - accuracy(test.labels, model.predict(shuffled)));
    }
    double mean = 0.0;
    for (double d : drops) mean += d;
    mean /= static_cast<double>(drops.size());
    double var = 0.0;
    for (double d : drops) var += (d - mean) * (d - mean);
    const std::string name = f < test.feature_names.size() ? test.feature_names[f] : std::to_string(f);
    out.push_back({f, name, mean, std::sqrt(var / static_cast<double>(drops.size()))});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Importance& a, const Importance& b) { return a.mean_drop > b.mean_drop; });
  return out;
}

}  // namespace wayfarer::analytics
