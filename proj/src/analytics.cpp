#include "wayfarer/analytics.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "wayfarer/error.hpp"

namespace wayfarer::analytics {
namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto comma = line.find(',');
    out.push_back(line.substr(0, comma));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return out;
}

// Indices grouped by label, labels in sorted order.
std::map<std::string, std::vector<std::size_t>> by_class(std::span<const std::string> labels) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
  return groups;
}

}  // namespace

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.feature_names = feature_names;
  out.matrix.reserve(indices.size());
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) {
    out.matrix.push_back(matrix.at(i));
    out.labels.push_back(labels.at(i));
  }
  return out;
}

void Dataset::validate(bool techniques_only) const {
  if (matrix.size() != labels.size()) throw ValidationError("dataset: row and label counts differ");
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    if (matrix[i].size() != feature_names.size()) {
      throw ValidationError(fmt::format("dataset row {}: expected {} values", i, feature_names.size()));
    }
    for (double v : matrix[i]) {
      if (!std::isfinite(v)) throw ValidationError(fmt::format("dataset row {}: non-finite value", i));
    }
    if (techniques_only && labels[i] != "teleport" && labels[i] != "steering" && labels[i] != "llm") {
      throw ValidationError(fmt::format("dataset row {}: unknown label '{}'", i, labels[i]));
    }
  }
}

Dataset parse_feature_matrix(std::string_view text) {
  Dataset ds;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  std::size_t label_col = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (!header) {
      auto it = std::find(fields.begin(), fields.end(), "label");
      if (it == fields.end()) throw ParseError("feature matrix: header lacks a 'label' column");
      label_col = static_cast<std::size_t>(it - fields.begin());
      for (std::size_t c = 0; c < fields.size(); ++c) {
        if (c != label_col) ds.feature_names.emplace_back(fields[c]);
      }
      header = true;
      continue;
    }
    if (fields.size() != ds.feature_names.size() + 1) {
      throw ParseError(fmt::format("feature matrix line {}: expected {} fields", line_no, ds.feature_names.size() + 1));
    }
    Row row;
    row.reserve(ds.feature_names.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (c == label_col) continue;
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(fields[c].data(), fields[c].data() + fields[c].size(), v);
      if (ec != std::errc() || ptr != fields[c].data() + fields[c].size()) {
        throw ParseError(fmt::format("feature matrix line {}: bad number '{}'", line_no, fields[c]));
      }
      row.push_back(v);
    }
    ds.matrix.push_back(std::move(row));
    ds.labels.emplace_back(fields[label_col]);
  }
  if (!header) throw ParseError("feature matrix: empty input");
  ds.validate();
  return ds;
}

Dataset read_feature_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open feature matrix " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_feature_matrix(buf.str());
}

std::size_t Rng::below(std::size_t n) {
  // Rejection sampling removes modulo bias.
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ a) ^ b);
}

Split stratified_split(const Dataset& ds, const SplitSpec& spec) {
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
    throw ValidationError("split: test_fraction must lie in (0, 1)");
  }
  Split split;
  Rng rng(spec.seed);
  auto take = [&](std::vector<std::size_t> idx) {
    const auto n = idx.size();
    auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * spec.test_fraction));
    n_test = std::clamp<std::size_t>(n_test, 1, n - 1);
    rng.shuffle(idx);
    split.test.insert(split.test.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
    split.train.insert(split.train.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
  };

  if (spec.stratified) {
    for (auto& [label, idx] : by_class(ds.labels)) {
      if (idx.size() < 2) throw TooFewRows("split: class '" + label + "' has fewer than 2 rows");
      take(idx);
    }
  } else {
    if (ds.rows() < 2) throw TooFewRows("split: fewer than 2 rows");
    std::vector<std::size_t> all(ds.rows());
    std::iota(all.begin(), all.end(), 0);
    take(all);
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

double accuracy(std::span<const std::string> truth, std::span<const std::string> predicted) {
  if (truth.size() != predicted.size()) throw ValidationError("accuracy: length mismatch");
  if (truth.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += truth[i] == predicted[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

std::string majority_label(std::span<const std::string> labels) {
  if (labels.empty()) throw TooFewRows("majority: no labels");
  std::map<std::string, std::size_t> counts;
  for (const auto& l : labels) ++counts[l];
  // Ties resolve to the lexicographically smallest label (map order).
  auto best = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

double majority_baseline(std::span<const std::string> train_labels, std::span<const std::string> test_labels) {
  if (test_labels.empty()) throw TooFewRows("majority baseline: empty test set");
  const std::string guess = majority_label(train_labels);
  const auto hits = std::count(test_labels.begin(), test_labels.end(), guess);
  return static_cast<double>(hits) / static_cast<double>(test_labels.size());
}

KnnClassifier::KnnClassifier(int k) : k_(k) {
  if (k <= 0 || k % 2 == 0) throw ValidationError("knn: k must be odd and positive");
}

void KnnClassifier::fit(const Matrix& x, std::vector<std::string> y) {
  if (x.empty()) throw TooFewRows("knn: empty training set");
  if (x.size() != y.size()) throw ValidationError("knn: row and label counts differ");
  const std::size_t width = x.front().size();
  const auto n = static_cast<double>(x.size());

  kept_.clear();
  dropped_.clear();
  mean_.clear();
  scale_.clear();
  for (std::size_t f = 0; f < width; ++f) {
    double m = 0.0;
    for (const Row& r : x) m += r[f];
    m /= n;
    double ss = 0.0;
    for (const Row& r : x) ss += (r[f] - m) * (r[f] - m);
    const double sd = std::sqrt(ss / n);
    if (sd > 1e-12 * std::max(1.0, std::abs(m))) {
      kept_.push_back(f);
      mean_.push_back(m);
      scale_.push_back(sd);
    } else {
      dropped_.push_back(f);
    }
  }
  train_.clear();
  train_.reserve(x.size());
  for (const Row& r : x) train_.push_back(transform(r));
  labels_ = std::move(y);
}

Row KnnClassifier::transform(const Row& x) const {
  Row z(kept_.size());
  for (std::size_t i = 0; i < kept_.size(); ++i) z[i] = (x[kept_[i]] - mean_[i]) / scale_[i];
  return z;
}

std::string KnnClassifier::predict(const Row& x) const {
  if (train_.empty()) throw ValidationError("knn: predict before fit");
  const Row z = transform(x);
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(train_.size());
  for (std::size_t i = 0; i < train_.size(); ++i) {
    double d = 0.0;
    for (std::size_t f = 0; f < z.size(); ++f) {
      const double diff = z[f] - train_[i][f];
      d += diff * diff;
    }
    dist.emplace_back(d, i);
  }
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(k_), dist.size());
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());

  // votes[label] = (count, rank of the label's nearest member)
  std::map<std::string, std::pair<std::size_t, std::size_t>> votes;
  for (std::size_t r = 0; r < k; ++r) {
    auto [it, inserted] = votes.try_emplace(labels_[dist[r].second], 0, r);
    ++it->second.first;
  }
  auto best = votes.begin();
  for (auto it = votes.begin(); it != votes.end(); ++it) {
    const auto [count, rank] = it->second;
    if (count > best->second.first || (count == best->second.first && rank < best->second.second)) best = it;
  }
  return best->first;
}

std::vector<std::string> KnnClassifier::predict(const Matrix& x) const {
  std::vector<std::string> out;
  out.reserve(x.size());
  for (const Row& r : x) out.push_back(predict(r));
  return out;
}

KnnResult knn_fit_predict(const Dataset& train, const Dataset& test, const ClassifierConfig& cfg) {
  KnnClassifier model(cfg.k);
  model.fit(train.matrix, train.labels);
  for (std::size_t f : model.dropped_features()) {
    const std::string name = f < train.feature_names.size() ? train.feature_names[f] : std::to_string(f);
    std::clog << "knn: dropping zero-variance feature " << name << '\n';
  }
  KnnResult out;
  out.predictions = model.predict(test.matrix);
  out.accuracy = accuracy(test.labels, out.predictions);
  out.dropped_features = model.dropped_features();
  return out;
}

std::vector<int> stratified_folds(std::span<const std::string> labels, int folds, std::uint64_t seed) {
  if (folds < 2) throw ValidationError("cross-validation: need at least 2 folds");
  std::vector<int> fold(labels.size(), 0);
  Rng rng(seed);
  std::size_t offset = 0;
  for (auto& [label, idx] : by_class(labels)) {
    if (idx.size() < static_cast<std::size_t>(folds)) {
      throw TooFewRows(fmt::format("cross-validation: class '{}' has {} rows, need {}", label, idx.size(), folds));
    }
    rng.shuffle(idx);
    for (std::size_t p = 0; p < idx.size(); ++p) {
      fold[idx[p]] = static_cast<int>((offset + p) % static_cast<std::size_t>(folds));
    }
    offset += idx.size();
  }
  return fold;
}

CrossValidation cross_validate(const Dataset& train, const ClassifierConfig& cfg) {
  const std::vector<int> fold = stratified_folds(train.labels, cfg.folds, cfg.seed);
  CrossValidation cv;
  for (int k : cfg.candidate_ks) {
    KnnClassifier model(k);
    std::vector<double>& accs = cv.fold_accuracies[k];
    for (int f = 0; f < cfg.folds; ++f) {
      std::vector<std::size_t> tr, va;
      for (std::size_t i = 0; i < fold.size(); ++i) (fold[i] == f ? va : tr).push_back(i);
      const Dataset dtr = train.subset(tr);
      const Dataset dva = train.subset(va);
      model.fit(dtr.matrix, dtr.labels);
      accs.push_back(accuracy(dva.labels, model.predict(dva.matrix)));
    }
    cv.mean_accuracy[k] = std::accumulate(accs.begin(), accs.end(), 0.0) / static_cast<double>(accs.size());
  }
  double best = -1.0;
  std::vector<int> ks = cfg.candidate_ks;
  std::sort(ks.begin(), ks.end());
  for (int k : ks) {
    if (cv.mean_accuracy[k] > best + 1e-12) {
      best = cv.mean_accuracy[k];
      cv.best_k = k;
    }
  }
  return cv;
}

}  // namespace wayfarer::analytics
