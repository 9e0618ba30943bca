#include "wayfarer/savgol.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace wayfarer {
namespace {

// Solves the small dense system m x = rhs in place (partial pivoting).
std::vector<double> solve(std::vector<std::vector<double>> m, std::vector<double> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    }
    std::swap(m[col], m[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = m[r][col] / m[col][col];
      for (std::size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = rhs[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= m[i][c] * x[c];
    x[i] = s / m[i][i];
  }
  return x;
}

}  // namespace

std::vector<double> savgol_weights(int window, int order, int at) {
  if (window < 1 || window % 2 == 0) throw std::invalid_argument("savgol: window must be odd and positive");
  if (order < 0 || order >= window) throw std::invalid_argument("savgol: order must be below window");
  const int half = window / 2;
  const double scale = half > 0 ? static_cast<double>(half) : 1.0;
  const std::size_t terms = static_cast<std::size_t>(order) + 1;

  // Normal equations of the design matrix A[j][k] = (j / scale)^k.
  std::vector<std::vector<double>> ata(terms, std::vector<double>(terms, 0.0));
  for (int j = -half; j <= half; ++j) {
    const double x = j / scale;
    for (std::size_t r = 0; r < terms; ++r) {
      for (std::size_t c = 0; c < terms; ++c) ata[r][c] += std::pow(x, static_cast<double>(r + c));
    }
  }
  std::vector<double> e(terms);
  for (std::size_t k = 0; k < terms; ++k) e[k] = std::pow(at / scale, static_cast<double>(k));
  const std::vector<double> z = solve(std::move(ata), std::move(e));

  std::vector<double> w(static_cast<std::size_t>(window));
  for (int j = -half; j <= half; ++j) {
    const double x = j / scale;
    double s = 0.0;
    for (std::size_t k = 0; k < terms; ++k) s += z[k] * std::pow(x, static_cast<double>(k));
    w[static_cast<std::size_t>(j + half)] = s;
  }
  return w;
}

std::vector<double> savgol_filter(std::span<const double> data, int window, int order) {
  const auto n = static_cast<int>(data.size());
  if (window > n) throw std::invalid_argument("savgol: window longer than data");
  const int half = window / 2;
  std::vector<double> out(data.size());

  auto apply = [&](const std::vector<double>& w, int start) {
    double s = 0.0;
    for (int j = 0; j < window; ++j) s += w[static_cast<std::size_t>(j)] * data[static_cast<std::size_t>(start + j)];
    return s;
  };

  const std::vector<double> center = savgol_weights(window, order, 0);
  for (int i = half; i < n - half; ++i) out[static_cast<std::size_t>(i)] = apply(center, i - half);
  for (int i = 0; i < half && i < n; ++i) {
    out[static_cast<std::size_t>(i)] = apply(savgol_weights(window, order, i - half), 0);
    const int j = n - 1 - i;
    if (j >= n - half) out[static_cast<std::size_t>(j)] = apply(savgol_weights(window, order, half - i), n - window);
  }
  return out;
}

}  // namespace wayfarer
