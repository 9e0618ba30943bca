#pragma once

#include <span>
#include <vector>

namespace wayfarer {

// Weights of the least-squares polynomial fit of degree `order` over a
// window of `window` equally spaced samples, evaluated at offset `at`
// (relative to the window center, in samples).
std::vector<double> savgol_weights(int window, int order, int at = 0);

// Savitzky-Golay smoothing. Interior points use the centered window; the
// first and last half-window are evaluated on the fit of the outermost
// full window, so polynomials of degree <= order pass through unchanged.
// `window` must be odd, greater than `order`, and at most data.size().
std::vector<double> savgol_filter(std::span<const double> data, int window, int order);

}  // namespace wayfarer
