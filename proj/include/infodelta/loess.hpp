#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace infodelta {

// Local regression window and polynomial degree. The window is `points` when
// non-zero, otherwise ceil(fraction * n). Weights use the tricube kernel.
struct LoessConfig {
    double fraction = 0.75;
    std::size_t points = 0;
    int degree = 1;

    static LoessConfig with_fraction(double fraction, int degree = 1) { return {fraction, 0, degree}; }
    static LoessConfig with_points(std::size_t points, int degree = 1) { return {0.0, points, degree}; }

    std::size_t window_for(std::size_t n) const;
};

// Smooths values observed at positions 0..n-1, evaluating the local fit at
// every position. Windows are truncated at the boundaries.
std::vector<double> loess_smooth(std::span<const double> values, const LoessConfig& config);

namespace detail {

// Weighted local polynomial fit of `values` (at positions 0..n-1) evaluated at
// `x`, which may lie outside the observed range. Uses the `window` points
// nearest x; when window exceeds n the bandwidth is widened by (window - n) / 2.
// A singular local design falls back to the weighted mean. Returns nullopt
// when every weight in the window is zero.
std::optional<double> loess_fit_at(std::span<const double> values, double x, std::size_t window,
                                   int degree, std::span<const double> robustness = {});

}  // namespace detail

}  // namespace infodelta
