#include "infodelta/loess.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "infodelta/error.hpp"

namespace infodelta {

std::size_t LoessConfig::window_for(std::size_t n) const {
    if (points > 0) return points;
    if (!(fraction > 0.0)) {
        throw Error(ErrorCode::InvalidConfig, "loess span fraction must be positive");
    }
    return static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
}

namespace detail {

namespace {

double tricube(double u) {
    if (u >= 1.0) return 0.0;
    const double t = 1.0 - u * u * u;
    return t * t * t;
}

// Solves the (degree+1)-square normal equations in place; returns false when
// a pivot collapses relative to the matrix scale.
bool solve_normal(std::array<std::array<double, 3>, 3>& a, std::array<double, 3>& b, int dim) {
    double scale = 0.0;
    for (int i = 0; i < dim; ++i) scale = std::max(scale, std::abs(a[i][i]));
    if (!(scale > 0.0)) return false;
    for (int col = 0; col < dim; ++col) {
        int pivot = col;
        for (int r = col + 1; r < dim; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        if (std::abs(a[pivot][col]) <= 1e-10 * scale) return false;
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        for (int r = col + 1; r < dim; ++r) {
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < dim; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    for (int r = dim - 1; r >= 0; --r) {
        double acc = b[r];
        for (int c = r + 1; c < dim; ++c) acc -= a[r][c] * b[c];
        b[r] = acc / a[r][r];
    }
    return true;
}

}  // namespace

std::optional<double> loess_fit_at(std::span<const double> values, double x, std::size_t window,
                                   int degree, std::span<const double> robustness) {
    const auto n = static_cast<long>(values.size());
    if (n == 0 || window == 0) return std::nullopt;
    const auto q = static_cast<long>(window);

    long left = 0;
    long right = n - 1;
    if (q < n) {
        left = static_cast<long>(std::floor(x)) - (q - 1) / 2;
        left = std::clamp(left, 0L, n - q);
        right = left + q - 1;
    }
    double h = std::max(x - static_cast<double>(left), static_cast<double>(right) - x);
    if (q > n) h += static_cast<double>((q - n) / 2);
    if (!(h > 0.0)) h = 1.0;

    const int dim = degree + 1;
    std::array<std::array<double, 3>, 3> a{};
    std::array<double, 3> b{};
    double wsum = 0.0;
    double wysum = 0.0;
    for (long j = left; j <= right; ++j) {
        const double u = (static_cast<double>(j) - x) / h;
        double w = tricube(std::abs(u));
        if (!robustness.empty()) w *= robustness[static_cast<std::size_t>(j)];
        if (w <= 0.0) continue;
        const double y = values[static_cast<std::size_t>(j)];
        wsum += w;
        wysum += w * y;
        std::array<double, 5> pw{1.0, u, u * u, u * u * u, u * u * u * u};
        for (int r = 0; r < dim; ++r) {
            for (int c = 0; c < dim; ++c) a[r][c] += w * pw[r + c];
            b[r] += w * pw[r] * y;
        }
    }
    if (!(wsum > 0.0)) return std::nullopt;
    if (degree == 0 || !solve_normal(a, b, dim)) return wysum / wsum;
    return b[0];
}

}  // namespace detail

std::vector<double> loess_smooth(std::span<const double> values, const LoessConfig& config) {
    if (config.degree < 0 || config.degree > 2) {
        throw Error(ErrorCode::InvalidConfig, "loess degree must be 0, 1 or 2");
    }
    const std::size_t n = values.size();
    const std::size_t min_points = static_cast<std::size_t>(config.degree) + 2;
    const std::size_t window = config.window_for(n);
    if (window < min_points || n < min_points) {
        throw Error(ErrorCode::WindowTooSmall, "loess window of " + std::to_string(window) + " over " +
                                                   std::to_string(n) + " points; need at least " +
                                                   std::to_string(min_points));
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        // The point at x always carries weight 1, so a fit always exists.
        out[i] = *detail::loess_fit_at(values, static_cast<double>(i), window, config.degree);
    }
    return out;
}

}  // namespace infodelta
