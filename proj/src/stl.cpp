#include "infodelta/stl.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "infodelta/error.hpp"
#include "infodelta/loess.hpp"

namespace infodelta {

namespace {

int next_odd(int v) { return v % 2 == 0 ? v + 1 : v; }

std::vector<double> moving_average(std::span<const double> x, std::size_t len) {
    std::vector<double> out(x.size() - len + 1);
    double acc = 0.0;
    for (std::size_t i = 0; i < len; ++i) acc += x[i];
    out[0] = acc / static_cast<double>(len);
    for (std::size_t i = 1; i < out.size(); ++i) {
        acc += x[i + len - 1] - x[i - 1];
        out[i] = acc / static_cast<double>(len);
    }
    return out;
}

// Loess at every integer position with robustness weights; a position whose
// window carries no weight keeps its raw value.
std::vector<double> smooth(std::span<const double> y, std::size_t window, int degree,
                           std::span<const double> robustness) {
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        auto fit = detail::loess_fit_at(y, static_cast<double>(i), window, degree, robustness);
        out[i] = fit ? *fit : y[i];
    }
    return out;
}

// Smooths each cycle-subseries and extends it by one cycle on both ends, so
// the result holds n + 2 * period values.
std::vector<double> cycle_subseries(std::span<const double> y, std::span<const double> robustness,
                                    int period, int window, int degree) {
    const std::size_t n = y.size();
    const auto p = static_cast<std::size_t>(period);
    std::vector<double> out(n + 2 * p);
    std::vector<double> sub;
    std::vector<double> sub_w;
    for (std::size_t k = 0; k < p; ++k) {
        sub.clear();
        sub_w.clear();
        for (std::size_t i = k; i < n; i += p) {
            sub.push_back(y[i]);
            sub_w.push_back(robustness[i]);
        }
        const std::size_t m = sub.size();
        const std::size_t q = window > 0 ? static_cast<std::size_t>(window) : 10 * m + 1;
        std::vector<double> fitted(m + 2);
        for (std::size_t j = 0; j < m + 2; ++j) {
            const double x = static_cast<double>(j) - 1.0;
            auto fit = detail::loess_fit_at(sub, x, q, degree, sub_w);
            if (fit) {
                fitted[j] = *fit;
            } else if (j >= 1 && j <= m) {
                fitted[j] = sub[j - 1];
            } else {
                fitted[j] = std::nan("");
            }
        }
        if (std::isnan(fitted[0])) fitted[0] = fitted[1];
        if (std::isnan(fitted[m + 1])) fitted[m + 1] = fitted[m];
        for (std::size_t j = 0; j < m + 2; ++j) out[j * p + k] = fitted[j];
    }
    return out;
}

std::vector<double> bisquare_weights(std::span<const double> residual) {
    std::vector<double> abs_r(residual.size());
    std::transform(residual.begin(), residual.end(), abs_r.begin(), [](double r) { return std::abs(r); });
    std::vector<double> sorted = abs_r;
    const std::size_t n = sorted.size();
    std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
    double median = sorted[n / 2];
    if (n % 2 == 0) {
        const double lower = *std::max_element(sorted.begin(), sorted.begin() + n / 2);
        median = 0.5 * (median + lower);
    }
    const double h = 6.0 * median;
    std::vector<double> w(n, 1.0);
    if (!(h > 0.0)) return w;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = abs_r[i] / h;
        if (u <= 0.001) {
            w[i] = 1.0;
        } else if (u <= 0.999) {
            const double t = 1.0 - u * u;
            w[i] = t * t;
        } else {
            w[i] = 0.0;
        }
    }
    return w;
}

void check_config(std::size_t n, const StlConfig& c) {
    if (c.period < 0 || c.period == 1) {
        throw Error(ErrorCode::InvalidPeriod, "period must be 0 (no seasonality) or >= 2, got " +
                                                  std::to_string(c.period));
    }
    if (c.period >= 2 && n < 2 * static_cast<std::size_t>(c.period)) {
        throw Error(ErrorCode::SeriesTooShort, std::to_string(n) + " points cannot hold two cycles of " +
                                                   std::to_string(c.period));
    }
    if (n < 3) throw Error(ErrorCode::SeriesTooShort, "decomposition needs at least 3 points");
    if (c.trend_window < 3) throw Error(ErrorCode::WindowTooSmall, "trend window must be >= 3");
    if (c.seasonal_window != 0 && c.seasonal_window < 3) {
        throw Error(ErrorCode::WindowTooSmall, "seasonal window must be 0 (periodic) or >= 3");
    }
    for (int deg : {c.seasonal_degree, c.trend_degree}) {
        if (deg < 0 || deg > 2) throw Error(ErrorCode::InvalidConfig, "loess degree must be 0, 1 or 2");
    }
    if (c.inner_loops < 1 || c.outer_loops < 0) {
        throw Error(ErrorCode::InvalidConfig, "need inner_loops >= 1 and outer_loops >= 0");
    }
}

}  // namespace

Decomposition stl_decompose(std::span<const double> series, const StlConfig& config) {
    const std::size_t n = series.size();
    check_config(n, config);

    const auto trend_window = static_cast<std::size_t>(next_odd(config.trend_window));
    const int seasonal_window = config.seasonal_window > 0 ? next_odd(config.seasonal_window) : 0;
    const auto low_pass_window =
        static_cast<std::size_t>(next_odd(config.low_pass_window > 0 ? config.low_pass_window
                                                                     : std::max(config.period, 3)));

    Decomposition d;
    d.observed.assign(series.begin(), series.end());
    d.seasonal.assign(n, 0.0);
    d.trend.assign(n, 0.0);
    d.period = config.period;

    std::vector<double> robustness(n, 1.0);
    std::vector<double> work(n);
    const auto p = static_cast<std::size_t>(config.period);

    for (int outer = 0; outer <= config.outer_loops; ++outer) {
        if (config.period == 0) {
            d.trend = smooth(d.observed, trend_window, config.trend_degree, robustness);
        } else {
            for (int inner = 0; inner < config.inner_loops; ++inner) {
                for (std::size_t i = 0; i < n; ++i) work[i] = d.observed[i] - d.trend[i];
                auto cycle = cycle_subseries(work, robustness, config.period, seasonal_window,
                                             config.seasonal_degree);
                auto low = moving_average(cycle, p);
                low = moving_average(low, p);
                low = moving_average(low, 3);
                static const std::vector<double> no_weights;
                low = smooth(low, low_pass_window, 1, no_weights);
                for (std::size_t i = 0; i < n; ++i) d.seasonal[i] = cycle[p + i] - low[i];
                for (std::size_t i = 0; i < n; ++i) work[i] = d.observed[i] - d.seasonal[i];
                d.trend = smooth(work, trend_window, config.trend_degree, robustness);
            }
        }
        if (outer < config.outer_loops) {
            for (std::size_t i = 0; i < n; ++i) work[i] = d.observed[i] - d.seasonal[i] - d.trend[i];
            robustness = bisquare_weights(work);
        }
    }

    d.remainder.resize(n);
    for (std::size_t i = 0; i < n; ++i) d.remainder[i] = d.observed[i] - (d.seasonal[i] + d.trend[i]);
    return d;
}

Decomposition stl_decompose(std::span<const double> series, int period, int trend_window,
                            int inner_loops, int outer_loops) {
    StlConfig config;
    config.period = period;
    config.trend_window = trend_window;
    config.inner_loops = inner_loops;
    config.outer_loops = outer_loops;
    return stl_decompose(series, config);
}

double recomposition_error(const Decomposition& d) {
    double worst = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        worst = std::max(worst, std::abs(d.observed[i] - (d.seasonal[i] + d.trend[i] + d.remainder[i])));
    }
    return worst;
}

}  // namespace infodelta
