#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "infodelta/date.hpp"
#include "infodelta/series.hpp"
#include "infodelta/stl.hpp"

namespace infodelta {

enum class AnomalySign { None, Positive, Negative };

std::string_view to_string(AnomalySign sign);

struct AnomalyConfig {
    double alpha = 0.05;
    double max_anoms = 0.10;
    // IQR multiplier as a function of alpha; empty means 0.15 / alpha.
    std::function<double(double)> k_of_alpha;

    double k() const { return k_of_alpha ? k_of_alpha(alpha) : 0.15 / alpha; }
    void validate() const;
};

// Largest number of points that may be flagged in a series of length n.
std::size_t anomaly_cap(double max_anoms, std::size_t n);

struct AnomalyPoint {
    double observed = 0.0;
    double seasonal = 0.0;
    double trend = 0.0;
    double remainder = 0.0;
    double recomposed_l1 = 0.0;
    double recomposed_l2 = 0.0;
    bool is_anomaly = false;
    AnomalySign sign = AnomalySign::None;
    std::optional<std::size_t> severity_rank;  // 1 = furthest beyond its limit
};

struct AnomalyResult {
    double q1 = 0.0;
    double q3 = 0.0;
    double iqr = 0.0;
    double k = 0.0;
    double lower_limit = 0.0;  // L1, remainder scale
    double upper_limit = 0.0;  // L2, remainder scale
    std::size_t cap = 0;
    std::size_t candidates = 0;  // points outside the limits before the cap
    std::vector<Date> dates;     // empty until attached by sign_anomalies
    std::vector<AnomalyPoint> points;

    std::size_t size() const { return points.size(); }
    std::size_t anomaly_count() const;
};

// Empirical quantile, linear interpolation between order statistics at
// h = (n - 1) p + 1 (1-based).
double quantile(std::span<const double> sample, double p);

AnomalyResult detect_anomalies(const Decomposition& decomposition, const AnomalyConfig& config);

// Attaches timestamps and polarity from the delta sign. Anomalies where the
// delta is exactly zero are returned to the regular state.
AnomalyResult sign_anomalies(AnomalyResult result, const DeltaSeries& delta);

}  // namespace infodelta
