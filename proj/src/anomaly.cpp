#include "infodelta/anomaly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "infodelta/error.hpp"

namespace infodelta {

std::string_view to_string(AnomalySign sign) {
    switch (sign) {
        case AnomalySign::Positive: return "positive";
        case AnomalySign::Negative: return "negative";
        case AnomalySign::None: break;
    }
    return "none";
}

void AnomalyConfig::validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "alpha must lie in (0, 1]");
    }
    if (!(max_anoms > 0.0 && max_anoms <= 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "max_anoms must lie in (0, 1]");
    }
    if (!(k() > 0.0)) throw Error(ErrorCode::InvalidConfig, "k(alpha) must be positive");
}

std::size_t anomaly_cap(double max_anoms, std::size_t n) {
    // 0.1 * 70 evaluates to 7.000000000000001; the slack keeps ceil exact.
    return static_cast<std::size_t>(std::ceil(max_anoms * static_cast<double>(n) - 1e-9));
}

std::size_t AnomalyResult::anomaly_count() const {
    return static_cast<std::size_t>(
        std::count_if(points.begin(), points.end(), [](const auto& p) { return p.is_anomaly; }));
}

double quantile(std::span<const double> sample, double p) {
    if (sample.empty()) throw Error(ErrorCode::EmptySample, "quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidConfig, "quantile probability outside [0, 1]");
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

AnomalyResult detect_anomalies(const Decomposition& decomposition, const AnomalyConfig& config) {
    config.validate();
    const std::size_t n = decomposition.size();
    if (n < 4) throw Error(ErrorCode::SeriesTooShort, "anomaly detection needs at least 4 points");
    if (decomposition.seasonal.size() != n || decomposition.trend.size() != n ||
        decomposition.remainder.size() != n) {
        throw Error(ErrorCode::LengthMismatch, "decomposition components differ in length");
    }

    AnomalyResult r;
    const auto& rem = decomposition.remainder;
    r.q1 = quantile(rem, 0.25);
    r.q3 = quantile(rem, 0.75);
    r.iqr = r.q3 - r.q1;
    r.k = config.k();
    r.lower_limit = r.q1 - r.k * r.iqr;
    r.upper_limit = r.q3 + r.k * r.iqr;
    r.cap = anomaly_cap(config.max_anoms, n);

    r.points.resize(n);
    struct Candidate {
        std::size_t index;
        double excess;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < n; ++i) {
        auto& pt = r.points[i];
        pt.observed = decomposition.observed[i];
        pt.seasonal = decomposition.seasonal[i];
        pt.trend = decomposition.trend[i];
        pt.remainder = rem[i];
        pt.recomposed_l1 = pt.seasonal + pt.trend + r.lower_limit;
        pt.recomposed_l2 = pt.seasonal + pt.trend + r.upper_limit;
        if (rem[i] < r.lower_limit) candidates.push_back({i, r.lower_limit - rem[i]});
        if (rem[i] > r.upper_limit) candidates.push_back({i, rem[i] - r.upper_limit});
    }
    r.candidates = candidates.size();

    // Furthest beyond its limit first; equal excess keeps the earlier point.
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.excess > b.excess; });
    const std::size_t kept = std::min(candidates.size(), r.cap);
    for (std::size_t rank = 0; rank < kept; ++rank) {
        auto& pt = r.points[candidates[rank].index];
        pt.is_anomaly = true;
        pt.severity_rank = rank + 1;
    }
    return r;
}

AnomalyResult sign_anomalies(AnomalyResult result, const DeltaSeries& delta) {
    if (result.size() != delta.size()) {
        throw Error(ErrorCode::TimestampMismatch, "anomaly result has " + std::to_string(result.size()) +
                                                      " points, delta has " + std::to_string(delta.size()));
    }
    auto dates = delta.dates();
    if (!result.dates.empty() && result.dates != dates) {
        throw Error(ErrorCode::TimestampMismatch, "anomaly result and delta cover different dates");
    }
    result.dates = std::move(dates);
    for (std::size_t i = 0; i < result.size(); ++i) {
        auto& pt = result.points[i];
        if (!pt.is_anomaly) {
            pt.sign = AnomalySign::None;
            continue;
        }
        const double d = delta.points[i].delta;
        if (d > 0.0) {
            pt.sign = AnomalySign::Positive;
        } else if (d < 0.0) {
            pt.sign = AnomalySign::Negative;
        } else {
            pt.sign = AnomalySign::None;
            pt.is_anomaly = false;
            pt.severity_rank.reset();
        }
    }
    return result;
}

}  // namespace infodelta
