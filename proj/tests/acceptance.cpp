// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "infodelta/analytics.hpp"
#include "infodelta/anomaly.hpp"
#include "infodelta/loess.hpp"
#include "infodelta/regimes.hpp"
#include "infodelta/series.hpp"
#include "infodelta/stl.hpp"
#include "infodelta/synth.hpp"
#include "oracles.hpp"

using namespace infodelta;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
    fmt::print("[{}] criterion {:>2}: {} ({})\n", ok ? "PASS" : "FAIL", id, name, detail);
    if (!ok) ++failures;
}

void sub(const std::string& name, bool ok, const std::string& detail) {
    fmt::print("         {} {}: {}\n", ok ? "ok  " : "FAIL", name, detail);
}

TimeSeries make_series(const std::vector<double>& values, Role role = Role::Supply,
                       Resolution resolution = Resolution::Daily, Date start = make_date(2020, 1, 1)) {
    TimeSeries s;
    s.id = role == Role::Supply ? "supply" : "demand";
    s.role = role;
    s.resolution = resolution;
    for (std::size_t i = 0; i < values.size(); ++i) {
        s.points.push_back({start + std::chrono::days{static_cast<long>(i) * step_days(resolution)}, values[i]});
    }
    return s;
}

std::vector<double> random_counts(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> level(1.0, 1000.0);
    std::normal_distribution<double> noise(0.0, 1.0);
    const double mean = level(rng);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double seasonal = 0.2 * mean * std::sin(2.0 * M_PI * static_cast<double>(i) / 7.0);
        v[i] = std::max(0.0, mean + seasonal + 0.1 * mean * noise(rng));
    }
    return v;
}

double worst_recomposition = 0.0;

bool recomposes(const Decomposition& d) {
    double scale = 0.0;
    for (double v : d.observed) scale = std::max(scale, std::abs(v));
    double err = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        err = std::max(err, std::abs(d.observed[i] - (d.seasonal[i] + d.trend[i] + d.remainder[i])));
    }
    worst_recomposition = std::max(worst_recomposition, err / (1.0 + scale));
    return err <= 1e-9 * (1.0 + scale);
}

void criterion_benchmark() {
    SynthConfig config;
    const auto t0 = std::chrono::steady_clock::now();
    const auto bench = run_benchmark(config);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    fmt::print("         sigma  precision  recall     f1\n");
    for (const auto& row : bench.rows) {
        fmt::print("         {:5.1f}  {:9.3f}  {:6.3f}  {:6.3f}\n", row.sigma, row.mean_precision, row.mean_recall,
                   row.mean_f1);
    }

    bool low = true, at6 = true, high = true, f8 = true, plateau = true;
    double max_low = 0.0, min_high = 1.0, max_high = 0.0, f1_8 = 0.0, f1_min = 1.0, f1_max = 0.0, p6 = 0.0;
    for (const auto& row : bench.rows) {
        if (row.sigma <= 2.0) {
            max_low = std::max(max_low, row.mean_precision);
            low = low && row.mean_precision <= 0.05;
        }
        if (row.sigma == 6.0) {
            p6 = row.mean_precision;
            at6 = row.mean_precision >= 0.8;
        }
        if (row.sigma >= 7.0) {
            min_high = std::min(min_high, row.mean_precision);
            max_high = std::max(max_high, row.mean_precision);
            high = high && std::abs(row.mean_precision - 1.0) <= 0.05;
        }
        if (row.sigma == 8.0) {
            f1_8 = row.mean_f1;
            f8 = row.mean_f1 >= 0.5;
        }
        if (row.sigma >= 9.0) {
            f1_min = std::min(f1_min, row.mean_f1);
            f1_max = std::max(f1_max, row.mean_f1);
            plateau = plateau && row.mean_f1 >= 0.58 && row.mean_f1 <= 0.80;
        }
    }
    const bool fast = seconds < 300.0;
    sub("precision <= 0.05 for sigma <= 2", low, fmt::format("max {:.3f}", max_low));
    sub("precision >= 0.8 at sigma 6", at6, fmt::format("{:.3f}", p6));
    sub("precision 1 +/- 0.05 for sigma >= 7", high, fmt::format("range [{:.3f}, {:.3f}]", min_high, max_high));
    sub("F1 >= 0.5 at sigma 8", f8, fmt::format("{:.3f}", f1_8));
    sub("F1 in [0.58, 0.80] for sigma >= 9", plateau, fmt::format("range [{:.3f}, {:.3f}]", f1_min, f1_max));
    sub("runtime < 300 s", fast, fmt::format("{:.2f} s", seconds));
    if (!plateau) {
        fmt::print(
            "         deviation: with supply-only injection into {}-day series the cap ({}) exceeds the {} "
            "injections, so recall climbs toward 1 instead of levelling off; a flat F1 of about 0.59-0.71 "
            "appears only when spikes hit both series at shared timestamps (benchmark --target both)\n",
            config.series_length, anomaly_cap(config.anomaly.max_anoms, config.series_length),
            config.injection_count);
    }
    report(1, "synthetic benchmark precision/F1 curve", low && at6 && high && f8 && plateau && fast,
           fmt::format("{} sigmas x {} reps", bench.rows.size(), config.repetitions));
}

void criterion_recomposition() {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> len(14, 700);
    std::size_t count = 0;
    bool ok = true;
    const std::vector<StlConfig> configs = [] {
        std::vector<StlConfig> out;
        StlConfig c;
        out.push_back(c);
        c.outer_loops = 15;
        out.push_back(c);
        c = {};
        c.period = 0;
        c.trend_window = 13;
        out.push_back(c);
        c = {};
        c.seasonal_window = 7;
        c.trend_window = 21;
        out.push_back(c);
        c = {};
        c.period = 12;
        c.trend_window = 35;
        c.seasonal_degree = 0;
        out.push_back(c);
        return out;
    }();
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<double> v = random_counts(rng, static_cast<std::size_t>(len(rng)));
        if (trial % 3 == 0) {
            for (auto& x : v) x *= 1e6;
        }
        for (const auto& c : configs) {
            if (v.size() < static_cast<std::size_t>(2 * std::max(c.period, 2))) continue;
            ok = recomposes(stl_decompose(v, c)) && ok;
            ++count;
        }
    }
    report(2, "STL recomposition identity", ok,
           fmt::format("{} decompositions, worst error/(1+max|obs|) = {:.2e}", count, worst_recomposition));
}

void criterion_cap() {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::size_t> len(20, 600);
    std::uniform_real_distribution<double> mag(0.0, 40.0);
    std::uniform_int_distribution<int> target(0, 2);
    bool ok = true;
    std::size_t worst_ratio_num = 0, worst_ratio_den = 1;
    for (std::size_t run = 0; run < 1000; ++run) {
        SynthConfig config;
        config.series_length = len(rng);
        config.injection_count = std::min<std::size_t>(config.series_length / 2, 1 + rng() % 80);
        config.injection_target = static_cast<InjectionTarget>(target(rng));
        config.rng_seed = rng();
        const auto r = run_single(config, mag(rng), run);
        const std::size_t t = config.series_length;
        const std::size_t limit = (t + 9) / 10;
        ok = ok && r.score.n_detected <= limit;
        if (r.score.n_detected * worst_ratio_den > worst_ratio_num * t) {
            worst_ratio_num = r.score.n_detected;
            worst_ratio_den = t;
        }
    }
    report(3, "anomaly cap on random synthetic runs", ok,
           fmt::format("1000 runs, highest flagged share {}/{}", worst_ratio_num, worst_ratio_den));
}

void criterion_zero_delta() {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<std::size_t> len(14, 600);
    bool ok = true;
    std::size_t points = 0;
    for (int trial = 0; trial < 200; ++trial) {
        auto values = random_counts(rng, len(rng));
        const auto supply = make_series(values, Role::Supply);
        const auto demand = make_series(values, Role::Demand);
        const auto delta = compute_delta(rescale(supply), rescale(demand));
        const auto d = stl_decompose(delta.deltas(), StlConfig{});
        ok = recomposes(d) && ok;
        const auto anomalies = sign_anomalies(detect_anomalies(d, {}), delta);
        const auto labels = classify_regimes(delta, anomalies);
        ok = ok && anomalies.anomaly_count() == 0 && labels.size() == values.size();
        for (const auto& l : labels) ok = ok && l.regime == Regime::Balance;
        points += labels.size();
    }
    report(4, "identical inputs give no anomalies and all Balance", ok, fmt::format("200 pairs, {} points", points));
}

void criterion_rescale() {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::size_t> len(2, 800);
    std::uniform_real_distribution<double> log_c(-6.0, 6.0);
    double worst_mean = 0.0, worst_scale = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const auto values = random_counts(rng, len(rng));
        if (std::accumulate(values.begin(), values.end(), 0.0) == 0.0) continue;
        const auto r = rescale(make_series(values));
        long double sum = 0;
        for (const auto& p : r.points) sum += p.value;
        worst_mean = std::max(worst_mean, std::abs(static_cast<double>(sum / r.size()) - 1.0));

        const double c = std::pow(10.0, log_c(rng));
        std::vector<double> scaled(values);
        for (auto& v : scaled) v *= c;
        const auto rc = rescale(make_series(scaled));
        for (std::size_t i = 0; i < r.size(); ++i) {
            worst_scale = std::max(worst_scale, std::abs(rc.points[i].value - r.points[i].value) /
                                                    std::max(1.0, std::abs(r.points[i].value)));
        }
    }
    const bool ok = worst_mean <= 1e-12 && worst_scale <= 1e-12;
    report(5, "rescaled mean is 1 and scale invariant", ok,
           fmt::format("500 series, worst |mean-1| = {:.1e}, worst scale drift = {:.1e}", worst_mean, worst_scale));
}

Date day(int n) { return make_date(2021, 1, 1) + std::chrono::days{n - 1}; }

std::vector<RegimeLabel> negative_days(int length, std::set<int> neg) {
    std::vector<RegimeLabel> out;
    for (int d = 1; d <= length; ++d) {
        RegimeLabel l;
        l.date = day(d);
        if (neg.count(d)) {
            l.macro_state = MacroState::Anomaly;
            l.regime = Regime::Void;
            l.delta = -2.0;
        }
        out.push_back(l);
    }
    return out;
}

void criterion_persistence() {
    const auto a = persistence_runs(negative_days(10, {1, 2, 3}), 2);
    const bool c1 = a.size() == 1 && a[0].length == 3 && a[0].start == day(1) && a[0].end == day(3) &&
                    a[0].bridged_gaps == 0 && a[0].sign == AnomalySign::Negative;
    const auto b = persistence_runs(negative_days(10, {1, 2, 5}), 2);
    const bool c2 = b.size() == 1 && b[0].length == 5 && b[0].bridged_gaps == 2 && b[0].end == day(5);
    const auto c = persistence_runs(negative_days(10, {1, 5}), 2);
    const bool c3 = c.size() == 2 && c[0].length == 1 && c[1].length == 1 && c[1].start == day(5);
    report(6, "persistence runs", c1 && c2 && c3,
           fmt::format("contiguous {}, bridged gap {}, split {}", c1 ? "ok" : "wrong", c2 ? "ok" : "wrong",
                       c3 ? "ok" : "wrong"));
}

void criterion_partition() {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> len(1, 300);
    std::uniform_int_distribution<int> kind(0, 9);
    std::normal_distribution<double> noise(0.0, 1.0);
    bool ok = true;
    std::size_t points = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = len(rng);
        DeltaSeries delta;
        AnomalyResult flags;
        flags.points.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            double v = noise(rng);
            const int k = kind(rng);
            if (k == 0) v = 0.0;
            if (k == 1) v = 0.5;
            if (k == 2) v = -0.5;
            const bool anomalous = k >= 7 && v != 0.0;
            delta.points.push_back({day(static_cast<int>(i) + 1), v, 0.0, 0.0});
            flags.points[i].is_anomaly = anomalous;
        }
        const auto labels = classify_regimes(delta, flags, 0.5);
        ok = ok && labels.size() == n;
        for (std::size_t i = 0; i < n && ok; ++i) {
            const double v = delta.points[i].delta;
            const bool an = flags.points[i].is_anomaly;
            const Regime r = labels[i].regime;
            int hits = 0;
            for (Regime g : {Regime::Void, Regime::Lack, Regime::Balance, Regime::Abundance, Regime::Overabundance}) {
                hits += r == g;
            }
            ok = hits == 1 && labels[i].date == delta.points[i].date;
            ok = ok && ((r == Regime::Void) == (an && v < 0.0));
            ok = ok && ((r == Regime::Overabundance) == (an && v > 0.0));
            if (!an) {
                const Regime want = v < -0.5 ? Regime::Lack : v > 0.5 ? Regime::Abundance : Regime::Balance;
                ok = ok && r == want;
            }
        }
        points += n;
    }
    report(7, "regime partition", ok, fmt::format("500 random series, {} labels", points));
}

void criterion_metrics() {
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> pick(0, 59);
    std::uniform_int_distribution<int> size(0, 25);
    bool ok = true;
    for (int trial = 0; trial < 1000; ++trial) {
        std::set<Date> detected, truth_dates;
        GroundTruth truth;
        for (int k = size(rng); k > 0; --k) detected.insert(day(1 + pick(rng)));
        for (int k = 1 + size(rng); k > 0; --k) truth_dates.insert(day(1 + pick(rng)));
        for (Date d : truth_dates) truth.injected.push_back({d, AnomalySign::Positive});
        const auto s = score_detection(detected, truth);
        const auto o = oracle::detection_scores(detected, truth_dates);
        ok = ok && std::abs(s.precision - o.precision) <= 1e-15 && std::abs(s.recall - o.recall) <= 1e-15 &&
             std::abs(s.f1 - o.f1) <= 1e-15;
    }
    GroundTruth truth;
    truth.injected.push_back({day(3), AnomalySign::Negative});
    const auto empty = score_detection({}, truth);
    const bool conv = empty.precision == 0.0 && empty.recall == 0.0 && empty.f1 == 0.0;
    report(8, "detection metrics match the set oracle", ok && conv,
           fmt::format("1000 random pairs {}, empty detection {}", ok ? "agree" : "disagree",
                       conv ? "(0, 0, 0)" : "wrong"));
}

void criterion_loess() {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<std::size_t> len(5, 150);
    std::uniform_real_distribution<double> frac(0.05, 1.6);
    std::normal_distribution<double> noise(0.0, 3.0);
    double worst = 0.0;
    int series = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = len(rng);
        const int degree = trial % 3 == 2 ? 2 : trial % 3;
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = std::sin(0.3 * static_cast<double>(i)) * 10.0 + noise(rng);
        auto config = LoessConfig::with_fraction(frac(rng), degree);
        if (config.window_for(n) < static_cast<std::size_t>(degree + 2)) config = LoessConfig::with_points(degree + 3, degree);
        const auto out = loess_smooth(y, config);
        const std::size_t q = config.window_for(n);
        for (std::size_t i = 0; i < n; ++i) {
            worst = std::max(worst, std::abs(out[i] - oracle::loess_point(y, static_cast<double>(i), q, degree)));
        }
        ++series;
    }
    double affine = 0.0;
    std::uniform_real_distribution<double> coef(-50.0, 50.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = len(rng);
        const double a = coef(rng), b = coef(rng);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = a + b * static_cast<double>(i);
        const auto out = loess_smooth(y, LoessConfig::with_fraction(frac(rng) < 0.3 ? 0.3 : 0.75, 1));
        for (std::size_t i = 0; i < n; ++i) {
            affine = std::max(affine, std::abs(out[i] - y[i]) / (1.0 + std::abs(y[i])));
        }
    }
    const bool ok = worst <= 1e-9 && affine <= 1e-9;
    report(9, "loess matches weighted least squares", ok,
           fmt::format("{} series, worst |diff| = {:.1e}; affine reproduction error {:.1e}", series, worst, affine));
}

void criterion_correlation() {
    std::mt19937_64 rng(10);
    std::uniform_int_distribution<std::size_t> len(3, 500);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> coef(-100.0, 100.0);
    double worst = 0.0, worst_sym = 0.0, worst_affine = 0.0;
    bool bounded = true;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = len(rng);
        const double mix = coef(rng) / 100.0;
        std::vector<double> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = noise(rng);
            b[i] = mix * a[i] + (1.0 - std::abs(mix)) * noise(rng);
        }
        const double r = cross_correlation_lag0(a, b);
        worst = std::max(worst, std::abs(r - oracle::pearson(a, b)));
        bounded = bounded && r >= -1.0 && r <= 1.0;
        worst_sym = std::max(worst_sym, std::abs(r - cross_correlation_lag0(b, a)));
        double alpha = coef(rng);
        if (alpha == 0.0) alpha = 1.0;
        const double beta = coef(rng);
        std::vector<double> t(a);
        for (auto& v : t) v = alpha * v + beta;
        worst_affine = std::max(worst_affine, std::abs(cross_correlation_lag0(t, b) - (alpha > 0 ? r : -r)));
    }
    const bool ok = worst <= 1e-12 && bounded && worst_sym <= 1e-12 && worst_affine <= 1e-9;
    report(10, "cross-correlation matches Pearson", ok,
           fmt::format("500 pairs, oracle diff {:.1e}, symmetry {:.1e}, affine {:.1e}, bounded {}", worst, worst_sym,
                       worst_affine, bounded ? "yes" : "no"));
}

void criterion_weekly() {
    const auto base = normalize_weekly_0_100(make_series({10, 20, 40}, Role::Supply, Resolution::Weekly));
    bool ok = base.size() == 3 && base.points[0].value == 25 && base.points[1].value == 50 &&
              base.points[2].value == 100;
    const bool example = ok;
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::size_t> len(1, 120);
    std::uniform_real_distribution<double> value(0.0, 1e5);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> v(len(rng));
        for (auto& x : v) x = value(rng);
        v[rng() % v.size()] += 1.0;
        const auto out = normalize_weekly_0_100(make_series(v, Role::Supply, Resolution::Weekly));
        bool has_max = false;
        const double peak = *std::max_element(v.begin(), v.end());
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double y = out.points[i].value;
            ok = ok && y == std::floor(y) && y >= 0 && y <= 100 && y == std::floor(v[i] / peak * 100.0 + 1e-9);
            has_max = has_max || y == 100;
        }
        ok = ok && has_max;
    }
    report(11, "weekly 0-100 normalization", ok,
           fmt::format("[10, 20, 40] -> [25, 50, 100] {}, 500 random series", example ? "ok" : "wrong"));
}

}  // namespace

int main() {
    try {
        criterion_benchmark();
        criterion_recomposition();
        criterion_cap();
        criterion_zero_delta();
        criterion_rescale();
        criterion_persistence();
        criterion_partition();
        criterion_metrics();
        criterion_loess();
        criterion_correlation();
        criterion_weekly();
    } catch (const std::exception& e) {
        fmt::print("[FAIL] aborted: {}\n", e.what());
        return 1;
    }
    fmt::print("{} of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
