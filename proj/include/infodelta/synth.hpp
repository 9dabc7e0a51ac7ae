#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <string_view>
#include <utility>
#include <vector>

#include "infodelta/anomaly.hpp"
#include "infodelta/date.hpp"
#include "infodelta/series.hpp"
#include "infodelta/stl.hpp"

namespace infodelta {

enum class InjectionTarget { Supply, Demand, Both };

std::string_view to_string(InjectionTarget target);

// Magnitudes 1.0, 1.5, ..., 15.0.
std::vector<double> default_magnitude_grid();

struct SynthConfig {
    std::size_t series_length = 486;
    Date start_date = make_date(2020, 1, 1);
    double base_mean = 10.0;
    double base_std = 1.0;
    std::size_t injection_count = 20;
    std::vector<double> magnitude_grid = default_magnitude_grid();
    std::size_t repetitions = 10;
    InjectionTarget injection_target = InjectionTarget::Supply;
    std::uint64_t rng_seed = 20200101;
    int match_slack_days = 0;  // 0 = exact timestamp match
    StlConfig stl;
    AnomalyConfig anomaly;
    unsigned threads = 0;  // 0 = hardware concurrency

    void validate() const;
};

struct Injection {
    Date date;
    AnomalySign sign = AnomalySign::None;  // direction of the effect on the delta

    friend bool operator<(const Injection& a, const Injection& b) { return a.date < b.date; }
};

struct GroundTruth {
    std::vector<Injection> injected;  // sorted by date, dates distinct

    std::set<Date> dates() const;
};

// Mixes a seed with a stream tag into an independent child seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

// Two independent Normal(mean, std^2) series, negative draws clipped to zero.
std::pair<TimeSeries, TimeSeries> generate_base_pair(const SynthConfig& config, std::uint64_t seed);

struct InjectedSeries {
    TimeSeries series;
    GroundTruth truth;
};

// Perturbs `count` distinct points, chosen uniformly without replacement, by
// +/- magnitude_sigma * sigma_base with a fair-coin sign, clipping at zero.
// Truth signs describe the effect on supply - demand given the series role.
InjectedSeries inject_anomalies(const TimeSeries& series, double magnitude_sigma, std::size_t count,
                                std::uint64_t seed, double sigma_base = 1.0);

struct DetectionScore {
    std::size_t n_detected = 0;
    std::size_t n_intersection = 0;
    std::size_t n_ground_truth = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

DetectionScore score_detection(const std::set<Date>& detected, const GroundTruth& truth, int slack_days = 0);

struct BenchmarkRun {
    std::size_t repetition = 0;
    std::uint64_t seed = 0;
    std::size_t candidates = 0;  // points outside the IQR limits before the cap
    std::size_t cap = 0;
    DetectionScore score;
};

struct BenchmarkRow {
    double sigma = 0.0;
    double mean_precision = 0.0;
    double mean_recall = 0.0;
    double mean_f1 = 0.0;
    std::vector<BenchmarkRun> runs;
};

struct BenchmarkReport {
    SynthConfig config;
    std::vector<BenchmarkRow> rows;
};

// One synthetic run through rescale, delta, decomposition and detection.
BenchmarkRun run_single(const SynthConfig& config, double magnitude, std::size_t repetition);

BenchmarkReport run_benchmark(const SynthConfig& config);

void write_benchmark_csv(const BenchmarkReport& report, std::ostream& out);
void write_benchmark_json(const BenchmarkReport& report, std::ostream& out);

}  // namespace infodelta
