#include "infodelta/synth.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include "json.hpp"

#include "infodelta/error.hpp"

namespace infodelta {

std::string_view to_string(InjectionTarget target) {
    switch (target) {
        case InjectionTarget::Supply: return "supply";
        case InjectionTarget::Demand: return "demand";
        case InjectionTarget::Both: return "both";
    }
    return "supply";
}

std::vector<double> default_magnitude_grid() {
    std::vector<double> grid;
    for (int i = 2; i <= 30; ++i) grid.push_back(0.5 * i);
    return grid;
}

void SynthConfig::validate() const {
    if (series_length < 4) throw Error(ErrorCode::InvalidConfig, "series_length must be >= 4");
    if (injection_count > series_length) {
        throw Error(ErrorCode::CountExceedsLength, "injection_count exceeds series_length");
    }
    if (!(base_std >= 0.0)) throw Error(ErrorCode::InvalidConfig, "base_std must be >= 0");
    if (repetitions == 0) throw Error(ErrorCode::InvalidConfig, "repetitions must be >= 1");
    for (double m : magnitude_grid) {
        if (!(m > 0.0)) throw Error(ErrorCode::InvalidConfig, "magnitudes must be positive");
    }
    if (match_slack_days < 0) throw Error(ErrorCode::InvalidConfig, "match slack must be >= 0");
    anomaly.validate();
}

std::set<Date> GroundTruth::dates() const {
    std::set<Date> out;
    for (const auto& inj : injected) out.insert(inj.date);
    return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    // splitmix64 finalizer over the combined words
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

TimeSeries gaussian_series(const SynthConfig& config, Role role, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(config.base_mean, config.base_std);
    TimeSeries s;
    s.id = role == Role::Supply ? "synthetic_supply" : "synthetic_demand";
    s.role = role;
    s.source = "synthetic";
    s.resolution = Resolution::Daily;
    s.points.reserve(config.series_length);
    for (std::size_t i = 0; i < config.series_length; ++i) {
        SeriesPoint p;
        p.date = config.start_date + std::chrono::days{static_cast<long>(i)};
        p.value = std::max(0.0, normal(rng));
        s.points.push_back(p);
    }
    return s;
}

std::vector<std::size_t> choose_points(std::size_t n, std::size_t count, std::mt19937_64& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    // partial Fisher-Yates
    for (std::size_t i = 0; i < count; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
    return idx;
}

// Returns +1 or -1 per perturbed point.
std::vector<int> perturb(TimeSeries& series, const std::vector<std::size_t>& idx, double shift,
                         std::mt19937_64& rng) {
    std::bernoulli_distribution coin(0.5);
    std::vector<int> signs;
    signs.reserve(idx.size());
    for (std::size_t i : idx) {
        const int s = coin(rng) ? 1 : -1;
        auto& v = series.points[i].value;
        v = std::max(0.0, v + s * shift);
        signs.push_back(s);
    }
    return signs;
}

AnomalySign to_sign(int v) {
    if (v > 0) return AnomalySign::Positive;
    if (v < 0) return AnomalySign::Negative;
    return AnomalySign::None;
}

}  // namespace

std::pair<TimeSeries, TimeSeries> generate_base_pair(const SynthConfig& config, std::uint64_t seed) {
    return {gaussian_series(config, Role::Supply, derive_seed(seed, 0x5u)),
            gaussian_series(config, Role::Demand, derive_seed(seed, 0xDu))};
}

InjectedSeries inject_anomalies(const TimeSeries& series, double magnitude_sigma, std::size_t count,
                                std::uint64_t seed, double sigma_base) {
    if (count > series.size()) {
        throw Error(ErrorCode::CountExceedsLength, "cannot perturb " + std::to_string(count) + " of " +
                                                       std::to_string(series.size()) + " points");
    }
    std::mt19937_64 rng(seed);
    InjectedSeries out{series, {}};
    const auto idx = choose_points(series.size(), count, rng);
    const auto signs = perturb(out.series, idx, magnitude_sigma * sigma_base, rng);
    const int polarity = series.role == Role::Supply ? 1 : -1;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        out.truth.injected.push_back({series.points[idx[i]].date, to_sign(polarity * signs[i])});
    }
    return out;
}

DetectionScore score_detection(const std::set<Date>& detected, const GroundTruth& truth, int slack_days) {
    const auto truth_dates = truth.dates();
    auto near = [slack_days](const std::set<Date>& pool, Date d) {
        auto it = pool.lower_bound(d - std::chrono::days{slack_days});
        return it != pool.end() && *it <= d + std::chrono::days{slack_days};
    };
    DetectionScore s;
    s.n_detected = detected.size();
    s.n_ground_truth = truth_dates.size();
    for (Date d : detected) {
        if (near(truth_dates, d)) ++s.n_intersection;
    }
    std::size_t truth_hit = 0;
    for (Date d : truth_dates) {
        if (near(detected, d)) ++truth_hit;
    }
    s.precision = s.n_detected == 0 ? 0.0 : static_cast<double>(s.n_intersection) / static_cast<double>(s.n_detected);
    s.recall = s.n_ground_truth == 0 ? 0.0 : static_cast<double>(truth_hit) / static_cast<double>(s.n_ground_truth);
    const double denom = s.precision + s.recall;
    s.f1 = denom > 0.0 ? 2.0 * s.precision * s.recall / denom : 0.0;
    return s;
}

BenchmarkRun run_single(const SynthConfig& config, double magnitude, std::size_t repetition) {
    BenchmarkRun run;
    run.repetition = repetition;
    run.seed = derive_seed(derive_seed(config.rng_seed, std::bit_cast<std::uint64_t>(magnitude)), repetition);

    auto [supply, demand] = generate_base_pair(config, derive_seed(run.seed, 1));
    GroundTruth truth;
    switch (config.injection_target) {
        case InjectionTarget::Supply: {
            auto inj = inject_anomalies(supply, magnitude, config.injection_count, derive_seed(run.seed, 2),
                                        config.base_std);
            supply = std::move(inj.series);
            truth = std::move(inj.truth);
            break;
        }
        case InjectionTarget::Demand: {
            auto inj = inject_anomalies(demand, magnitude, config.injection_count, derive_seed(run.seed, 2),
                                        config.base_std);
            demand = std::move(inj.series);
            truth = std::move(inj.truth);
            break;
        }
        case InjectionTarget::Both: {
            // Same timestamps in both series, independent signs.
            std::mt19937_64 rng(derive_seed(run.seed, 2));
            const auto idx = choose_points(supply.size(), config.injection_count, rng);
            const double shift = magnitude * config.base_std;
            const auto s_signs = perturb(supply, idx, shift, rng);
            const auto d_signs = perturb(demand, idx, shift, rng);
            for (std::size_t i = 0; i < idx.size(); ++i) {
                truth.injected.push_back({supply.points[idx[i]].date, to_sign(s_signs[i] - d_signs[i])});
            }
            break;
        }
    }

    const auto delta = compute_delta(rescale(supply), rescale(demand));
    const auto deltas = delta.deltas();
    const auto decomposition = stl_decompose(deltas, config.stl);
    const auto result = sign_anomalies(detect_anomalies(decomposition, config.anomaly), delta);
    run.candidates = result.candidates;
    run.cap = result.cap;

    std::set<Date> detected;
    for (std::size_t i = 0; i < result.size(); ++i) {
        if (result.points[i].is_anomaly) detected.insert(result.dates[i]);
    }
    run.score = score_detection(detected, truth, config.match_slack_days);
    return run;
}

BenchmarkReport run_benchmark(const SynthConfig& config) {
    config.validate();
    BenchmarkReport report;
    report.config = config;
    const std::size_t reps = config.repetitions;
    const std::size_t tasks = config.magnitude_grid.size() * reps;
    std::vector<BenchmarkRun> runs(tasks);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (std::size_t t = next++; t < tasks && !failed; t = next++) {
            try {
                runs[t] = run_single(config, config.magnitude_grid[t / reps], t % reps);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };
    unsigned n_threads = config.threads > 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, tasks));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);

    for (std::size_t m = 0; m < config.magnitude_grid.size(); ++m) {
        BenchmarkRow row;
        row.sigma = config.magnitude_grid[m];
        for (std::size_t r = 0; r < reps; ++r) {
            const auto& run = runs[m * reps + r];
            row.mean_precision += run.score.precision;
            row.mean_recall += run.score.recall;
            row.mean_f1 += run.score.f1;
            row.runs.push_back(run);
        }
        row.mean_precision /= static_cast<double>(reps);
        row.mean_recall /= static_cast<double>(reps);
        row.mean_f1 /= static_cast<double>(reps);
        report.rows.push_back(std::move(row));
    }
    return report;
}

void write_benchmark_csv(const BenchmarkReport& report, std::ostream& out) {
    out << "sigma,mean_precision,mean_f1,n_runs\n";
    for (const auto& row : report.rows) {
        fmt::print(out, "{},{},{},{}\n", row.sigma, row.mean_precision, row.mean_f1, row.runs.size());
    }
}

void write_benchmark_json(const BenchmarkReport& report, std::ostream& out) {
    using nlohmann::ordered_json;
    const auto& c = report.config;
    ordered_json j;
    j["config"] = {
        {"series_length", c.series_length},
        {"start_date", format_date(c.start_date)},
        {"base_mean", c.base_mean},
        {"base_std", c.base_std},
        {"injection_count", c.injection_count},
        {"repetitions", c.repetitions},
        {"injection_target", std::string(to_string(c.injection_target))},
        {"rng_seed", c.rng_seed},
        {"match_slack_days", c.match_slack_days},
        {"alpha", c.anomaly.alpha},
        {"max_anoms", c.anomaly.max_anoms},
        {"period", c.stl.period},
        {"trend_window", c.stl.trend_window},
        {"inner_loops", c.stl.inner_loops},
        {"outer_loops", c.stl.outer_loops},
    };
    ordered_json rows = ordered_json::array();
    for (const auto& row : report.rows) {
        ordered_json runs = ordered_json::array();
        for (const auto& run : row.runs) {
            runs.push_back({
                {"repetition", run.repetition},
                {"seed", run.seed},
                {"n_detected", run.score.n_detected},
                {"n_intersection", run.score.n_intersection},
                {"n_ground_truth", run.score.n_ground_truth},
                {"n_candidates", run.candidates},
                {"cap", run.cap},
                {"precision", run.score.precision},
                {"recall", run.score.recall},
                {"f1", run.score.f1},
            });
        }
        rows.push_back({
            {"sigma", row.sigma},
            {"mean_precision", row.mean_precision},
            {"mean_f1", row.mean_f1},
            {"mean_recall", row.mean_recall},
            {"n_runs", row.runs.size()},
            {"runs", std::move(runs)},
        });
    }
    j["rows"] = std::move(rows);
    out << j.dump(2) << '\n';
}

}  // namespace infodelta
