// Batch command-line front end: analyze, benchmark, decompose, persistence, credibility.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "infodelta/analytics.hpp"
#include "infodelta/csv.hpp"
#include "infodelta/error.hpp"
#include "infodelta/pipeline.hpp"
#include "infodelta/synth.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace infodelta;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr const char* kConfigEnv = "INFODELTA_CONFIG";

struct PipelineFlags {
    std::string config_path;
    std::optional<double> alpha;
    std::optional<double> max_anoms;
    std::optional<int> trend_window;
    std::optional<int> period;
    std::optional<int> gap_tolerance;
    std::optional<double> epsilon;
    std::optional<int> outer_loops;
    std::optional<std::string> from;
    std::optional<std::string> to;
    std::optional<std::string> week_convention;
    std::optional<double> delta_cap;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--config", config_path, std::string("Flat key = value config file (default: $") + kConfigEnv + ")");
        cmd->add_option("--alpha", alpha, "IQR band width parameter; k = 0.15 / alpha");
        cmd->add_option("--max-anoms", max_anoms, "Largest fraction of points that may be flagged");
        cmd->add_option("--trend-window", trend_window, "Trend loess window in points");
        cmd->add_option("--period", period, "Seasonal period (0 disables)");
        cmd->add_option("--gap-tolerance", gap_tolerance, "Regular units bridged inside a persistence run");
        cmd->add_option("--epsilon", epsilon, "Half-width of the Balance regime");
        cmd->add_option("--outer-loops", outer_loops, "Robust decomposition iterations");
        cmd->add_option("--from", from, "Window start (YYYY-MM-DD)");
        cmd->add_option("--to", to, "Window end (YYYY-MM-DD)");
        cmd->add_option("--week-convention", week_convention, "iso (Monday) or sunday");
        cmd->add_option("--delta-cap", delta_cap, "Clamp for the capped_delta column");
    }

    PipelineConfig resolve() const {
        PipelineConfig config;
        std::string path = config_path;
        if (path.empty()) {
            if (const char* env = std::getenv(kConfigEnv)) path = env;
        }
        if (!path.empty()) config = load_config(fs::path(path));
        auto put = [&config](const char* key, const auto& value) {
            if (value) config.set(key, fmt::format("{}", *value));
        };
        put("alpha", alpha);
        put("max_anoms", max_anoms);
        put("trend_window", trend_window);
        put("seasonal_period", period);
        put("gap_tolerance", gap_tolerance);
        put("balance_epsilon", epsilon);
        put("outer_loops", outer_loops);
        put("window_start", from);
        put("window_end", to);
        put("week_convention", week_convention);
        put("delta_cap", delta_cap);
        config.validate();
        return config;
    }
};

ReportFormat format_or_throw(const std::string& text) {
    auto f = parse_report_format(text);
    if (!f) throw Error(ErrorCode::InvalidConfig, "format must be json or csv");
    return *f;
}

// Writes to `path`, or stdout when empty.
template <typename Fn>
void with_output(const std::string& path, Fn&& write) {
    if (path.empty() || path == "-") {
        write(std::cout);
        std::cout.flush();
        if (!std::cout) throw Error(ErrorCode::IoFailure, "failed writing to stdout");
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path);
    write(out);
    if (!out) throw Error(ErrorCode::IoFailure, "failed writing " + path);
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path);
    return in;
}

std::string pair_file_name(const std::string& supply, const std::string& demand, ReportFormat f) {
    std::string name = supply + "__" + demand + (f == ReportFormat::Json ? ".json" : ".csv");
    for (char& c : name) {
        if (c == '/' || c == '\\' || c == ':') c = '_';
    }
    return name;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Information supply/demand imbalance analysis"};
    app.require_subcommand(1);

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Detect voids and overabundance for supply/demand pairs");
    std::string input;
    std::string supply_id;
    std::string demand_id;
    std::vector<std::string> pairs;
    std::string format = "json";
    std::string output;
    std::string output_dir;
    PipelineFlags analyze_flags;
    analyze->add_option("--input", input, "Long-format series CSV")->required();
    analyze->add_option("--supply", supply_id, "Supply series id");
    analyze->add_option("--demand", demand_id, "Demand series id");
    analyze->add_option("--pair", pairs, "SUPPLY:DEMAND pair (repeatable)");
    analyze->add_option("--format", format, "json or csv");
    analyze->add_option("--output", output, "Output file for a single pair (default stdout)");
    analyze->add_option("--output-dir", output_dir, "Directory for one report per pair");
    analyze_flags.add_to(analyze);

    // benchmark
    auto* bench = app.add_subcommand("benchmark", "Synthetic precision/F1 evaluation");
    SynthConfig synth;
    std::string target = "supply";
    std::string bench_format = "csv";
    std::string bench_output;
    std::optional<double> bench_alpha;
    std::optional<double> bench_max_anoms;
    std::optional<int> bench_trend;
    std::optional<int> bench_period;
    std::optional<int> bench_outer;
    bench->add_option("--seed", synth.rng_seed, "Base RNG seed");
    bench->add_option("--reps", synth.repetitions, "Repetitions per magnitude");
    bench->add_option("--length", synth.series_length, "Days per synthetic series");
    bench->add_option("--count", synth.injection_count, "Injected anomalies per run");
    bench->add_option("--target", target, "supply, demand or both");
    bench->add_option("--slack", synth.match_slack_days, "Days of slack when matching detections");
    bench->add_option("--threads", synth.threads, "Worker threads (0 = all cores)");
    bench->add_option("--alpha", bench_alpha);
    bench->add_option("--max-anoms", bench_max_anoms);
    bench->add_option("--trend-window", bench_trend);
    bench->add_option("--period", bench_period);
    bench->add_option("--outer-loops", bench_outer);
    bench->add_option("--format", bench_format, "csv or json");
    bench->add_option("--output", bench_output, "Output file (default stdout)");

    // decompose
    auto* decompose = app.add_subcommand("decompose", "Emit seasonal/trend/remainder components");
    std::string dec_input;
    std::string dec_series;
    std::string dec_supply;
    std::string dec_demand;
    std::string dec_output;
    PipelineFlags dec_flags;
    decompose->add_option("--input", dec_input, "Long-format series CSV")->required();
    decompose->add_option("--series", dec_series, "Decompose one raw series");
    decompose->add_option("--supply", dec_supply, "Supply id (decomposes the delta)");
    decompose->add_option("--demand", dec_demand, "Demand id (decomposes the delta)");
    decompose->add_option("--output", dec_output, "Output CSV (default stdout)");
    dec_flags.add_to(decompose);

    // persistence
    auto* persistence = app.add_subcommand("persistence", "Persistence runs from a JSON report");
    std::string report_path;
    int gap_tolerance = 2;
    std::string pers_format = "csv";
    std::string pers_output;
    persistence->add_option("--report", report_path, "JSON report from analyze")->required();
    persistence->add_option("--gap-tolerance", gap_tolerance, "Regular units bridged inside a run");
    persistence->add_option("--format", pers_format, "csv or json");
    persistence->add_option("--output", pers_output, "Output file (default stdout)");

    // credibility
    auto* credibility = app.add_subcommand("credibility", "Credibility buckets of posts by anomaly state");
    std::string cred_report;
    std::string ratings_path;
    std::string posts_path;
    std::string cred_from;
    std::string cred_format = "csv";
    std::string cred_output;
    std::string cred_policy = "lower";
    credibility->add_option("--report", cred_report, "JSON report from analyze")->required();
    credibility->add_option("--ratings", ratings_path, "CSV domain,score")->required();
    credibility->add_option("--posts", posts_path, "CSV timestamp,domain,platform,region,topic")->required();
    credibility->add_option("--from", cred_from, "Ignore posts before this date");
    credibility->add_option("--policy", cred_policy, "Fractional scores: lower or nearest");
    credibility->add_option("--format", cred_format, "csv or json");
    credibility->add_option("--output", cred_output, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (analyze->parsed()) {
            const PipelineConfig config = analyze_flags.resolve();
            const ReportFormat fmt_kind = format_or_throw(format);
            std::vector<std::pair<std::string, std::string>> jobs;
            if (!supply_id.empty() || !demand_id.empty()) {
                if (supply_id.empty() || demand_id.empty()) {
                    throw Error(ErrorCode::InvalidConfig, "--supply and --demand go together");
                }
                jobs.emplace_back(supply_id, demand_id);
            }
            for (const auto& p : pairs) {
                auto colon = p.find(':');
                if (colon == std::string::npos) throw Error(ErrorCode::InvalidConfig, "--pair expects SUPPLY:DEMAND");
                jobs.emplace_back(p.substr(0, colon), p.substr(colon + 1));
            }
            if (jobs.empty()) throw Error(ErrorCode::InvalidConfig, "no supply/demand pair given");
            if (jobs.size() > 1 && output_dir.empty()) {
                throw Error(ErrorCode::InvalidConfig, "several pairs need --output-dir");
            }

            const SeriesSet series = ingest_csv(fs::path(input));
            std::vector<std::future<AnalysisReport>> futures;
            for (const auto& [s, d] : jobs) {
                futures.push_back(std::async(std::launch::async, [&series, &config, &input, s = s, d = d] {
                    AnalysisReport r = run_analysis(series, s, d, config);
                    r.input = fs::path(input).filename().string();
                    return r;
                }));
            }
            for (std::size_t i = 0; i < futures.size(); ++i) {
                const AnalysisReport report = futures[i].get();
                if (!output_dir.empty()) {
                    fs::create_directories(output_dir);
                    emit_report(report, fmt_kind, fs::path(output_dir) / pair_file_name(jobs[i].first, jobs[i].second, fmt_kind));
                } else {
                    with_output(output, [&](std::ostream& out) { emit_report(report, fmt_kind, out); });
                }
                std::cerr << fmt::format("{} vs {}: {} points, {} anomalies, {} runs\n", jobs[i].first, jobs[i].second,
                                         report.labels.size(), report.anomalies.anomaly_count(), report.runs.size());
            }
        } else if (bench->parsed()) {
            if (target == "supply") {
                synth.injection_target = InjectionTarget::Supply;
            } else if (target == "demand") {
                synth.injection_target = InjectionTarget::Demand;
            } else if (target == "both") {
                synth.injection_target = InjectionTarget::Both;
            } else {
                throw Error(ErrorCode::InvalidConfig, "--target must be supply, demand or both");
            }
            if (bench_alpha) synth.anomaly.alpha = *bench_alpha;
            if (bench_max_anoms) synth.anomaly.max_anoms = *bench_max_anoms;
            if (bench_trend) synth.stl.trend_window = *bench_trend;
            if (bench_period) synth.stl.period = *bench_period;
            if (bench_outer) synth.stl.outer_loops = *bench_outer;
            const ReportFormat fmt_kind = format_or_throw(bench_format);
            const BenchmarkReport report = run_benchmark(synth);
            with_output(bench_output, [&](std::ostream& out) {
                if (fmt_kind == ReportFormat::Json) {
                    write_benchmark_json(report, out);
                } else {
                    write_benchmark_csv(report, out);
                }
            });
        } else if (decompose->parsed()) {
            const PipelineConfig config = dec_flags.resolve();
            const SeriesSet series = ingest_csv(fs::path(dec_input));
            std::vector<Date> dates;
            std::vector<double> values;
            Resolution resolution = Resolution::Daily;
            if (!dec_series.empty()) {
                auto it = series.find(dec_series);
                if (it == series.end()) throw Error(ErrorCode::UnknownSeries, "no series `" + dec_series + "`");
                const TimeSeries s = clip_window(it->second, config.window_start.value_or(Date::min()),
                                                 config.window_end.value_or(Date::max()));
                for (const auto& p : s.points) {
                    dates.push_back(p.date);
                    values.push_back(p.value);
                }
                resolution = s.resolution;
            } else if (!dec_supply.empty() && !dec_demand.empty()) {
                const AnalysisReport r = run_analysis(series, dec_supply, dec_demand, config);
                dates = r.delta.dates();
                values = r.delta.deltas();
                resolution = r.resolution;
            } else {
                throw Error(ErrorCode::InvalidConfig, "give --series, or --supply with --demand");
            }
            StlConfig stl;
            stl.period = config.period_for(resolution);
            stl.trend_window = config.trend_window_for(resolution);
            stl.inner_loops = config.inner_loops;
            stl.outer_loops = config.outer_loops;
            const Decomposition d = stl_decompose(values, stl);
            with_output(dec_output, [&](std::ostream& out) {
                out << "date,observed,seasonal,trend,remainder\n";
                for (std::size_t i = 0; i < d.size(); ++i) {
                    fmt::print(out, "{},{},{},{},{}\n", format_date(dates[i]), d.observed[i], d.seasonal[i], d.trend[i],
                               d.remainder[i]);
                }
            });
        } else if (persistence->parsed()) {
            auto in = open_input(report_path);
            const ReportLabels labels = read_report_labels(in);
            const auto runs = persistence_runs(labels.labels, gap_tolerance, labels.resolution);
            const ReportFormat fmt_kind = format_or_throw(pers_format);
            with_output(pers_output, [&](std::ostream& out) {
                if (fmt_kind == ReportFormat::Csv) {
                    out << "sign,start,end,length,bridged_gaps\n";
                    for (const auto& r : runs) {
                        fmt::print(out, "{},{},{},{},{}\n", to_string(r.sign), format_date(r.start), format_date(r.end),
                                   r.length, r.bridged_gaps);
                    }
                    return;
                }
                nlohmann::ordered_json j = nlohmann::ordered_json::array();
                for (const auto& r : runs) {
                    j.push_back({{"sign", std::string(to_string(r.sign))},
                                 {"start", format_date(r.start)},
                                 {"end", format_date(r.end)},
                                 {"length", r.length},
                                 {"bridged_gaps", r.bridged_gaps}});
                }
                out << j.dump(2) << '\n';
            });
        } else if (credibility->parsed()) {
            auto report_in = open_input(cred_report);
            const ReportLabels labels = read_report_labels(report_in);
            auto ratings_in = open_input(ratings_path);
            const auto ratings = read_ratings_csv(ratings_in);
            auto posts_in = open_input(posts_path);
            const auto posts = read_posts_csv(posts_in);
            std::optional<Date> from;
            if (!cred_from.empty()) {
                from = parse_date(cred_from);
                if (!from) throw Error(ErrorCode::InvalidConfig, "--from expects YYYY-MM-DD");
            }
            FractionalScorePolicy policy = FractionalScorePolicy::LowerBucket;
            if (cred_policy == "nearest") {
                policy = FractionalScorePolicy::Nearest;
            } else if (cred_policy != "lower") {
                throw Error(ErrorCode::InvalidConfig, "--policy must be lower or nearest");
            }
            const QualityReport q = quality_by_anomaly_state(posts, ratings, labels.labels, from, policy);
            const ReportFormat fmt_kind = format_or_throw(cred_format);
            with_output(cred_output, [&](std::ostream& out) {
                if (fmt_kind == ReportFormat::Csv) {
                    write_quality_csv(q, out);
                } else {
                    write_quality_json(q, out);
                }
            });
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::IoFailure ? kExitIo : kExitValidation;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return 0;
}
