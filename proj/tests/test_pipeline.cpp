#include <cmath>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "doctest.h"
#include "infodelta/error.hpp"
#include "infodelta/pipeline.hpp"

using namespace infodelta;

namespace {

constexpr const char* kHeader = "series_id,role,source,region,topic,date,value\n";

// Daily supply/demand rows with Gaussian noise; `spike_day` adds to supply.
std::string pair_csv(std::size_t days, std::uint64_t seed, int spike_day = -1, double spike = 0.0,
                     bool identical = false) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(100.0, 5.0);
    std::string out = kHeader;
    for (std::size_t i = 0; i < days; ++i) {
        const std::string date = format_date(make_date(2020, 1, 1) + std::chrono::days{static_cast<long>(i)});
        double s = noise(rng);
        const double d = identical ? s : noise(rng);
        if (static_cast<int>(i) == spike_day) s += spike;
        out += fmt::format("tw,supply,twitter,IT,vaccine,{},{}\n", date, s);
        out += fmt::format("wiki,demand,wikipedia,IT,vaccine,{},{}\n", date, identical ? s - (static_cast<int>(i) == spike_day ? spike : 0.0) : d);
    }
    return out;
}

SeriesSet ingest_text(const std::string& text) {
    std::istringstream in(text);
    return ingest_csv(in);
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an infodelta::Error");
    return ErrorCode::IoFailure;
}

std::string emit(const AnalysisReport& r, ReportFormat f) {
    std::ostringstream out;
    emit_report(r, f, out);
    return out.str();
}

}  // namespace

TEST_CASE("ingest a valid file") {
    const auto set = ingest_text(std::string(kHeader) +
                                 "a,supply,news,IT,covid,2020-01-03,3\n"
                                 "a,supply,news,IT,covid,2020-01-01,1\n"
                                 "a,supply,news,IT,covid,2020-01-02,2\n");
    REQUIRE(set.size() == 1);
    const auto& s = set.at("a");
    CHECK(s.size() == 3);
    CHECK(s.role == Role::Supply);
    CHECK(s.resolution == Resolution::Daily);
    CHECK(s.points[0].value == 1.0);
    CHECK(s.points[2].date == make_date(2020, 1, 3));
}

TEST_CASE("ingest validation errors") {
    auto with_rows = [](const std::string& rows) { return std::string(kHeader) + rows; };
    CHECK(code_of([&] { ingest_text(with_rows("a,supply,x,y,z,2020-01-01,1\na,supply,x,y,z,2020-01-02,-1\n")); }) ==
          ErrorCode::NegativeValue);
    try {
        ingest_text(with_rows("a,supply,x,y,z,2020-01-01,1\na,supply,x,y,z,2020-01-02,-1\n"));
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK(code_of([&] { ingest_text(with_rows("a,supply,x,y,z,2020-01-01,1\na,supply,x,y,z,2020-01-01,2\n")); }) ==
          ErrorCode::DuplicateTimestamp);
    CHECK(code_of([&] { ingest_text(with_rows("a,consumer,x,y,z,2020-01-01,1\n")); }) == ErrorCode::UnknownRole);
    CHECK(code_of([&] { ingest_text(with_rows("a,supply,x,y,2020-01-01,1\n")); }) == ErrorCode::MalformedRow);
    CHECK(code_of([&] { ingest_text(with_rows("a,supply,x,y,z,2020-13-01,1\n")); }) == ErrorCode::MalformedRow);
    CHECK(code_of([&] { ingest_text(with_rows("a,supply,x,y,z,2020-01-01,abc\n")); }) == ErrorCode::MalformedRow);
    CHECK(code_of([&] { ingest_text("id,date,value\n"); }) == ErrorCode::MalformedRow);
    CHECK(code_of([] { ingest_csv(std::filesystem::path("/nonexistent/file.csv")); }) == ErrorCode::IoFailure);
}

TEST_CASE("ingest infers weekly data and fills gaps") {
    const auto set = ingest_text(std::string(kHeader) +
                                 "g,demand,trends,IT,covid,2020-01-05,10\n"
                                 "g,demand,trends,IT,covid,2020-01-19,30\n"
                                 "d,supply,news,IT,covid,2020-01-01,1\n"
                                 "d,supply,news,IT,covid,2020-01-04,4\n");
    const auto& g = set.at("g");
    CHECK(g.resolution == Resolution::Weekly);
    REQUIRE(g.size() == 3);
    CHECK(g.points[1].value == doctest::Approx(20.0));
    CHECK(g.points[1].imputed);
    const auto& d = set.at("d");
    CHECK(d.resolution == Resolution::Daily);
    CHECK(d.size() == 4);
}

TEST_CASE("ingest round trip is idempotent") {
    const auto first = ingest_text(pair_csv(30, 4) + "x,demand,\"a, b\",\"q\"\"uote\",t,2020-02-01,1.25\n");
    std::ostringstream once;
    write_series_csv(first, once);
    const auto second = ingest_text(once.str());
    std::ostringstream twice;
    write_series_csv(second, twice);
    CHECK(once.str() == twice.str());
    CHECK(second.at("x").source == "a, b");
    CHECK(second.at("x").region == "q\"uote");
}

TEST_CASE("identical supply and demand give an all-balance report") {
    const auto set = ingest_text(pair_csv(120, 1, -1, 0.0, true));
    const auto report = run_analysis(set, "tw", "wiki", {});
    CHECK(report.anomalies.anomaly_count() == 0);
    CHECK(report.runs.empty());
    for (const auto& l : report.labels) CHECK(l.regime == Regime::Balance);
    const std::string json = emit(report, ReportFormat::Json);
    CHECK(json.find("\"runs\": []") != std::string::npos);
}

TEST_CASE("a large supply spike is labelled overabundance") {
    const auto set = ingest_text(pair_csv(150, 2, 80, 400.0));
    const auto report = run_analysis(set, "tw", "wiki", {});
    REQUIRE(report.labels.size() == 150);
    CHECK(report.labels[80].regime == Regime::Overabundance);
    CHECK(report.anomalies.points[80].remainder > report.anomalies.upper_limit);
    CHECK(report.period == 7);
    CHECK(report.trend_window == 91);
    CHECK(report.anomalies.anomaly_count() <= 15);
}

TEST_CASE("weekly demand aggregates and normalizes daily supply") {
    std::string text = kHeader;
    std::mt19937_64 rng(3);
    std::normal_distribution<double> noise(50.0, 4.0);
    // 2020-01-05 is a Sunday; Wednesday 2020-01-01 to Saturday 2020-08-01: one partial week, then 30 full.
    for (int i = 0; i < 7 * 30 + 4; ++i) {
        text += fmt::format("tw,supply,twitter,IT,v,{},{}\n", format_date(make_date(2020, 1, 1) + std::chrono::days{i}), noise(rng));
    }
    for (int w = 0; w < 30; ++w) {
        text += fmt::format("gt,demand,trends,IT,v,{},{}\n", format_date(make_date(2020, 1, 5) + std::chrono::days{7 * w}),
                            std::floor(noise(rng)));
    }
    const auto set = ingest_text(text);
    PipelineConfig config;
    config.week_convention = WeekStart::Sunday;
    const auto report = run_analysis(set, "tw", "gt", config);
    CHECK(report.resolution == Resolution::Weekly);
    CHECK(report.supply.transform == "weekly_sum,normalize_0_100");
    CHECK(report.dropped_partial_weeks == 1);
    CHECK(report.period == 0);
    CHECK(report.trend_window == 13);
    CHECK(report.delta.size() == 30);
    for (double s : report.decomposition.seasonal) CHECK(s == 0.0);
    const std::string json = emit(report, ReportFormat::Json);
    CHECK(json.find("\"weekly_persistence_extension\": true") != std::string::npos);

    CHECK(code_of([&] { run_analysis(set, "gt", "tw", config); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("weekly supply with daily demand is unsupported") {
    std::string text = kHeader;
    for (int w = 0; w < 20; ++w) {
        text += fmt::format("ws,supply,x,IT,v,{},{}\n", format_date(make_date(2020, 1, 6) + std::chrono::days{7 * w}), 10 + w % 3);
    }
    for (int d = 0; d < 140; ++d) {
        text += fmt::format("dd,demand,x,IT,v,{},{}\n", format_date(make_date(2020, 1, 6) + std::chrono::days{d}), 10 + d % 5);
    }
    const auto set = ingest_text(text);
    CHECK(code_of([&] { run_analysis(set, "ws", "dd", {}); }) == ErrorCode::ResolutionPairUnsupported);
    CHECK(code_of([&] { run_analysis(set, "nope", "dd", {}); }) == ErrorCode::UnknownSeries);
}

TEST_CASE("reports are deterministic and the cap only touches capped_delta") {
    const auto set = ingest_text(pair_csv(100, 5, 40, 300.0));
    auto report = run_analysis(set, "tw", "wiki", {});
    CHECK(emit(report, ReportFormat::Json) == emit(run_analysis(set, "tw", "wiki", {}), ReportFormat::Json));
    CHECK(emit(report, ReportFormat::Csv) == emit(report, ReportFormat::Csv));

    report.delta.points[3].delta = 14.2;
    report.delta.points[4].delta = -12.0;
    const std::string csv = emit(report, ReportFormat::Csv);
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "date,delta,capped_delta,regime,is_anomaly,sign,band_lo,band_hi");
    for (int i = 0; i <= 3; ++i) std::getline(lines, line);
    CHECK(line.rfind(format_date(report.delta.points[3].date) + ",14.2,10,", 0) == 0);
    std::getline(lines, line);
    CHECK(line.rfind(format_date(report.delta.points[4].date) + ",-12,-10,", 0) == 0);
}

TEST_CASE("window filtering and report labels round trip") {
    const auto set = ingest_text(pair_csv(120, 6, 70, 400.0));
    PipelineConfig config;
    config.window_start = make_date(2020, 1, 11);
    config.window_end = make_date(2020, 4, 10);
    const auto report = run_analysis(set, "tw", "wiki", config);
    CHECK(report.delta.points.front().date == make_date(2020, 1, 11));
    CHECK(report.delta.points.back().date == make_date(2020, 4, 10));

    std::istringstream json(emit(report, ReportFormat::Json));
    const auto labels = read_report_labels(json);
    REQUIRE(labels.labels.size() == report.labels.size());
    for (std::size_t i = 0; i < labels.labels.size(); ++i) {
        CHECK(labels.labels[i].regime == report.labels[i].regime);
        CHECK(labels.labels[i].date == report.labels[i].date);
    }
    const auto runs = persistence_runs(labels.labels, 2);
    CHECK(runs.size() == report.runs.size());

    std::istringstream broken("{\"points\": 3}");
    CHECK(code_of([&] { read_report_labels(broken); }) == ErrorCode::MalformedRow);
}

TEST_CASE("config files and validation") {
    std::istringstream text(
        "# defaults from the method\n"
        "alpha = 0.05\n"
        "max_anoms: 0.2\n"
        "trend_window = 61\n"
        "week_convention = sunday\n"
        "window_start = 2020-12-08  # vaccination campaign\n");
    const auto c = load_config(text);
    CHECK(c.max_anoms == 0.2);
    CHECK(c.trend_window == 61);
    CHECK(c.week_convention == WeekStart::Sunday);
    CHECK(c.window_start == make_date(2020, 12, 8));
    CHECK(c.period_for(Resolution::Daily) == 7);
    CHECK(c.period_for(Resolution::Weekly) == 0);

    std::istringstream unknown("beta = 1\n");
    CHECK(code_of([&] { load_config(unknown); }) == ErrorCode::InvalidConfig);

    PipelineConfig bad;
    bad.window_start = make_date(2021, 1, 1);
    bad.window_end = make_date(2020, 1, 1);
    CHECK(code_of([&] { bad.validate(); }) == ErrorCode::InvalidConfig);
    bad = {};
    bad.max_anoms = 0.0;
    CHECK(code_of([&] { bad.validate(); }) == ErrorCode::InvalidConfig);
    bad = {};
    bad.set("period", "1");
    CHECK(code_of([&] { bad.validate(); }) == ErrorCode::InvalidPeriod);
}
