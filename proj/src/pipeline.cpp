#include "infodelta/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "infodelta/csv.hpp"
#include "infodelta/error.hpp"
#include "json.hpp"

namespace infodelta {

namespace {

constexpr std::string_view kSeriesHeader = "series_id,role,source,region,topic,date,value";

std::string line_error(std::size_t line_no, std::string_view what) {
    return "line " + std::to_string(line_no) + ": " + std::string(what);
}

Resolution infer_resolution(const std::vector<SeriesPoint>& sorted) {
    if (sorted.size() < 2) return Resolution::Daily;
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (days_between(sorted[i - 1].date, sorted[i].date) % 7 != 0) return Resolution::Daily;
    }
    return Resolution::Weekly;
}

}  // namespace

SeriesSet ingest_csv(std::istream& in) {
    std::string line;
    if (!csv::read_line(in, line)) throw Error(ErrorCode::MalformedRow, line_error(1, "empty file"));
    {
        auto header = csv::split(line);
        std::string joined;
        if (header) {
            for (std::size_t i = 0; i < header->size(); ++i) joined += (i ? "," : "") + csv::lower(csv::trim((*header)[i]));
        }
        if (joined != kSeriesHeader) {
            throw Error(ErrorCode::MalformedRow, line_error(1, "expected header `" + std::string(kSeriesHeader) + "`"));
        }
    }

    SeriesSet out;
    std::map<std::string, std::set<Date>> seen;
    std::size_t line_no = 1;
    while (csv::read_line(in, line)) {
        ++line_no;
        if (csv::trim(line).empty()) continue;
        auto fields = csv::split(line);
        if (!fields || fields->size() != 7) {
            throw Error(ErrorCode::MalformedRow, line_error(line_no, "expected 7 fields"));
        }
        auto& f = *fields;
        for (auto& field : f) field = csv::trim(field);
        if (f[0].empty()) throw Error(ErrorCode::MalformedRow, line_error(line_no, "empty series_id"));

        const std::string role_text = csv::lower(f[1]);
        Role role;
        if (role_text == "supply") {
            role = Role::Supply;
        } else if (role_text == "demand") {
            role = Role::Demand;
        } else {
            throw Error(ErrorCode::UnknownRole, line_error(line_no, "role `" + f[1] + "`"));
        }
        auto date = parse_date(f[5]);
        if (!date) throw Error(ErrorCode::MalformedRow, line_error(line_no, "bad date `" + f[5] + "`"));
        auto value = csv::parse_double(f[6]);
        if (!value) throw Error(ErrorCode::MalformedRow, line_error(line_no, "bad value `" + f[6] + "`"));
        if (*value < 0.0) throw Error(ErrorCode::NegativeValue, line_error(line_no, "value " + f[6]));

        auto [it, inserted] = out.try_emplace(f[0]);
        TimeSeries& s = it->second;
        if (inserted) {
            s.id = f[0];
            s.role = role;
            s.source = f[2];
            s.region = f[3];
            s.topic = f[4];
        } else if (s.role != role || s.source != f[2] || s.region != f[3] || s.topic != f[4]) {
            throw Error(ErrorCode::MalformedRow, line_error(line_no, "metadata differs from earlier rows of " + f[0]));
        }
        if (!seen[f[0]].insert(*date).second) {
            throw Error(ErrorCode::DuplicateTimestamp, line_error(line_no, f[0] + " already has " + f[5]));
        }
        s.points.push_back({*date, *value, false, false});
    }

    for (auto& [id, s] : out) {
        std::sort(s.points.begin(), s.points.end(), [](const auto& a, const auto& b) { return a.date < b.date; });
        s.resolution = infer_resolution(s.points);
        s = fill_gaps(std::move(s));
    }
    return out;
}

SeriesSet ingest_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    return ingest_csv(in);
}

void write_series_csv(const SeriesSet& series, std::ostream& out) {
    out << kSeriesHeader << '\n';
    for (const auto& [id, s] : series) {
        for (const auto& p : s.points) {
            fmt::print(out, "{},{},{},{},{},{},{}\n", csv::escape(id), to_string(s.role), csv::escape(s.source),
                       csv::escape(s.region), csv::escape(s.topic), format_date(p.date), p.value);
        }
    }
}

namespace {

int parse_int(std::string_view key, std::string_view value) {
    auto d = csv::parse_double(value);
    if (!d || std::floor(*d) != *d) {
        throw Error(ErrorCode::InvalidConfig, std::string(key) + ": expected an integer, got `" + std::string(value) + "`");
    }
    return static_cast<int>(*d);
}

double parse_real(std::string_view key, std::string_view value) {
    auto d = csv::parse_double(value);
    if (!d) throw Error(ErrorCode::InvalidConfig, std::string(key) + ": expected a number, got `" + std::string(value) + "`");
    return *d;
}

Date parse_config_date(std::string_view key, std::string_view value) {
    auto d = parse_date(csv::trim(value));
    if (!d) throw Error(ErrorCode::InvalidConfig, std::string(key) + ": expected YYYY-MM-DD, got `" + std::string(value) + "`");
    return *d;
}

}  // namespace

void PipelineConfig::set(std::string_view key, std::string_view raw) {
    const std::string value = csv::trim(raw);
    if (key == "alpha") {
        alpha = parse_real(key, value);
    } else if (key == "max_anoms") {
        max_anoms = parse_real(key, value);
    } else if (key == "trend_window") {
        trend_window = parse_int(key, value);
    } else if (key == "seasonal_period" || key == "period") {
        seasonal_period = parse_int(key, value);
    } else if (key == "inner_loops") {
        inner_loops = parse_int(key, value);
    } else if (key == "outer_loops") {
        outer_loops = parse_int(key, value);
    } else if (key == "gap_tolerance") {
        gap_tolerance = parse_int(key, value);
    } else if (key == "balance_epsilon" || key == "epsilon") {
        balance_epsilon = parse_real(key, value);
    } else if (key == "week_convention") {
        const std::string v = csv::lower(value);
        if (v == "iso" || v == "monday") {
            week_convention = WeekStart::Monday;
        } else if (v == "sunday") {
            week_convention = WeekStart::Sunday;
        } else {
            throw Error(ErrorCode::InvalidConfig, "week_convention must be iso or sunday");
        }
    } else if (key == "window_start" || key == "from") {
        window_start = parse_config_date(key, value);
    } else if (key == "window_end" || key == "to") {
        window_end = parse_config_date(key, value);
    } else if (key == "delta_cap") {
        delta_cap = parse_real(key, value);
    } else {
        throw Error(ErrorCode::InvalidConfig, "unknown config key `" + std::string(key) + "`");
    }
}

void PipelineConfig::validate() const {
    AnomalyConfig{alpha, max_anoms, {}}.validate();
    if (trend_window && *trend_window < 3) throw Error(ErrorCode::InvalidConfig, "trend_window must be >= 3");
    if (seasonal_period && (*seasonal_period < 0 || *seasonal_period == 1)) {
        throw Error(ErrorCode::InvalidPeriod, "seasonal_period must be 0 or >= 2");
    }
    if (inner_loops < 1 || outer_loops < 0) throw Error(ErrorCode::InvalidConfig, "bad loop counts");
    if (gap_tolerance < 0) throw Error(ErrorCode::InvalidConfig, "gap_tolerance must be >= 0");
    if (!(balance_epsilon >= 0.0)) throw Error(ErrorCode::InvalidConfig, "balance_epsilon must be >= 0");
    if (!(delta_cap > 0.0)) throw Error(ErrorCode::InvalidConfig, "delta_cap must be positive");
    if (window_start && window_end && !(*window_start < *window_end)) {
        throw Error(ErrorCode::InvalidConfig, "window_start must precede window_end");
    }
}

int PipelineConfig::period_for(Resolution r) const {
    return seasonal_period.value_or(r == Resolution::Daily ? 7 : 0);
}

int PipelineConfig::trend_window_for(Resolution r) const {
    return trend_window.value_or(r == Resolution::Daily ? 91 : 13);
}

PipelineConfig load_config(std::istream& in, PipelineConfig base) {
    std::string line;
    std::size_t line_no = 0;
    while (csv::read_line(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = csv::trim(line);
        if (t.empty()) continue;
        auto sep = t.find_first_of("=:");
        if (sep == std::string::npos) {
            throw Error(ErrorCode::InvalidConfig, "config line " + std::to_string(line_no) + ": expected key = value");
        }
        base.set(csv::trim(t.substr(0, sep)), t.substr(sep + 1));
    }
    return base;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open config " + path.string());
    return load_config(in, std::move(base));
}

std::map<Regime, std::size_t> AnalysisReport::regime_counts() const {
    std::map<Regime, std::size_t> counts;
    for (Regime r : {Regime::Void, Regime::Lack, Regime::Balance, Regime::Abundance, Regime::Overabundance}) {
        counts[r] = 0;
    }
    for (const auto& label : labels) ++counts[label.regime];
    return counts;
}

namespace {

SeriesProvenance provenance_of(const TimeSeries& s) {
    SeriesProvenance p;
    p.id = s.id;
    p.role = s.role;
    p.source = s.source;
    p.region = s.region;
    p.topic = s.topic;
    p.input_resolution = s.resolution;
    p.points = s.size();
    p.imputed = static_cast<std::size_t>(
        std::count_if(s.points.begin(), s.points.end(), [](const auto& pt) { return pt.imputed; }));
    p.transform = "none";
    return p;
}

}  // namespace

AnalysisReport run_analysis(const TimeSeries& supply_in, const TimeSeries& demand_in, const PipelineConfig& config) {
    config.validate();
    if (supply_in.role != Role::Supply) throw Error(ErrorCode::InvalidConfig, supply_in.id + " is not a supply series");
    if (demand_in.role != Role::Demand) throw Error(ErrorCode::InvalidConfig, demand_in.id + " is not a demand series");

    AnalysisReport report;
    report.config = config;
    report.supply = provenance_of(supply_in);
    report.demand = provenance_of(demand_in);

    const Date lo = config.window_start.value_or(Date::min());
    const Date hi = config.window_end.value_or(Date::max());
    TimeSeries supply = clip_window(supply_in, lo, hi);
    TimeSeries demand = clip_window(demand_in, lo, hi);
    validate(supply);
    validate(demand);

    if (supply.resolution == Resolution::Daily && demand.resolution == Resolution::Weekly) {
        TimeSeries weekly = aggregate_weekly(supply, config.week_convention);
        const auto before = weekly.points.size();
        std::erase_if(weekly.points, [](const auto& p) { return p.partial; });
        report.dropped_partial_weeks = before - weekly.points.size();
        if (weekly.points.empty()) {
            throw Error(ErrorCode::SeriesTooShort, supply.id + " has no complete week inside the window");
        }
        supply = normalize_weekly_0_100(weekly);
        report.supply.transform = "weekly_sum,normalize_0_100";
    } else if (supply.resolution == Resolution::Weekly && demand.resolution == Resolution::Daily) {
        throw Error(ErrorCode::ResolutionPairUnsupported, "weekly supply with daily demand");
    }
    report.resolution = supply.resolution;

    const auto supply_rescaled = rescale(supply);
    const auto demand_rescaled = rescale(demand);
    report.supply.expected_value = supply_rescaled.expected_value;
    report.demand.expected_value = demand_rescaled.expected_value;
    report.delta = compute_delta(supply_rescaled, demand_rescaled);

    StlConfig stl;
    stl.period = config.period_for(report.resolution);
    stl.trend_window = config.trend_window_for(report.resolution);
    stl.inner_loops = config.inner_loops;
    stl.outer_loops = config.outer_loops;
    report.period = stl.period;
    report.trend_window = stl.trend_window;
    report.decomposition = stl_decompose(report.delta.deltas(), stl);

    AnomalyConfig anomaly{config.alpha, config.max_anoms, {}};
    report.anomalies = sign_anomalies(detect_anomalies(report.decomposition, anomaly), report.delta);
    report.labels = classify_regimes(report.delta, report.anomalies, config.balance_epsilon);
    report.runs = persistence_runs(report.labels, config.gap_tolerance, report.resolution);
    report.persistence = persistence_summary(report.runs);
    return report;
}

AnalysisReport run_analysis(const SeriesSet& series, const std::string& supply_id, const std::string& demand_id,
                            const PipelineConfig& config) {
    auto s = series.find(supply_id);
    if (s == series.end()) throw Error(ErrorCode::UnknownSeries, "no series `" + supply_id + "`");
    auto d = series.find(demand_id);
    if (d == series.end()) throw Error(ErrorCode::UnknownSeries, "no series `" + demand_id + "`");
    return run_analysis(s->second, d->second, config);
}

std::optional<ReportFormat> parse_report_format(std::string_view text) {
    if (text == "json") return ReportFormat::Json;
    if (text == "csv") return ReportFormat::Csv;
    return std::nullopt;
}

namespace {

using nlohmann::ordered_json;

ordered_json optional_json(const auto& v) {
    if (v) return ordered_json(*v);
    return nullptr;
}

ordered_json config_json(const AnalysisReport& r) {
    const auto& c = r.config;
    return {
        {"alpha", c.alpha},
        {"max_anoms", c.max_anoms},
        {"trend_window", r.trend_window},
        {"seasonal_period", r.period},
        {"inner_loops", c.inner_loops},
        {"outer_loops", c.outer_loops},
        {"gap_tolerance", c.gap_tolerance},
        {"balance_epsilon", c.balance_epsilon},
        {"week_convention", std::string(to_string(c.week_convention))},
        {"window_start", c.window_start ? ordered_json(format_date(*c.window_start)) : ordered_json(nullptr)},
        {"window_end", c.window_end ? ordered_json(format_date(*c.window_end)) : ordered_json(nullptr)},
        {"delta_cap", c.delta_cap},
    };
}

ordered_json provenance_json(const SeriesProvenance& p) {
    return {
        {"id", p.id},
        {"role", std::string(to_string(p.role))},
        {"source", p.source},
        {"region", p.region},
        {"topic", p.topic},
        {"input_resolution", std::string(to_string(p.input_resolution))},
        {"points", p.points},
        {"imputed", p.imputed},
        {"transform", p.transform},
        {"expected_value", p.expected_value},
    };
}

ordered_json sign_summary_json(const SignSummary& s) {
    return {{"count", s.count}, {"mean_length", optional_json(s.mean_length)}, {"max_length", optional_json(s.max_length)}};
}

double capped(double delta, double cap) { return std::clamp(delta, -cap, cap); }

void emit_json(const AnalysisReport& r, std::ostream& out) {
    ordered_json j;
    j["format"] = "infodelta-report/1";
    j["config"] = config_json(r);
    j["inputs"] = {{"source", r.input}, {"supply", provenance_json(r.supply)}, {"demand", provenance_json(r.demand)}};
    j["resolution"] = std::string(to_string(r.resolution));
    j["persistence_unit"] = r.resolution == Resolution::Daily ? "day" : "week";
    // The two-unit tolerance is defined for daily data; weekly runs reuse it per week.
    j["weekly_persistence_extension"] = r.resolution == Resolution::Weekly;
    j["dropped_partial_weeks"] = r.dropped_partial_weeks;
    j["coverage"] = {{"common", r.delta.coverage.common},
                     {"supply_dropped", r.delta.coverage.supply_dropped},
                     {"demand_dropped", r.delta.coverage.demand_dropped}};
    const auto& a = r.anomalies;
    j["detection"] = {
        {"q1", a.q1},
        {"q3", a.q3},
        {"iqr", a.iqr},
        {"k", a.k},
        {"lower_limit", a.lower_limit},
        {"upper_limit", a.upper_limit},
        {"cap", a.cap},
        {"candidates", a.candidates},
        {"anomalies", a.anomaly_count()},
    };
    ordered_json regimes = ordered_json::object();
    for (const auto& [regime, n] : r.regime_counts()) regimes[std::string(to_string(regime))] = n;
    j["summary"] = {
        {"points", r.labels.size()},
        {"regimes", std::move(regimes)},
        {"persistence",
         {{"negative", sign_summary_json(r.persistence.negative)},
          {"positive", sign_summary_json(r.persistence.positive)}}},
    };
    ordered_json runs = ordered_json::array();
    for (const auto& run : r.runs) {
        runs.push_back({{"sign", std::string(to_string(run.sign))},
                        {"start", format_date(run.start)},
                        {"end", format_date(run.end)},
                        {"length", run.length},
                        {"bridged_gaps", run.bridged_gaps}});
    }
    j["runs"] = std::move(runs);
    ordered_json points = ordered_json::array();
    for (std::size_t i = 0; i < r.labels.size(); ++i) {
        const auto& dp = r.delta.points[i];
        const auto& ap = a.points[i];
        const auto& label = r.labels[i];
        points.push_back({
            {"date", format_date(dp.date)},
            {"supply_rescaled", dp.supply_rescaled},
            {"demand_rescaled", dp.demand_rescaled},
            {"delta", dp.delta},
            {"capped_delta", capped(dp.delta, r.config.delta_cap)},
            {"seasonal", ap.seasonal},
            {"trend", ap.trend},
            {"remainder", ap.remainder},
            {"band_lo", ap.recomposed_l1},
            {"band_hi", ap.recomposed_l2},
            {"is_anomaly", ap.is_anomaly},
            {"sign", std::string(to_string(ap.sign))},
            {"severity_rank", optional_json(ap.severity_rank)},
            {"regime", std::string(to_string(label.regime))},
        });
    }
    j["points"] = std::move(points);
    out << j.dump(2) << '\n';
}

void emit_csv(const AnalysisReport& r, std::ostream& out) {
    out << "date,delta,capped_delta,regime,is_anomaly,sign,band_lo,band_hi\n";
    for (std::size_t i = 0; i < r.labels.size(); ++i) {
        const auto& dp = r.delta.points[i];
        const auto& ap = r.anomalies.points[i];
        fmt::print(out, "{},{},{},{},{},{},{},{}\n", format_date(dp.date), dp.delta, capped(dp.delta, r.config.delta_cap),
                   to_string(r.labels[i].regime), ap.is_anomaly ? 1 : 0, to_string(ap.sign), ap.recomposed_l1,
                   ap.recomposed_l2);
    }
}

}  // namespace

void emit_report(const AnalysisReport& report, ReportFormat format, std::ostream& out) {
    if (format == ReportFormat::Json) {
        emit_json(report, out);
    } else {
        emit_csv(report, out);
    }
    if (!out) throw Error(ErrorCode::IoFailure, "failed writing report");
}

void emit_report(const AnalysisReport& report, ReportFormat format, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    emit_report(report, format, out);
}

ReportLabels read_report_labels(std::istream& in) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedRow, std::string("report is not valid JSON: ") + e.what());
    }
    try {
        ReportLabels out;
        out.resolution = j.at("resolution").get<std::string>() == "weekly" ? Resolution::Weekly : Resolution::Daily;
        const double epsilon = j.at("config").at("balance_epsilon").get<double>();
        for (const auto& p : j.at("points")) {
            RegimeLabel label;
            auto date = parse_date(p.at("date").get<std::string>());
            auto regime = parse_regime(p.at("regime").get<std::string>());
            if (!date || !regime) throw Error(ErrorCode::MalformedRow, "report point with bad date or regime");
            label.date = *date;
            label.regime = *regime;
            label.delta = p.at("delta").get<double>();
            label.epsilon = epsilon;
            label.macro_state = (*regime == Regime::Void || *regime == Regime::Overabundance) ? MacroState::Anomaly
                                                                                               : MacroState::Regular;
            out.labels.push_back(label);
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedRow, std::string("report is missing fields: ") + e.what());
    }
}

}  // namespace infodelta
