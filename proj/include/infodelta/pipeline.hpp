#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "infodelta/anomaly.hpp"
#include "infodelta/regimes.hpp"
#include "infodelta/series.hpp"
#include "infodelta/stl.hpp"

namespace infodelta {

using SeriesSet = std::map<std::string, TimeSeries>;

// Long-format input: `series_id,role,source,region,topic,date,value`.
// Weekly resolution is inferred when every gap between dates is a multiple
// of seven days; interior missing dates are interpolated.
SeriesSet ingest_csv(std::istream& in);
SeriesSet ingest_csv(const std::filesystem::path& path);

// Writes series in the ingest format (imputed points included).
void write_series_csv(const SeriesSet& series, std::ostream& out);

struct PipelineConfig {
    double alpha = 0.05;
    double max_anoms = 0.10;
    std::optional<int> trend_window;     // default 91 daily, 13 weekly
    std::optional<int> seasonal_period;  // default 7 daily, 0 weekly
    int inner_loops = 2;
    int outer_loops = 0;
    int gap_tolerance = 2;
    double balance_epsilon = 0.5;
    WeekStart week_convention = WeekStart::Monday;
    std::optional<Date> window_start;
    std::optional<Date> window_end;
    double delta_cap = 10.0;  // visualisation clamp for capped_delta only

    // Applies one `key = value` setting; throws InvalidConfig on unknown keys or bad values.
    void set(std::string_view key, std::string_view value);
    void validate() const;

    int period_for(Resolution r) const;
    int trend_window_for(Resolution r) const;
};

// Flat `key = value` document; `#` starts a comment.
PipelineConfig load_config(std::istream& in, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});

struct SeriesProvenance {
    std::string id;
    Role role = Role::Supply;
    std::string source;
    std::string region;
    std::string topic;
    Resolution input_resolution = Resolution::Daily;
    std::size_t points = 0;
    std::size_t imputed = 0;
    std::string transform;  // "none" or "weekly_sum,normalize_0_100"
    double expected_value = 0.0;
};

struct AnalysisReport {
    PipelineConfig config;
    int period = 0;
    int trend_window = 0;
    std::string input;  // provenance label, typically the input path
    SeriesProvenance supply;
    SeriesProvenance demand;
    Resolution resolution = Resolution::Daily;
    std::size_t dropped_partial_weeks = 0;
    DeltaSeries delta;
    Decomposition decomposition;
    AnomalyResult anomalies;
    std::vector<RegimeLabel> labels;
    std::vector<PersistenceRun> runs;
    PersistenceSummary persistence;

    std::map<Regime, std::size_t> regime_counts() const;
};

// rescale -> delta -> decomposition -> detection -> sign -> regimes -> persistence.
// Daily supply paired with weekly demand is summed into weeks (partial weeks
// dropped) and normalized to 0-100 first.
AnalysisReport run_analysis(const TimeSeries& supply, const TimeSeries& demand, const PipelineConfig& config);
AnalysisReport run_analysis(const SeriesSet& series, const std::string& supply_id, const std::string& demand_id,
                            const PipelineConfig& config);

enum class ReportFormat { Json, Csv };

std::optional<ReportFormat> parse_report_format(std::string_view text);

void emit_report(const AnalysisReport& report, ReportFormat format, std::ostream& out);
void emit_report(const AnalysisReport& report, ReportFormat format, const std::filesystem::path& path);

// Labels recovered from a JSON report, for persistence and credibility joins.
struct ReportLabels {
    Resolution resolution = Resolution::Daily;
    std::vector<RegimeLabel> labels;
};

ReportLabels read_report_labels(std::istream& in);

}  // namespace infodelta
