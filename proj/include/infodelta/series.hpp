#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "infodelta/date.hpp"

namespace infodelta {

enum class Role { Supply, Demand };
enum class Resolution { Daily, Weekly };

// Weekday that opens a week when aggregating daily data. Monday is ISO-8601;
// Sunday lines up with Google Trends weekly windows.
enum class WeekStart { Monday, Sunday };

std::string_view to_string(Role role);
std::string_view to_string(Resolution resolution);
std::string_view to_string(WeekStart start);

// Length of one resolution step in days.
inline int step_days(Resolution r) { return r == Resolution::Daily ? 1 : 7; }

struct SeriesPoint {
    Date date;
    double value = 0.0;
    bool imputed = false;  // filled by interpolation across a missing date
    bool partial = false;  // weekly bucket that covered fewer than seven days
};

// Timestamped non-negative counts for one (role, source, region, topic) stream.
struct TimeSeries {
    std::string id;
    Role role = Role::Supply;
    std::string source;
    std::string region;
    std::string topic;
    Resolution resolution = Resolution::Daily;
    std::vector<SeriesPoint> points;

    std::size_t size() const { return points.size(); }
    std::vector<double> values() const;
};

struct RescaledPoint {
    Date date;
    double value = 0.0;
};

// Series divided by its mean over the whole observation window.
struct RescaledSeries {
    std::string base_id;
    Resolution resolution = Resolution::Daily;
    double expected_value = 0.0;
    std::vector<RescaledPoint> points;

    std::size_t size() const { return points.size(); }
    std::vector<double> values() const;
};

struct DeltaPoint {
    Date date;
    double delta = 0.0;
    double supply_rescaled = 0.0;
    double demand_rescaled = 0.0;
};

// Timestamps present in only one parent series are dropped and counted here.
struct CoverageSummary {
    std::size_t common = 0;
    std::size_t supply_dropped = 0;
    std::size_t demand_dropped = 0;
};

struct DeltaSeries {
    std::string supply_id;
    std::string demand_id;
    Resolution resolution = Resolution::Daily;
    std::vector<DeltaPoint> points;
    CoverageSummary coverage;

    std::size_t size() const { return points.size(); }
    std::vector<double> deltas() const;
    std::vector<Date> dates() const;
};

// Throws InvalidSeries / NegativeValue unless timestamps are strictly
// increasing, one resolution step apart, and every value is finite and >= 0.
void validate(const TimeSeries& series);

// Sorts points and fills interior missing dates by linear interpolation
// between the neighbouring observations, marking them imputed. Nothing is
// extrapolated before the first or after the last observation.
TimeSeries fill_gaps(TimeSeries series);

// Restricts a series to [from, to] (inclusive).
TimeSeries clip_window(const TimeSeries& series, Date from, Date to);

RescaledSeries rescale(const TimeSeries& series);

DeltaSeries compute_delta(const RescaledSeries& supply, const RescaledSeries& demand);

// Sums daily values per week; each output point is dated by its week's first day.
TimeSeries aggregate_weekly(const TimeSeries& series, WeekStart start = WeekStart::Monday);

// floor(value / max * 100) for every week.
TimeSeries normalize_weekly_0_100(const TimeSeries& series);

}  // namespace infodelta
