#include "infodelta/series.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "infodelta/error.hpp"

namespace infodelta {

std::string_view to_string(Role role) { return role == Role::Supply ? "supply" : "demand"; }

std::string_view to_string(Resolution resolution) {
    return resolution == Resolution::Daily ? "daily" : "weekly";
}

std::string_view to_string(WeekStart start) { return start == WeekStart::Monday ? "iso" : "sunday"; }

std::vector<double> TimeSeries::values() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.value);
    return out;
}

std::vector<double> RescaledSeries::values() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.value);
    return out;
}

std::vector<double> DeltaSeries::deltas() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.delta);
    return out;
}

std::vector<Date> DeltaSeries::dates() const {
    std::vector<Date> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.date);
    return out;
}

void validate(const TimeSeries& series) {
    const int step = step_days(series.resolution);
    for (std::size_t i = 0; i < series.points.size(); ++i) {
        const auto& p = series.points[i];
        if (!std::isfinite(p.value)) {
            throw Error(ErrorCode::InvalidSeries, series.id + ": non-finite value at " + format_date(p.date));
        }
        if (p.value < 0.0) {
            throw Error(ErrorCode::NegativeValue, series.id + ": negative value at " + format_date(p.date));
        }
        if (i > 0 && days_between(series.points[i - 1].date, p.date) != step) {
            throw Error(ErrorCode::InvalidSeries,
                        series.id + ": timestamps not contiguous at " + format_date(p.date));
        }
    }
}

TimeSeries fill_gaps(TimeSeries series) {
    auto& pts = series.points;
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.date < b.date; });
    const int step = step_days(series.resolution);
    std::vector<SeriesPoint> filled;
    filled.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i > 0) {
            const auto& prev = pts[i - 1];
            const long gap = days_between(prev.date, pts[i].date);
            if (gap <= 0) {
                throw Error(ErrorCode::DuplicateTimestamp,
                            series.id + ": repeated date " + format_date(pts[i].date));
            }
            if (gap % step != 0) {
                throw Error(ErrorCode::InvalidSeries,
                            series.id + ": date " + format_date(pts[i].date) + " is off the weekly grid");
            }
            const long steps = gap / step;
            for (long k = 1; k < steps; ++k) {
                const double frac = static_cast<double>(k) / static_cast<double>(steps);
                SeriesPoint p;
                p.date = prev.date + std::chrono::days{k * step};
                p.value = prev.value + frac * (pts[i].value - prev.value);
                p.imputed = true;
                filled.push_back(p);
            }
        }
        filled.push_back(pts[i]);
    }
    pts = std::move(filled);
    return series;
}

TimeSeries clip_window(const TimeSeries& series, Date from, Date to) {
    TimeSeries out = series;
    out.points.clear();
    for (const auto& p : series.points) {
        if (p.date >= from && p.date <= to) out.points.push_back(p);
    }
    return out;
}

RescaledSeries rescale(const TimeSeries& series) {
    if (series.points.size() < 2) {
        throw Error(ErrorCode::EmptySeries, series.id + ": need at least 2 points to rescale");
    }
    long double sum = 0.0L;
    for (const auto& p : series.points) sum += p.value;
    const double mean = static_cast<double>(sum / static_cast<long double>(series.points.size()));
    if (!(mean > 0.0)) {
        throw Error(ErrorCode::ZeroMeanSeries, series.id + ": mean is zero");
    }
    RescaledSeries out;
    out.base_id = series.id;
    out.resolution = series.resolution;
    out.expected_value = mean;
    out.points.reserve(series.points.size());
    for (const auto& p : series.points) out.points.push_back({p.date, p.value / mean});
    return out;
}

DeltaSeries compute_delta(const RescaledSeries& supply, const RescaledSeries& demand) {
    if (supply.resolution != demand.resolution) {
        throw Error(ErrorCode::ResolutionMismatch,
                    supply.base_id + " is " + std::string(to_string(supply.resolution)) + ", " +
                        demand.base_id + " is " + std::string(to_string(demand.resolution)));
    }
    DeltaSeries out;
    out.supply_id = supply.base_id;
    out.demand_id = demand.base_id;
    out.resolution = supply.resolution;

    std::size_t i = 0, j = 0;
    const auto& s = supply.points;
    const auto& d = demand.points;
    while (i < s.size() && j < d.size()) {
        if (s[i].date < d[j].date) {
            ++out.coverage.supply_dropped;
            ++i;
        } else if (d[j].date < s[i].date) {
            ++out.coverage.demand_dropped;
            ++j;
        } else {
            out.points.push_back({s[i].date, s[i].value - d[j].value, s[i].value, d[j].value});
            ++i;
            ++j;
        }
    }
    out.coverage.supply_dropped += s.size() - i;
    out.coverage.demand_dropped += d.size() - j;
    out.coverage.common = out.points.size();
    if (out.points.size() < 2) {
        throw Error(ErrorCode::NoOverlap, supply.base_id + " and " + demand.base_id +
                                              " share " + std::to_string(out.points.size()) +
                                              " timestamps (need at least 2)");
    }
    return out;
}

namespace {

Date week_start_of(Date day, WeekStart start) {
    const std::chrono::weekday wd{day};
    const unsigned offset = start == WeekStart::Monday ? wd.iso_encoding() - 1 : wd.c_encoding();
    return day - std::chrono::days{offset};
}

}  // namespace

TimeSeries aggregate_weekly(const TimeSeries& series, WeekStart start) {
    if (series.resolution == Resolution::Weekly) {
        throw Error(ErrorCode::AlreadyWeekly, series.id + " is already weekly");
    }
    TimeSeries out = series;
    out.resolution = Resolution::Weekly;
    out.points.clear();

    struct Bucket {
        double sum = 0.0;
        int days = 0;
        bool imputed = false;
    };
    std::map<Date, Bucket> buckets;
    for (const auto& p : series.points) {
        auto& b = buckets[week_start_of(p.date, start)];
        b.sum += p.value;
        ++b.days;
        b.imputed = b.imputed || p.imputed;
    }
    for (const auto& [date, b] : buckets) {
        SeriesPoint p;
        p.date = date;
        p.value = b.sum;
        p.imputed = b.imputed;
        p.partial = b.days < 7;
        out.points.push_back(p);
    }
    return out;
}

TimeSeries normalize_weekly_0_100(const TimeSeries& series) {
    if (series.resolution != Resolution::Weekly) {
        throw Error(ErrorCode::ResolutionMismatch, series.id + ": 0-100 normalization needs weekly data");
    }
    double max = 0.0;
    for (const auto& p : series.points) max = std::max(max, p.value);
    if (!(max > 0.0)) {
        throw Error(ErrorCode::ZeroMaxSeries, series.id + ": maximum weekly value is zero");
    }
    TimeSeries out = series;
    for (auto& p : out.points) {
        // The small offset absorbs representation error on exact multiples (e.g. 0.29 * 100).
        p.value = std::clamp(std::floor(p.value / max * 100.0 + 1e-9), 0.0, 100.0);
    }
    return out;
}

}  // namespace infodelta
