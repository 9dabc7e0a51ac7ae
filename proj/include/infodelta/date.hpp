#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace infodelta {

using Date = std::chrono::sys_days;

// Parses a strict ISO-8601 calendar date (YYYY-MM-DD).
std::optional<Date> parse_date(std::string_view text);

std::string format_date(Date date);

inline Date make_date(int y, unsigned m, unsigned d) {
    return Date{std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d}};
}

inline long days_between(Date from, Date to) { return (to - from).count(); }

}  // namespace infodelta
