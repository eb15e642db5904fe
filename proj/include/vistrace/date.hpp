#pragma once

#include <charconv>
#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace vistrace {

using Date = std::chrono::year_month_day;

/// Parses a strict ISO-8601 `YYYY-MM-DD` string into a calendar-checked
/// date. Returns nullopt on any syntactic or calendar violation
/// (2023-02-30 is rejected, not normalized).
inline std::optional<Date> parse_iso_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    auto digits = [](std::string_view part, int& out) {
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
        return ec == std::errc() && ptr == part.data() + part.size();
    };
    int y = 0, m = 0, d = 0;
    if (!digits(s.substr(0, 4), y) || !digits(s.substr(5, 2), m) || !digits(s.substr(8, 2), d))
        return std::nullopt;
    Date ymd = std::chrono::year{y} / std::chrono::month{static_cast<unsigned>(m)} /
               std::chrono::day{static_cast<unsigned>(d)};
    if (!ymd.ok()) return std::nullopt;
    return ymd;
}

inline std::string format_iso_date(Date d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

inline std::chrono::sys_days to_sys_days(Date d) { return std::chrono::sys_days{d}; }

/// Whole days from `from` to `to`; negative when `to` precedes `from`.
inline long days_between(Date from, Date to) {
    return (to_sys_days(to) - to_sys_days(from)).count();
}

inline Date today_utc() {
    return Date{std::chrono::floor<std::chrono::days>(std::chrono::system_clock::now())};
}

}  // namespace vistrace
