#pragma once

// Simulated device clock helpers. Timestamps are milliseconds since the epoch in
// device-local time; there is no time zone handling.

#include "smsctl/preprocess.hpp"

#include <chrono>
#include <string>
#include <string_view>

namespace smsctl::calendar {

inline constexpr Timestamp ms_per_minute = 60'000;
inline constexpr Timestamp ms_per_hour = 60 * ms_per_minute;
inline constexpr Timestamp ms_per_day = 24 * ms_per_hour;

Timestamp at(std::chrono::year_month_day date, int hour = 0, int minute = 0, int second = 0);
std::chrono::year_month_day date_of(Timestamp t);
Timestamp time_of_day(Timestamp t);

// YYYY-MM-DDTHH:MM:SS
std::string format_iso(Timestamp t);
// YYYY-MM-DDTHH:MM:SS.mmm
std::string format_iso_ms(Timestamp t);

// Integer milliseconds, YYYY-MM-DD, YYYY-MM-DDTHH:MM or YYYY-MM-DDTHH:MM:SS.
// Throws ParseError.
Timestamp parse_time(std::string_view s);

// YYYY-MM-DD or MM-DD (year ignored). Throws ParseError.
std::chrono::month_day parse_month_day(std::string_view s);

// The anniversary in a given year; Feb 29 falls back to Feb 28 in common years.
std::chrono::year_month_day anniversary_in(std::chrono::year y, std::chrono::month_day md);

// First anniversary at the given time of day strictly after `after`.
Timestamp next_anniversary(std::chrono::month_day md, Timestamp time_of_day, Timestamp after);

} // namespace smsctl::calendar
