#include "smsctl/calendar.hpp"

#include "smsctl/error.hpp"
#include "smsctl/text.hpp"

#include <charconv>
#include <cstdio>

namespace smsctl::calendar {

using namespace std::chrono;

namespace {

int parse_int(std::string_view s, std::string_view what)
{
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
        throw ParseError(0, "bad " + std::string(what) + " in time '" + std::string(s) + "'");
    return v;
}

year_month_day checked_date(int y, int m, int d)
{
    year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok())
        throw ParseError(0, "invalid calendar date");
    return ymd;
}

} // namespace

Timestamp at(year_month_day date, int hour, int minute, int second)
{
    const auto days = sys_days(date).time_since_epoch().count();
    return static_cast<Timestamp>(days) * ms_per_day + hour * ms_per_hour + minute * ms_per_minute + second * 1000;
}

year_month_day date_of(Timestamp t)
{
    auto days = t / ms_per_day;
    if (t % ms_per_day < 0)
        --days;
    return year_month_day{sys_days{std::chrono::days{days}}};
}

Timestamp time_of_day(Timestamp t)
{
    auto r = t % ms_per_day;
    return r < 0 ? r + ms_per_day : r;
}

std::string format_iso(Timestamp t)
{
    const auto d = date_of(t);
    const auto tod = time_of_day(t) / 1000;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lld", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()),
                  static_cast<long long>(tod / 3600), static_cast<long long>(tod / 60 % 60),
                  static_cast<long long>(tod % 60));
    return buf;
}

std::string format_iso_ms(Timestamp t)
{
    char buf[8];
    std::snprintf(buf, sizeof buf, ".%03lld", static_cast<long long>(time_of_day(t) % 1000));
    return format_iso(t) + buf;
}

Timestamp parse_time(std::string_view s)
{
    s = text::trim(s);
    if (s.find('-', 1) == std::string_view::npos) {
        Timestamp v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
            throw ParseError(0, "bad time '" + std::string(s) + "'");
        return v;
    }
    const auto t = s.find('T');
    const auto date_part = s.substr(0, t);
    const auto parts = text::split(date_part, '-');
    if (parts.size() != 3)
        throw ParseError(0, "bad date '" + std::string(date_part) + "'");
    const auto ymd = checked_date(parse_int(parts[0], "year"), parse_int(parts[1], "month"), parse_int(parts[2], "day"));
    int h = 0, m = 0, sec = 0;
    if (t != std::string_view::npos) {
        const auto hms = text::split(s.substr(t + 1), ':');
        if (hms.size() < 2 || hms.size() > 3)
            throw ParseError(0, "bad time of day in '" + std::string(s) + "'");
        h = parse_int(hms[0], "hour");
        m = parse_int(hms[1], "minute");
        if (hms.size() == 3)
            sec = parse_int(hms[2], "second");
        if (h > 23 || m > 59 || sec > 59)
            throw ParseError(0, "time of day out of range in '" + std::string(s) + "'");
    }
    return at(ymd, h, m, sec);
}

month_day parse_month_day(std::string_view s)
{
    s = text::trim(s);
    auto parts = text::split(s, '-');
    if (parts.size() == 3)
        parts.erase(parts.begin());
    if (parts.size() != 2)
        throw ParseError(0, "bad birthday '" + std::string(s) + "'");
    month_day md{month{static_cast<unsigned>(parse_int(parts[0], "month"))},
                 day{static_cast<unsigned>(parse_int(parts[1], "day"))}};
    if (!md.ok())
        throw ParseError(0, "bad birthday '" + std::string(s) + "'");
    return md;
}

year_month_day anniversary_in(year y, month_day md)
{
    year_month_day ymd{y, md.month(), md.day()};
    if (!ymd.ok())
        ymd = year_month_day{y / md.month() / last};
    return ymd;
}

Timestamp next_anniversary(month_day md, Timestamp tod, Timestamp after)
{
    auto y = date_of(after).year();
    while (true) {
        const auto candidate = at(anniversary_in(y, md)) + tod;
        if (candidate > after)
            return candidate;
        ++y;
    }
}

} // namespace smsctl::calendar
