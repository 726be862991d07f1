#include "loadpat/calendar.hpp"

#include <charconv>
#include <cstdio>

#include "loadpat/errors.hpp"

namespace loadpat {

namespace {
constexpr std::array<std::string_view, kDayTypes> kDayNames{"Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"};
}

std::string_view to_string(DayType d) { return kDayNames[static_cast<std::size_t>(d)]; }

std::string_view to_string(Season s) { return s == Season::Winter ? "winter" : "summer"; }

DayType parse_daytype(std::string_view name) {
    for (std::size_t i = 0; i < kDayTypes; ++i) {
        if (kDayNames[i] == name) return static_cast<DayType>(i);
    }
    throw ConfigError("unknown day type '" + std::string(name) + "'");
}

Season parse_season(std::string_view name) {
    if (name == "winter") return Season::Winter;
    if (name == "summer") return Season::Summer;
    throw ConfigError("unknown season '" + std::string(name) + "'");
}

SeasonMap::SeasonMap() {
    by_month_.fill(Season::Summer);
    for (unsigned m = 5; m <= 8; ++m) by_month_[m - 1] = Season::Winter;
}

TemporalAttributes temporal_attributes(const Date& date, const SeasonMap& seasons) {
    using namespace std::chrono;
    // weekday::iso_encoding() is 1 for Monday through 7 for Sunday.
    const auto iso = weekday{sys_days{date}}.iso_encoding();
    const auto month = static_cast<unsigned>(date.month());
    return {static_cast<DayType>(iso - 1), month, seasons(month)};
}

Date parse_date(std::string_view text) {
    auto bad = [&] { return DataError("bad date '" + std::string(text) + "', expected YYYY-MM-DD"); };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw bad();
    auto num = [&](std::size_t pos, std::size_t len) {
        int v = 0;
        auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, v);
        if (ec != std::errc{} || ptr != text.data() + pos + len) throw bad();
        return v;
    };
    using namespace std::chrono;
    Date d{year{num(0, 4)}, month{static_cast<unsigned>(num(5, 2))}, day{static_cast<unsigned>(num(8, 2))}};
    if (!d.ok()) throw bad();
    return d;
}

std::string format_date(const Date& date) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

}  // namespace loadpat
