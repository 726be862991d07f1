#pragma once

#include <array>
#include <string>
#include <string_view>

#include "loadpat/profile.hpp"

namespace loadpat {

enum class DayType { Mon = 0, Tue, Wed, Thu, Fri, Sat, Sun };
enum class Season { Winter = 0, Summer };

inline constexpr std::size_t kDayTypes = 7;
inline constexpr std::size_t kMonths = 12;
inline constexpr std::size_t kSeasons = 2;

std::string_view to_string(DayType d);
std::string_view to_string(Season s);
DayType parse_daytype(std::string_view name);
Season parse_season(std::string_view name);

// Month (1-12) to season. The default puts May-Aug in winter, matching the
// southern-hemisphere calendar of the metering data.
class SeasonMap {
public:
    SeasonMap();
    explicit SeasonMap(std::array<Season, kMonths> by_month) : by_month_(by_month) {}

    Season operator()(unsigned month) const { return by_month_.at(month - 1); }

private:
    std::array<Season, kMonths> by_month_;
};

struct TemporalAttributes {
    DayType daytype;
    unsigned month;
    Season season;

    bool operator==(const TemporalAttributes&) const = default;
};

TemporalAttributes temporal_attributes(const Date& date, const SeasonMap& seasons = SeasonMap{});

// Strict YYYY-MM-DD. Throws DataError on anything else or an invalid date.
Date parse_date(std::string_view text);
std::string format_date(const Date& date);

}  // namespace loadpat
