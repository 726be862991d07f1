#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "loadpat/calendar.hpp"
#include "loadpat/profile.hpp"
#include "loadpat/survey.hpp"

namespace loadpat {

// A load shape used on the days it selects. Empty selectors match every day.
struct PatternSpec {
    HourlyValues shape{};
    std::vector<DayType> days;
    std::vector<Season> seasons;
};

struct GroupSpec {
    std::string name;
    std::size_t households = 0;
    double amplitude_min = 1.0;
    double amplitude_max = 1.0;
    double noise = 0.0;  // Gaussian sd as a fraction of the household amplitude
    Date start{};
    std::size_t days = 0;
    std::vector<PatternSpec> patterns;
    std::optional<std::array<std::string, kAttributes>> survey;
};

struct GeneratorSpec {
    std::vector<GroupSpec> groups;
    SeasonMap seasons;
};

struct SyntheticData {
    ProfileDataset dataset;
    std::vector<int> group;    // per row
    std::vector<int> pattern;  // per row, global pattern index across groups
    std::vector<SurveyRecord> survey;
};

// Keys: groups[].{name, households, amplitude [lo, hi], noise, dates {start, days},
// template [24] | patterns[].{template, days, seasons}, survey {water, wall, floor_area, income}}.
GeneratorSpec parse_generator_spec(const nlohmann::json& j);

// Each household draws one amplitude uniformly from its group's range; every
// day gets the first matching pattern scaled by that amplitude plus noise,
// clipped at 0. Days no pattern selects are skipped.
SyntheticData synthesize_dataset(const GeneratorSpec& spec, std::uint64_t seed);

}  // namespace loadpat
