#include "loadpat/survey.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "loadpat/errors.hpp"
#include "text_util.hpp"

namespace loadpat {

namespace {

constexpr std::array<std::string_view, 5> kWater{"river", "dam", "street taps", "tap in yard", "tap in house"};
constexpr std::array<std::string_view, 8> kWall{"daub",     "mud",      "clay",   "corr.iron",
                                                 "zinc",     "asbestos", "blocks", "brick"};
constexpr std::array<std::string_view, 4> kFloor{"0-50", "50-80", "80-150", "150-250"};
constexpr std::array<std::string_view, 5> kIncome{"R0-R1.8k", "R1.8k-R3.2k", "R3.2k-R7.8k", "R7.8k-R11.6k",
                                                  "R19k-R24.5k"};

struct NamedArchetype {
    std::string_view name;
    std::array<std::vector<std::string>, kAttributes> values;
};

const std::vector<NamedArchetype>& archetype_table() {
    static const std::vector<NamedArchetype> table{
        {"rural", {{{"river", "dam"}, {"daub", "mud", "clay"}, {"0-50"}, {"R0-R1.8k"}}}},
        {"informal", {{{"street taps", "tap in yard"}, {"corr.iron", "zinc"}, {"0-50"}, {"R1.8k-R3.2k"}}}},
        {"township", {{{"tap in house"}, {"asbestos", "blocks", "brick"}, {"50-80"}, {"R3.2k-R7.8k"}}}},
        {"lower_middle", {{{"tap in house"}, {"asbestos", "blocks", "brick"}, {"80-150"}, {"R7.8k-R11.6k"}}}},
        {"upper_middle", {{{"tap in house"}, {"brick"}, {"150-250"}, {"R19k-R24.5k"}}}},
    };
    return table;
}

}  // namespace

std::string_view to_string(Attribute a) {
    switch (a) {
        case Attribute::Water: return "water";
        case Attribute::Wall: return "wall";
        case Attribute::FloorArea: return "floor_area";
        case Attribute::Income: return "income";
    }
    return "?";
}

Attribute parse_attribute(std::string_view name) {
    for (auto a : kAllAttributes) {
        if (to_string(a) == name) return a;
    }
    throw ConfigError("unknown survey attribute '" + std::string(name) + "'");
}

std::span<const std::string_view> vocabulary(Attribute a) {
    switch (a) {
        case Attribute::Water: return kWater;
        case Attribute::Wall: return kWall;
        case Attribute::FloorArea: return kFloor;
        case Attribute::Income: return kIncome;
    }
    return {};
}

bool in_vocabulary(Attribute a, std::string_view value) {
    auto vocab = vocabulary(a);
    return std::find(vocab.begin(), vocab.end(), value) != vocab.end();
}

SocioFilter expert_archetype(std::string_view name) {
    for (const auto& entry : archetype_table()) {
        if (entry.name != name) continue;
        SocioFilter filter;
        for (auto a : kAllAttributes) {
            const auto& vals = entry.values[static_cast<std::size_t>(a)];
            filter[a] = std::set<std::string>(vals.begin(), vals.end());
        }
        return filter;
    }
    throw ConfigError("unknown archetype '" + std::string(name) + "'");
}

std::vector<std::string_view> expert_archetype_names() {
    std::vector<std::string_view> names;
    for (const auto& entry : archetype_table()) names.push_back(entry.name);
    return names;
}

std::vector<SurveyRecord> read_survey(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || detail::trim(line).empty()) throw DataError("empty survey file");
    std::vector<SurveyRecord> records;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (detail::trim(line).empty()) continue;
        auto fields = detail::split(line, ',');
        if (fields.size() != kAttributes + 1) {
            throw DataError("expected 5 fields, got " + std::to_string(fields.size()), row);
        }
        SurveyRecord rec;
        rec.household_id = std::string(detail::trim(fields[0]));
        for (auto a : kAllAttributes) {
            auto i = static_cast<std::size_t>(a);
            auto value = detail::trim(fields[i + 1]);
            if (!in_vocabulary(a, value)) {
                throw DataError("value '" + std::string(value) + "' is not in the " + std::string(to_string(a)) +
                                    " vocabulary",
                                row);
            }
            rec.values[i] = std::string(value);
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<SurveyRecord> load_survey(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return read_survey(in);
}

void write_survey(std::ostream& out, std::span<const SurveyRecord> records) {
    out << "household_id,water,wall,floor_band,income_band\n";
    for (const auto& r : records) {
        out << r.household_id;
        for (const auto& v : r.values) out << ',' << v;
        out << '\n';
    }
}

}  // namespace loadpat
