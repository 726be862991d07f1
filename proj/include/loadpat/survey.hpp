#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace loadpat {

// Socio-demographic attributes used by the customer archetype table.
enum class Attribute { Water = 0, Wall, FloorArea, Income };
inline constexpr std::size_t kAttributes = 4;
inline constexpr std::array<Attribute, kAttributes> kAllAttributes{
    Attribute::Water, Attribute::Wall, Attribute::FloorArea, Attribute::Income};

std::string_view to_string(Attribute a);
Attribute parse_attribute(std::string_view name);

// Closed vocabulary of one attribute.
std::span<const std::string_view> vocabulary(Attribute a);
bool in_vocabulary(Attribute a, std::string_view value);

struct SurveyRecord {
    std::string household_id;
    std::array<std::string, kAttributes> values;  // indexed by Attribute

    const std::string& operator[](Attribute a) const { return values[static_cast<std::size_t>(a)]; }
};

// Allowed values per attribute; attributes not present are unconstrained.
using SocioFilter = std::map<Attribute, std::set<std::string>>;

// Named archetypes: rural, informal, township, lower_middle, upper_middle.
SocioFilter expert_archetype(std::string_view name);
std::vector<std::string_view> expert_archetype_names();

// Throws DataError for out-of-vocabulary values (naming the value and row).
std::vector<SurveyRecord> read_survey(std::istream& in);
std::vector<SurveyRecord> load_survey(const std::filesystem::path& path);
void write_survey(std::ostream& out, std::span<const SurveyRecord> records);

}  // namespace loadpat
