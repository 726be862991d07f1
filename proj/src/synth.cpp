#include "loadpat/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

#include "loadpat/errors.hpp"

namespace loadpat {

namespace {

HourlyValues parse_shape(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != kHours) throw ConfigError("template must be an array of 24 numbers");
    HourlyValues shape{};
    for (std::size_t h = 0; h < kHours; ++h) {
        shape[h] = j[h].get<double>();
        if (shape[h] < 0.0) throw ConfigError("template values must be non-negative");
    }
    return shape;
}

PatternSpec parse_pattern(const nlohmann::json& j) {
    PatternSpec p;
    p.shape = parse_shape(j.at("template"));
    for (const auto& d : j.value("days", nlohmann::json::array())) p.days.push_back(parse_daytype(d.get<std::string>()));
    for (const auto& s : j.value("seasons", nlohmann::json::array())) p.seasons.push_back(parse_season(s.get<std::string>()));
    return p;
}

bool selects(const PatternSpec& p, const TemporalAttributes& t) {
    bool day_ok = p.days.empty() || std::find(p.days.begin(), p.days.end(), t.daytype) != p.days.end();
    bool season_ok = p.seasons.empty() || std::find(p.seasons.begin(), p.seasons.end(), t.season) != p.seasons.end();
    return day_ok && season_ok;
}

}  // namespace

GeneratorSpec parse_generator_spec(const nlohmann::json& j) {
    GeneratorSpec spec;
    try {
        if (!j.contains("groups") || !j["groups"].is_array() || j["groups"].empty()) {
            throw ConfigError("generator spec needs a non-empty 'groups' list");
        }
        for (const auto& g : j["groups"]) {
            GroupSpec group;
            group.name = g.value("name", "g" + std::to_string(spec.groups.size()));
            group.households = g.at("households").get<std::size_t>();
            const auto& amp = g.at("amplitude");
            if (amp.is_array()) {
                group.amplitude_min = amp.at(0).get<double>();
                group.amplitude_max = amp.at(1).get<double>();
            } else {
                group.amplitude_min = group.amplitude_max = amp.get<double>();
            }
            group.noise = g.value("noise", 0.0);
            const auto& dates = g.at("dates");
            group.start = parse_date(dates.at("start").get<std::string>());
            group.days = dates.at("days").get<std::size_t>();
            if (g.contains("patterns")) {
                for (const auto& p : g["patterns"]) group.patterns.push_back(parse_pattern(p));
            } else {
                group.patterns.push_back(PatternSpec{parse_shape(g.at("template")), {}, {}});
            }
            if (g.contains("survey")) {
                std::array<std::string, kAttributes> values;
                for (auto a : kAllAttributes) {
                    auto v = g["survey"].at(std::string(to_string(a))).get<std::string>();
                    if (!in_vocabulary(a, v)) throw ConfigError("survey value '" + v + "' is not in the vocabulary");
                    values[static_cast<std::size_t>(a)] = v;
                }
                group.survey = values;
            }
            if (group.households == 0 || group.days == 0) throw ConfigError("group '" + group.name + "' is empty");
            if (group.patterns.empty()) throw ConfigError("group '" + group.name + "' has no patterns");
            if (group.amplitude_min < 0.0 || group.amplitude_max < group.amplitude_min) {
                throw ConfigError("group '" + group.name + "' has an invalid amplitude range");
            }
            if (group.noise < 0.0) throw ConfigError("noise must be non-negative");
            spec.groups.push_back(std::move(group));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("generator spec: ") + e.what());
    }
    return spec;
}

SyntheticData synthesize_dataset(const GeneratorSpec& spec, std::uint64_t seed) {
    if (spec.groups.empty()) throw ConfigError("generator spec has no groups");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    SyntheticData out;
    std::vector<DailyLoadProfile> profiles;
    int pattern_base = 0;
    for (std::size_t g = 0; g < spec.groups.size(); ++g) {
        const auto& group = spec.groups[g];
        std::uniform_real_distribution<double> amplitude(group.amplitude_min, group.amplitude_max);
        for (std::size_t h = 0; h < group.households; ++h) {
            char id[64];
            std::snprintf(id, sizeof id, "%s-%04zu", group.name.c_str(), h + 1);
            const double amp = group.amplitude_min == group.amplitude_max ? group.amplitude_min : amplitude(rng);
            if (group.survey) out.survey.push_back(SurveyRecord{id, *group.survey});

            auto day = std::chrono::sys_days{group.start};
            for (std::size_t d = 0; d < group.days; ++d, day += std::chrono::days{1}) {
                const Date date{day};
                const auto attrs = temporal_attributes(date, spec.seasons);
                auto it = std::find_if(group.patterns.begin(), group.patterns.end(),
                                       [&](const PatternSpec& p) { return selects(p, attrs); });
                if (it == group.patterns.end()) continue;

                DailyLoadProfile p{id, date, {}};
                for (std::size_t t = 0; t < kHours; ++t) {
                    double v = it->shape[t] * amp;
                    if (group.noise > 0.0) v += group.noise * amp * gauss(rng);
                    p.values[t] = std::max(v, 0.0);
                }
                profiles.push_back(std::move(p));
                out.group.push_back(static_cast<int>(g));
                out.pattern.push_back(pattern_base + static_cast<int>(it - group.patterns.begin()));
            }
        }
        pattern_base += static_cast<int>(group.patterns.size());
    }
    out.dataset = ProfileDataset(std::move(profiles));
    return out;
}

}  // namespace loadpat
