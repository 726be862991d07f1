#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "json.hpp"
#include "loadpat/calendar.hpp"
#include "loadpat/profile.hpp"

namespace fixtures {

inline loadpat::DailyLoadProfile profile(std::string id, std::string_view date, loadpat::HourlyValues v) {
    return {std::move(id), loadpat::parse_date(date), v};
}

inline loadpat::HourlyValues constant(double v) {
    loadpat::HourlyValues h;
    h.fill(v);
    return h;
}

inline loadpat::HourlyValues bump(int centre, double height = 1.0, double base = 0.1) {
    loadpat::HourlyValues h;
    for (int t = 0; t < 24; ++t) h[t] = base + (std::abs(t - centre) <= 1 ? height : 0.0);
    return h;
}

inline std::vector<double> as_vector(const loadpat::HourlyValues& v) { return {v.begin(), v.end()}; }

inline nlohmann::json load_json(const std::filesystem::path& p) {
    std::ifstream in(p);
    return nlohmann::json::parse(in);
}

inline std::filesystem::path source_dir() { return LOADPAT_SOURCE_DIR; }

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("loadpat_" + name + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace fixtures
