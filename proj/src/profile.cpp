#include "loadpat/profile.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "loadpat/calendar.hpp"
#include "loadpat/errors.hpp"
#include "text_util.hpp"

namespace loadpat {

bool is_valid_profile(const HourlyValues& values) {
    return std::all_of(values.begin(), values.end(),
                       [](double v) { return std::isfinite(v) && v >= 0.0; });
}

bool is_all_zero(const HourlyValues& values) {
    return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
}

double total_demand(const HourlyValues& values) {
    return std::accumulate(values.begin(), values.end(), 0.0);
}

double peak_demand(const HourlyValues& values) {
    return *std::max_element(values.begin(), values.end());
}

ProfileDataset::ProfileDataset(std::vector<DailyLoadProfile> profiles) : profiles_(std::move(profiles)) {
    for (std::size_t row = 0; row < profiles_.size(); ++row) {
        const auto& p = profiles_[row];
        if (!p.date.ok()) throw DataError("invalid date", row + 1);
        if (!is_valid_profile(p.values)) throw DataError("hourly values must be finite and non-negative", row + 1);
        auto [it, inserted] = index_.try_emplace(p.household_id);
        if (inserted) households_.push_back(p.household_id);
        it->second.push_back(row);
    }
}

bool ProfileDataset::has_household(std::string_view id) const {
    return index_.find(std::string(id)) != index_.end();
}

const std::vector<std::size_t>& ProfileDataset::rows_of(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) throw DataError("unknown household '" + std::string(id) + "'");
    return it->second;
}

ProfileDataset ProfileDataset::subset(std::span<const std::size_t> rows) const {
    std::vector<DailyLoadProfile> out;
    out.reserve(rows.size());
    for (auto r : rows) out.push_back(profiles_.at(r));
    return ProfileDataset(std::move(out));
}

ProfileDataset read_profiles(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || detail::trim(line).empty()) throw DataError("empty profile file");
    if (detail::split(line, ',').size() != kHours + 2) {
        throw DataError("header must name household_id, date and 24 hourly columns");
    }

    std::vector<DailyLoadProfile> profiles;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (detail::trim(line).empty()) continue;
        auto fields = detail::split(line, ',');
        if (fields.size() != kHours + 2) {
            throw DataError("expected 26 fields, got " + std::to_string(fields.size()), row);
        }
        DailyLoadProfile p;
        p.household_id = std::string(detail::trim(fields[0]));
        if (p.household_id.empty()) throw DataError("empty household_id", row);
        try {
            p.date = parse_date(detail::trim(fields[1]));
        } catch (const DataError& e) {
            throw DataError(e.what(), row);
        }
        for (std::size_t h = 0; h < kHours; ++h) {
            auto v = detail::parse_double(fields[h + 2]);
            if (!v) throw DataError("non-numeric value in column v" + std::to_string(h), row);
            if (!std::isfinite(*v) || *v < 0.0) throw DataError("negative or non-finite value in column v" + std::to_string(h), row);
            p.values[h] = *v;
        }
        profiles.push_back(std::move(p));
    }
    if (profiles.empty()) throw DataError("profile file has no data rows");
    return ProfileDataset(std::move(profiles));
}

ProfileDataset load_profiles(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return read_profiles(in);
}

void write_profiles(std::ostream& out, const ProfileDataset& dataset) {
    out << "household_id,date";
    for (std::size_t h = 0; h < kHours; ++h) out << ",v" << h;
    out << '\n';
    for (const auto& p : dataset.profiles()) {
        out << p.household_id << ',' << format_date(p.date);
        for (double v : p.values) out << ',' << detail::format_double(v);
        out << '\n';
    }
}

void save_profiles(const std::filesystem::path& path, const ProfileDataset& dataset) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    write_profiles(out, dataset);
}

}  // namespace loadpat
