#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace loadpat {

inline constexpr std::size_t kHours = 24;

using HourlyValues = std::array<double, kHours>;
using Date = std::chrono::year_month_day;

// One household's mean hourly consumption (amperes as metered) for one day.
struct DailyLoadProfile {
    std::string household_id;
    Date date;
    HourlyValues values{};
};

bool is_valid_profile(const HourlyValues& values);
bool is_all_zero(const HourlyValues& values);

double total_demand(const HourlyValues& values);
double peak_demand(const HourlyValues& values);

// Ordered, immutable collection of daily load profiles with a household index.
// Row order is the order of construction and is never changed.
class ProfileDataset {
public:
    ProfileDataset() = default;
    // Throws DataError if any profile violates the value invariants.
    explicit ProfileDataset(std::vector<DailyLoadProfile> profiles);

    std::size_t size() const noexcept { return profiles_.size(); }
    bool empty() const noexcept { return profiles_.empty(); }

    const DailyLoadProfile& operator[](std::size_t row) const { return profiles_[row]; }
    std::span<const DailyLoadProfile> profiles() const noexcept { return profiles_; }

    // Households in order of first appearance.
    const std::vector<std::string>& households() const noexcept { return households_; }
    bool has_household(std::string_view id) const;
    // Row ids of one household, ascending. Throws DataError for an unknown id.
    const std::vector<std::size_t>& rows_of(std::string_view id) const;

    // New dataset holding the given rows, in the given order.
    ProfileDataset subset(std::span<const std::size_t> rows) const;

private:
    std::vector<DailyLoadProfile> profiles_;
    std::vector<std::string> households_;
    std::unordered_map<std::string, std::vector<std::size_t>> index_;
};

// Reads `household_id,date,v0,...,v23` rows after a mandatory header line.
ProfileDataset read_profiles(std::istream& in);
ProfileDataset load_profiles(const std::filesystem::path& path);

void write_profiles(std::ostream& out, const ProfileDataset& dataset);
void save_profiles(const std::filesystem::path& path, const ProfileDataset& dataset);

}  // namespace loadpat
