#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "loadpat/profile.hpp"

namespace loadpat {

// Nominal supply voltage used to turn metered amperes into energy.
inline constexpr double kNominalVolts = 230.0;

struct HouseholdStats {
    std::string household_id;
    double amc_kwh = 0.0;  // average monthly consumption
    std::size_t n_days = 0;
    std::size_t n_months = 0;  // distinct (year, month) pairs observed
};

// Sum of 230 * h[t] / 1000 kWh over every observed hour, divided by the number
// of distinct observed calendar months.
HouseholdStats compute_amc(const ProfileDataset& dataset, std::string_view household_id);

// One entry per household, in ProfileDataset::households() order.
std::vector<HouseholdStats> compute_all_amc(const ProfileDataset& dataset);

}  // namespace loadpat
