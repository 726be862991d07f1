#include "loadpat/amc.hpp"

#include <set>
#include <utility>

namespace loadpat {

HouseholdStats compute_amc(const ProfileDataset& dataset, std::string_view household_id) {
    const auto& rows = dataset.rows_of(household_id);
    HouseholdStats stats;
    stats.household_id = std::string(household_id);
    std::set<std::pair<int, unsigned>> months;
    double kwh = 0.0;
    for (auto r : rows) {
        const auto& p = dataset[r];
        kwh += total_demand(p.values) * kNominalVolts / 1000.0;
        months.emplace(static_cast<int>(p.date.year()), static_cast<unsigned>(p.date.month()));
    }
    stats.n_days = rows.size();
    stats.n_months = months.size();
    stats.amc_kwh = kwh / static_cast<double>(months.size());
    return stats;
}

std::vector<HouseholdStats> compute_all_amc(const ProfileDataset& dataset) {
    std::vector<HouseholdStats> out;
    out.reserve(dataset.households().size());
    for (const auto& h : dataset.households()) out.push_back(compute_amc(dataset, h));
    return out;
}

}  // namespace loadpat
