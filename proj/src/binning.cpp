#include "loadpat/binning.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "loadpat/errors.hpp"
#include "loadpat/kmeans.hpp"
#include "loadpat/normalize.hpp"

namespace loadpat {

std::string_view to_string(BinScheme s) {
    switch (s) {
        case BinScheme::None: return "none";
        case BinScheme::Amc: return "amc";
        case BinScheme::IntegralKmeans: return "integral_kmeans";
    }
    return "?";
}

BinScheme parse_bin_scheme(std::string_view name) {
    for (auto s : {BinScheme::None, BinScheme::Amc, BinScheme::IntegralKmeans}) {
        if (to_string(s) == name) return s;
    }
    throw ConfigError("unknown pre-binning scheme '" + std::string(name) + "'");
}

std::vector<std::size_t> BinAssignment::counts() const {
    std::vector<std::size_t> out(n_bins, 0);
    for (int b : labels) ++out.at(static_cast<std::size_t>(b - 1));
    return out;
}

AmcBinEdges AmcBinEdges::tariff_defaults() {
    return {{0.0, 1.5, 50.5, 150.5, 400.5, 600.5, 1200.5, 2500.5}};
}

int AmcBinEdges::bin_of(double amc_kwh) const {
    // Number of lower edges <= value; values below the first edge land in bin 1.
    auto it = std::upper_bound(lower.begin(), lower.end(), amc_kwh);
    return std::max(1, static_cast<int>(it - lower.begin()));
}

BinAssignment single_bin(std::size_t rows) {
    return {BinScheme::None, 1, std::vector<int>(rows, 1)};
}

BinAssignment assign_amc_bins(const ProfileDataset& dataset, std::span<const HouseholdStats> stats,
                              const AmcBinEdges& edges) {
    if (edges.size() == 0 || !std::is_sorted(edges.lower.begin(), edges.lower.end())) {
        throw ConfigError("AMC bin edges must be a non-empty ascending list");
    }
    std::unordered_map<std::string, int> bin_of_household;
    for (const auto& s : stats) bin_of_household[s.household_id] = edges.bin_of(s.amc_kwh);

    BinAssignment out{BinScheme::Amc, edges.size(), {}};
    out.labels.reserve(dataset.size());
    for (std::size_t r = 0; r < dataset.size(); ++r) {
        auto it = bin_of_household.find(dataset[r].household_id);
        if (it == bin_of_household.end()) {
            throw DataError("no AMC statistics for household '" + dataset[r].household_id + "'", r + 1);
        }
        out.labels.push_back(it->second);
    }
    return out;
}

std::vector<double> integral_feature(const HourlyValues& values) {
    std::vector<double> feature(kHours + 1, 0.0);
    if (auto unit = normalize(values, Normalization::Unit)) {
        std::partial_sum(unit->begin(), unit->end(), feature.begin());
        feature[kHours] = peak_demand(values);
    }
    return feature;
}

BinAssignment integral_kmeans_bins(const ProfileDataset& dataset, std::size_t n_bins, std::uint64_t seed) {
    if (dataset.empty()) throw DataError("cannot pre-bin an empty dataset");
    if (n_bins == 0) throw ConfigError("n_bins must be at least 1");
    Matrix features;
    for (const auto& p : dataset.profiles()) features.push_row(integral_feature(p.values));

    const auto k = std::min(n_bins, dataset.size());
    auto fit = fit_kmeans(features, k, seed);

    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return fit.centroids(a, kHours) < fit.centroids(b, kHours);
    });
    std::vector<int> bin_of_cluster(k);
    for (std::size_t rank = 0; rank < k; ++rank) bin_of_cluster[order[rank]] = static_cast<int>(rank + 1);

    BinAssignment out{BinScheme::IntegralKmeans, n_bins, {}};
    out.labels.reserve(dataset.size());
    for (int label : fit.labels) out.labels.push_back(bin_of_cluster[static_cast<std::size_t>(label)]);
    return out;
}

}  // namespace loadpat
