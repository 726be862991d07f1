#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "loadpat/amc.hpp"
#include "loadpat/matrix.hpp"
#include "loadpat/profile.hpp"

namespace loadpat {

enum class BinScheme { None, Amc, IntegralKmeans };

std::string_view to_string(BinScheme s);
BinScheme parse_bin_scheme(std::string_view name);

struct BinAssignment {
    BinScheme scheme = BinScheme::None;
    std::size_t n_bins = 1;
    std::vector<int> labels;  // per row, in [1, n_bins]

    std::vector<std::size_t> counts() const;  // index 0 is bin 1
};

// Half-open AMC intervals [lower_k, lower_{k+1}); the last bin is unbounded above.
struct AmcBinEdges {
    std::vector<double> lower;

    // 0 | 1.5 | 50.5 | 150.5 | 400.5 | 600.5 | 1200.5 | 2500.5: integer kWh labels
    // 0-1, 2-50, 51-150, ... 2501-4000, with values above 4000 kept in bin 8.
    static AmcBinEdges tariff_defaults();

    int bin_of(double amc_kwh) const;
    std::size_t size() const { return lower.size(); }
};

BinAssignment single_bin(std::size_t rows);

// Every row takes the bin of its household's AMC. Throws DataError if a
// household has no stats.
BinAssignment assign_amc_bins(const ProfileDataset& dataset, std::span<const HouseholdStats> stats,
                              const AmcBinEdges& edges = AmcBinEdges::tariff_defaults());

// 25-dim integral feature: cumulative sum of the unit-normed profile followed
// by the raw daily peak. An all-zero profile maps to the zero vector.
std::vector<double> integral_feature(const HourlyValues& values);

// k-means on the stacked integral features; bins are numbered in ascending
// order of centroid peak.
BinAssignment integral_kmeans_bins(const ProfileDataset& dataset, std::size_t n_bins, std::uint64_t seed);

}  // namespace loadpat
