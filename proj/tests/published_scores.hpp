#pragma once

#include <array>
#include <string>
#include <vector>

#include "loadpat/matrix.hpp"
#include "loadpat/scoring.hpp"

// Published scoring matrix of seven top runs: ranks per measure (zero-profile
// row absent), printed totals. The 0-1 run of experiment 4 prints its peak
// demand error rank as 5.05; 5.50 is the value consistent with its total.
namespace published {

inline const std::vector<std::string> kExperiments{"1-unit", "3-01", "4-unit", "4-01", "5-unit", "6-unit", "7-unit"};

// Rows in Measure order from ThresholdRatio onwards.
inline const std::array<std::array<double, 7>, 8> kRanks{{
    {1, 5, 3, 5, 7, 4, 1},
    {1, 7, 4, 6, 2, 5, 3},
    {5.50, 5.50, 2.00, 5.50, 4.00, 3.00, 1.50},
    {5.00, 6.25, 2.00, 6.00, 3.25, 3.75, 1.00},
    {5, 7, 2, 6, 3, 4, 1},
    {5, 6, 1, 6, 3, 4, 2},
    {4, 6, 1, 6, 3, 5, 2},
    {4, 6, 1, 6, 3, 5, 2},
}};

inline const std::array<double, 7> kTotals{150.0, 214.5, 65.0, 205.0, 117.5, 143.5, 57.0};

inline loadpat::Matrix rank_matrix(double exp4_01_peak_error = 5.50) {
    loadpat::Matrix m(7, loadpat::kMeasures, 1.0);
    for (std::size_t r = 0; r < kRanks.size(); ++r) {
        for (std::size_t e = 0; e < 7; ++e) m(e, r + 1) = kRanks[r][e];
    }
    m(3, static_cast<std::size_t>(loadpat::Measure::PeakDemandError)) = exp4_01_peak_error;
    return m;
}

}  // namespace published
