#pragma once

#include <optional>
#include <string_view>

#include "loadpat/profile.hpp"

namespace loadpat {

enum class Normalization { None, Unit, Deminning, ZeroOne, SaNorm };

std::string_view to_string(Normalization n);
Normalization parse_normalization(std::string_view name);

// Returns nullopt when the denominator is zero (all-zero vector for unit,
// zero_one and sa_norm; constant vector for deminning).
//   unit:      y / ||y||_2
//   deminning: (y - min y) / ||y - min y||_2
//   zero_one:  y / max y
//   sa_norm:   y / mean y
std::optional<HourlyValues> normalize(const HourlyValues& values, Normalization method);

struct FilterResult {
    ProfileDataset dataset;
    std::vector<std::size_t> kept_rows;  // source row of each output row
    std::size_t removed = 0;
};

// keep_zeros=false drops rows whose 24 values are all zero.
FilterResult filter_zeros(const ProfileDataset& dataset, bool keep_zeros);

}  // namespace loadpat
