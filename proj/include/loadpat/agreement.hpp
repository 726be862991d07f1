#pragma once

#include <span>

namespace loadpat {

// Adjusted Rand index between two labelings of the same rows. Rows where
// either label is negative are ignored. Two single-cluster labelings score 1.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

}  // namespace loadpat
