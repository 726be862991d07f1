#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "loadpat/matrix.hpp"

namespace loadpat {

struct KmeansOptions {
    std::size_t max_iter = 300;
    double tol = 1e-6;  // relative inertia change
    std::size_t n_init = 1;
};

struct KmeansResult {
    Matrix centroids;
    std::vector<int> labels;
    double inertia = 0.0;
    std::size_t iterations = 0;
    std::vector<double> inertia_trace;  // inertia after each assignment step
};

// Index of the nearest row of `centroids`; ties go to the lowest index.
int nearest_centroid(std::span<const double> x, const Matrix& centroids);

// Lloyd iteration from k-means++ seeding. An emptied cluster is moved to the
// point farthest from its current centroid. Stops when assignments are stable,
// the relative inertia change drops below tol, or after max_iter iterations.
// Throws ConfigError when k is 0 or exceeds the number of rows.
KmeansResult fit_kmeans(const Matrix& data, std::size_t k, std::uint64_t seed, const KmeansOptions& options = {});

}  // namespace loadpat
