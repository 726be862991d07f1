#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "loadpat/kmeans.hpp"
#include "loadpat/matrix.hpp"

namespace loadpat {

struct SomOptions {
    std::size_t epochs = 10;
};

struct SomResult {
    std::size_t side = 0;
    Matrix codebook;       // side*side rows, node (r, c) at row r*side + c
    std::vector<int> bmu;  // per data row
};

// Batch SOM on a square grid. The Gaussian neighbourhood width shrinks
// linearly from side/2 to 1 across the epochs; codebook starts from randomly
// chosen data rows.
SomResult fit_som(const Matrix& data, std::size_t side, std::uint64_t seed, const SomOptions& options = {});

struct SomKmeansResult {
    SomResult som;
    KmeansResult kmeans;      // fitted on the codebook
    std::vector<int> labels;  // per data row: k-means cluster of its BMU
};

// Throws ConfigError unless side*side > k.
SomKmeansResult fit_som_kmeans(const Matrix& data, std::size_t side, std::size_t k, std::uint64_t seed,
                               const SomOptions& som_options = {}, const KmeansOptions& kmeans_options = {});

}  // namespace loadpat
