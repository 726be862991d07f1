#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "loadpat/matrix.hpp"

namespace loadpat {

struct ClusterModel;

struct SilhouetteOptions {
    std::size_t exact_below = 20000;  // rows; at or above this a uniform sample is scored
    std::size_t sample_size = 5000;
    std::uint64_t seed = 0;
};

// Mean over rows of (b - a) / max(a, b), Euclidean distance. Members of a
// singleton cluster score 0, as does a row with a = b = 0. Labels may be any
// non-negative ids; at least two distinct labels are required.
double silhouette_index(const Matrix& data, std::span<const int> labels, const SilhouetteOptions& options = {});

// Mean over clusters of max_j (disp_i + disp_j) / d(c_i, c_j), where disp is
// the mean member distance to the centroid. Throws std::domain_error for
// coincident centroids.
double davies_bouldin_index(const Matrix& data, std::span<const int> labels);

// sqrt(mean_k d_k^2) where d_k is the RMS member distance to centroid k.
double mean_index_adequacy(const Matrix& data, std::span<const int> labels);

// (dbi * mia) / silhouette when all three are > 0, nullopt otherwise.
std::optional<double> ix_score(double dbi, double mia, double silhouette);

struct BinIx {
    std::optional<double> ix;
    std::size_t n_bin = 0;
};

// log(sum_bin ix_bin * n_bin / N), natural log. nullopt if any ix is undefined.
// Throws std::invalid_argument if the bin sizes do not sum to N.
std::optional<double> ci_score(std::span<const BinIx> bins, std::size_t total);

struct BinScores {
    int bin = 1;
    std::size_t n_bin = 0;
    std::size_t clusters = 0;
    std::optional<double> dbi;
    std::optional<double> mia;
    std::optional<double> silhouette;
    std::optional<double> ix;
};

struct InternalScores {
    std::vector<BinScores> bins;
    std::optional<double> ci;
};

// Scores every bin in the normalized space the model was clustered in.
InternalScores evaluate_internal(const ClusterModel& model, const SilhouetteOptions& options = {});

}  // namespace loadpat
