#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "loadpat/binning.hpp"
#include "loadpat/kmeans.hpp"
#include "loadpat/matrix.hpp"
#include "loadpat/normalize.hpp"
#include "loadpat/profile.hpp"
#include "loadpat/som.hpp"

namespace loadpat {

enum class Algorithm { Kmeans, Som, SomKmeans };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

struct ExperimentConfig {
    Algorithm algorithm = Algorithm::Kmeans;
    std::size_t m = 2;  // clusters per bin (k-means stages)
    std::size_t s = 2;  // SOM side length
    Normalization normalization = Normalization::None;
    BinScheme prebinning = BinScheme::None;
    std::size_t n_bins = 8;  // integral k-means only; AMC uses its edge count
    bool keep_zeros = true;
    std::uint64_t seed = 0;
    KmeansOptions kmeans;
    SomOptions som;
    AmcBinEdges amc_edges = AmcBinEdges::tariff_defaults();

    // Throws ConfigError: m >= 2 with k-means, s >= 2 with SOM, s^2 > m for SOM+k-means.
    void validate() const;
};

// Clusters of one pre-binning partition. Global id of local cluster c is
// first_cluster + c.
struct BinModel {
    int bin = 1;
    std::vector<std::size_t> rows;  // dataset rows clustered in this bin
    Matrix centroids;               // normalized space, one row per local cluster
    std::vector<int> local_labels;  // parallel to rows
    int first_cluster = 0;
};

struct ClusterModel {
    ExperimentConfig config;
    std::vector<BinModel> bins;
    std::vector<int> labels;  // per dataset row; -1 for dropped rows
    std::size_t n_clusters = 0;
    std::size_t removed_zero = 0;        // filtered by keep_zeros=false
    std::size_t dropped_degenerate = 0;  // normalization denominator was zero
    Matrix normalized;                   // per dataset row; zeros for dropped rows

    std::size_t clustered_rows() const;
    std::vector<std::size_t> member_counts() const;  // per global cluster
};

// Filters zeros, normalizes, pre-bins and clusters every bin independently.
// Degenerate normalized rows are dropped unless keep_zeros, in which case they
// enter the clustering as all-zero vectors.
ClusterModel run_experiment(const ProfileDataset& dataset, const ExperimentConfig& config);

struct Rdlp {
    int cluster = 0;
    HourlyValues values{};
    std::size_t member_count = 0;
};

// Elementwise mean of the raw member profiles of every non-empty cluster.
std::vector<Rdlp> build_rdlps(const ClusterModel& model, const ProfileDataset& dataset);

}  // namespace loadpat
