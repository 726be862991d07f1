#include "loadpat/experiment.hpp"

#include <algorithm>
#include <map>

#include "loadpat/amc.hpp"
#include "loadpat/errors.hpp"

namespace loadpat {

std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::Kmeans: return "kmeans";
        case Algorithm::Som: return "som";
        case Algorithm::SomKmeans: return "som_kmeans";
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view name) {
    for (auto a : {Algorithm::Kmeans, Algorithm::Som, Algorithm::SomKmeans}) {
        if (to_string(a) == name) return a;
    }
    throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
    const bool uses_kmeans = algorithm != Algorithm::Som;
    const bool uses_som = algorithm != Algorithm::Kmeans;
    if (uses_kmeans && m < 2) throw ConfigError("m must be at least 2 for k-means");
    if (uses_som && s < 2) throw ConfigError("s must be at least 2 for SOM");
    if (algorithm == Algorithm::SomKmeans && s * s <= m) {
        throw ConfigError("SOM+k-means needs s^2 > m (s=" + std::to_string(s) + ", m=" + std::to_string(m) + ")");
    }
    if (prebinning == BinScheme::IntegralKmeans && n_bins < 1) throw ConfigError("n_bins must be at least 1");
}

std::size_t ClusterModel::clustered_rows() const {
    return static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](int l) { return l >= 0; }));
}

std::vector<std::size_t> ClusterModel::member_counts() const {
    std::vector<std::size_t> counts(n_clusters, 0);
    for (int l : labels) {
        if (l >= 0) ++counts[static_cast<std::size_t>(l)];
    }
    return counts;
}

namespace {

struct BinFit {
    Matrix centroids;
    std::vector<int> labels;
};

BinFit cluster_bin(const Matrix& data, const ExperimentConfig& config, std::uint64_t seed) {
    const auto k = std::min(config.m, data.rows());
    switch (config.algorithm) {
        case Algorithm::Kmeans: {
            auto fit = fit_kmeans(data, k, seed, config.kmeans);
            return {std::move(fit.centroids), std::move(fit.labels)};
        }
        case Algorithm::Som: {
            auto fit = fit_som(data, config.s, seed, config.som);
            return {std::move(fit.codebook), std::move(fit.bmu)};
        }
        case Algorithm::SomKmeans: {
            auto fit = fit_som_kmeans(data, config.s, std::min(k, config.s * config.s - 1), seed, config.som,
                                      config.kmeans);
            return {std::move(fit.kmeans.centroids), std::move(fit.labels)};
        }
    }
    throw ConfigError("unknown algorithm");
}

}  // namespace

ClusterModel run_experiment(const ProfileDataset& dataset, const ExperimentConfig& config) {
    config.validate();
    if (dataset.empty()) throw DataError("cannot cluster an empty dataset");

    ClusterModel model;
    model.config = config;
    model.labels.assign(dataset.size(), -1);
    model.normalized = Matrix(dataset.size(), kHours);

    std::vector<std::size_t> retained;
    for (std::size_t r = 0; r < dataset.size(); ++r) {
        const auto& values = dataset[r].values;
        if (!config.keep_zeros && is_all_zero(values)) {
            ++model.removed_zero;
            continue;
        }
        auto norm = normalize(values, config.normalization);
        if (!norm) {
            if (!config.keep_zeros) {
                ++model.dropped_degenerate;
                continue;
            }
            norm = HourlyValues{};
        }
        std::copy(norm->begin(), norm->end(), model.normalized.row(r).begin());
        retained.push_back(r);
    }
    if (retained.empty()) throw DataError("no rows left to cluster after filtering");

    // Bins are computed on the retained rows; AMC always uses whole-household history.
    const auto kept = dataset.subset(retained);
    BinAssignment bins;
    switch (config.prebinning) {
        case BinScheme::None: bins = single_bin(kept.size()); break;
        case BinScheme::Amc: {
            const auto stats = compute_all_amc(dataset);
            bins = assign_amc_bins(kept, stats, config.amc_edges);
            break;
        }
        case BinScheme::IntegralKmeans: bins = integral_kmeans_bins(kept, config.n_bins, config.seed); break;
    }

    std::map<int, std::vector<std::size_t>> rows_by_bin;
    for (std::size_t i = 0; i < retained.size(); ++i) rows_by_bin[bins.labels[i]].push_back(retained[i]);

    int next_cluster = 0;
    for (auto& [bin, rows] : rows_by_bin) {
        Matrix data;
        for (auto r : rows) data.push_row(model.normalized.row(r));
        auto fit = cluster_bin(data, config, config.seed + static_cast<std::uint64_t>(bin));

        BinModel bm;
        bm.bin = bin;
        bm.first_cluster = next_cluster;
        bm.rows = std::move(rows);
        bm.local_labels = std::move(fit.labels);
        bm.centroids = std::move(fit.centroids);
        for (std::size_t i = 0; i < bm.rows.size(); ++i) model.labels[bm.rows[i]] = next_cluster + bm.local_labels[i];
        next_cluster += static_cast<int>(bm.centroids.rows());
        model.bins.push_back(std::move(bm));
    }
    model.n_clusters = static_cast<std::size_t>(next_cluster);
    return model;
}

std::vector<Rdlp> build_rdlps(const ClusterModel& model, const ProfileDataset& dataset) {
    if (model.labels.size() != dataset.size()) throw DataError("model labels do not cover the dataset");
    std::vector<Rdlp> sums(model.n_clusters);
    for (std::size_t r = 0; r < dataset.size(); ++r) {
        const int l = model.labels[r];
        if (l < 0) continue;
        auto& acc = sums[static_cast<std::size_t>(l)];
        ++acc.member_count;
        for (std::size_t t = 0; t < kHours; ++t) acc.values[t] += dataset[r].values[t];
    }
    std::vector<Rdlp> out;
    for (std::size_t c = 0; c < sums.size(); ++c) {
        if (sums[c].member_count == 0) continue;
        Rdlp rdlp = sums[c];
        rdlp.cluster = static_cast<int>(c);
        for (double& v : rdlp.values) v /= static_cast<double>(rdlp.member_count);
        out.push_back(rdlp);
    }
    return out;
}

}  // namespace loadpat
