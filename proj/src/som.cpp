#include "loadpat/som.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "loadpat/errors.hpp"

namespace loadpat {

namespace {

std::vector<int> best_matching_units(const Matrix& data, const Matrix& codebook) {
    std::vector<int> bmu(data.rows());
    for (std::size_t i = 0; i < data.rows(); ++i) bmu[i] = nearest_centroid(data.row(i), codebook);
    return bmu;
}

}  // namespace

SomResult fit_som(const Matrix& data, std::size_t side, std::uint64_t seed, const SomOptions& options) {
    if (data.empty()) throw ConfigError("SOM needs at least one row");
    if (side < 2) throw ConfigError("SOM side length must be at least 2");
    const auto nodes = side * side;
    const auto dim = data.cols();

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> order(data.rows());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    SomResult som;
    som.side = side;
    for (std::size_t n = 0; n < nodes; ++n) som.codebook.push_row(data.row(order[n % order.size()]));

    const double sigma_start = static_cast<double>(side) / 2.0;
    const double sigma_end = 1.0;
    const auto epochs = std::max<std::size_t>(options.epochs, 1);

    std::vector<double> weight(nodes);
    Matrix sums(nodes, dim);
    for (std::size_t e = 0; e < epochs; ++e) {
        const double frac = epochs == 1 ? 1.0 : static_cast<double>(e) / static_cast<double>(epochs - 1);
        const double sigma = sigma_start + (sigma_end - sigma_start) * frac;
        const auto bmu = best_matching_units(data, som.codebook);

        // Accumulate data per BMU first; the neighbourhood then mixes node totals.
        Matrix node_sum(nodes, dim);
        std::vector<double> node_count(nodes, 0.0);
        for (std::size_t i = 0; i < data.rows(); ++i) {
            auto b = static_cast<std::size_t>(bmu[i]);
            node_count[b] += 1.0;
            auto row = data.row(i);
            for (std::size_t j = 0; j < dim; ++j) node_sum(b, j) += row[j];
        }

        for (std::size_t n = 0; n < nodes; ++n) {
            const double rn = static_cast<double>(n / side), cn = static_cast<double>(n % side);
            double w_total = 0.0;
            std::fill(sums.row(n).begin(), sums.row(n).end(), 0.0);
            for (std::size_t b = 0; b < nodes; ++b) {
                if (node_count[b] == 0.0) continue;
                const double dr = rn - static_cast<double>(b / side), dc = cn - static_cast<double>(b % side);
                const double h = std::exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma));
                w_total += h * node_count[b];
                for (std::size_t j = 0; j < dim; ++j) sums(n, j) += h * node_sum(b, j);
            }
            weight[n] = w_total;
        }
        for (std::size_t n = 0; n < nodes; ++n) {
            if (!(weight[n] > 0.0)) continue;
            for (std::size_t j = 0; j < dim; ++j) som.codebook(n, j) = sums(n, j) / weight[n];
        }
    }
    som.bmu = best_matching_units(data, som.codebook);
    return som;
}

SomKmeansResult fit_som_kmeans(const Matrix& data, std::size_t side, std::size_t k, std::uint64_t seed,
                               const SomOptions& som_options, const KmeansOptions& kmeans_options) {
    if (side * side <= k) {
        throw ConfigError("SOM+k-means needs s^2 > m (s=" + std::to_string(side) + ", m=" + std::to_string(k) + ")");
    }
    SomKmeansResult out;
    out.som = fit_som(data, side, seed, som_options);
    out.kmeans = fit_kmeans(out.som.codebook, k, seed, kmeans_options);
    out.labels.reserve(data.rows());
    for (int b : out.som.bmu) out.labels.push_back(out.kmeans.labels[static_cast<std::size_t>(b)]);
    return out;
}

}  // namespace loadpat
