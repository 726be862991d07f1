#include "loadpat/kmeans.hpp"

#include <limits>
#include <random>

#include "loadpat/errors.hpp"

namespace loadpat {

int nearest_centroid(std::span<const double> x, const Matrix& centroids) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.rows(); ++c) {
        double d = squared_distance(x, centroids.row(c));
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

namespace {

Matrix plus_plus_init(const Matrix& data, std::size_t k, std::mt19937_64& rng) {
    const auto n = data.rows();
    Matrix centroids;
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    centroids.push_row(data.row(pick(rng)));

    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(data.row(i), centroids.row(0));
    while (centroids.rows() < k) {
        double total = 0.0;
        for (double v : d2) total += v;
        std::size_t chosen = 0;
        if (total > 0.0) {
            std::uniform_real_distribution<double> u(0.0, total);
            double target = u(rng);
            double acc = 0.0;
            chosen = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc > target && d2[i] > 0.0) {
                    chosen = i;
                    break;
                }
            }
        } else {
            chosen = pick(rng);
        }
        centroids.push_row(data.row(chosen));
        const auto last = centroids.row(centroids.rows() - 1);
        for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(data.row(i), last));
    }
    return centroids;
}

double assign(const Matrix& data, const Matrix& centroids, std::vector<int>& labels) {
    double inertia = 0.0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
        labels[i] = nearest_centroid(data.row(i), centroids);
        inertia += squared_distance(data.row(i), centroids.row(static_cast<std::size_t>(labels[i])));
    }
    return inertia;
}

Matrix update(const Matrix& data, const std::vector<int>& labels, const Matrix& previous) {
    const auto k = previous.rows();
    const auto dim = data.cols();
    Matrix sums(k, dim);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < data.rows(); ++i) {
        auto c = static_cast<std::size_t>(labels[i]);
        ++counts[c];
        auto row = data.row(i);
        for (std::size_t j = 0; j < dim; ++j) sums(c, j) += row[j];
    }

    std::vector<bool> taken(data.rows(), false);
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] > 0) {
            for (std::size_t j = 0; j < dim; ++j) sums(c, j) /= static_cast<double>(counts[c]);
            continue;
        }
        // Empty cluster: move it onto the point farthest from its own centroid.
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < data.rows(); ++i) {
            if (taken[i]) continue;
            double d = squared_distance(data.row(i), previous.row(static_cast<std::size_t>(labels[i])));
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }
        taken[far] = true;
        auto dst = sums.row(c);
        auto src = data.row(far);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    return sums;
}

KmeansResult lloyd(const Matrix& data, std::size_t k, std::mt19937_64& rng, const KmeansOptions& options) {
    KmeansResult result;
    result.centroids = plus_plus_init(data, k, rng);
    result.labels.assign(data.rows(), 0);
    result.inertia = assign(data, result.centroids, result.labels);
    result.inertia_trace.push_back(result.inertia);

    std::vector<int> next_labels(data.rows());
    for (std::size_t it = 0; it < options.max_iter; ++it) {
        Matrix next = update(data, result.labels, result.centroids);
        double inertia = assign(data, next, next_labels);
        const bool stable = next_labels == result.labels;
        const double previous = result.inertia;

        result.centroids = std::move(next);
        result.labels.swap(next_labels);
        result.inertia = inertia;
        result.inertia_trace.push_back(inertia);
        result.iterations = it + 1;

        if (stable) break;
        if (previous - inertia <= options.tol * previous) break;
    }
    return result;
}

}  // namespace

KmeansResult fit_kmeans(const Matrix& data, std::size_t k, std::uint64_t seed, const KmeansOptions& options) {
    if (k == 0) throw ConfigError("k-means needs at least one cluster");
    if (k > data.rows()) {
        throw ConfigError("k-means asked for " + std::to_string(k) + " clusters on " + std::to_string(data.rows()) +
                          " rows");
    }
    std::mt19937_64 rng(seed);
    KmeansResult best;
    for (std::size_t run = 0; run < std::max<std::size_t>(options.n_init, 1); ++run) {
        auto result = lloyd(data, k, rng, options);
        if (run == 0 || result.inertia < best.inertia) best = std::move(result);
    }
    return best;
}

}  // namespace loadpat
