#include "loadpat/validity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include "loadpat/experiment.hpp"

namespace loadpat {

namespace {

// Relabels arbitrary ids to 0..k-1 in order of first appearance.
std::vector<std::size_t> compact_labels(std::span<const int> labels, std::size_t& k) {
    std::map<int, std::size_t> ids;
    std::vector<std::size_t> out;
    out.reserve(labels.size());
    for (int l : labels) {
        if (l < 0) throw std::invalid_argument("cluster labels must be non-negative");
        auto [it, inserted] = ids.try_emplace(l, ids.size());
        out.push_back(it->second);
    }
    k = ids.size();
    return out;
}

Matrix centroids_of(const Matrix& data, const std::vector<std::size_t>& labels, std::size_t k,
                    std::vector<std::size_t>& counts) {
    Matrix c(k, data.cols());
    counts.assign(k, 0);
    for (std::size_t i = 0; i < data.rows(); ++i) {
        ++counts[labels[i]];
        auto row = data.row(i);
        for (std::size_t j = 0; j < data.cols(); ++j) c(labels[i], j) += row[j];
    }
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t j = 0; j < data.cols(); ++j) c(a, j) /= static_cast<double>(counts[a]);
    }
    return c;
}

double silhouette_of(std::size_t own, std::span<const double> dist_sum, std::span<const std::size_t> counts) {
    if (counts[own] <= 1) return 0.0;
    const double a = dist_sum[own] / static_cast<double>(counts[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (c != own) b = std::min(b, dist_sum[c] / static_cast<double>(counts[c]));
    }
    const double denom = std::max(a, b);
    return denom > 0.0 ? (b - a) / denom : 0.0;
}

}  // namespace

double silhouette_index(const Matrix& data, std::span<const int> labels, const SilhouetteOptions& options) {
    if (labels.size() != data.rows()) throw std::invalid_argument("labels and data differ in length");
    std::size_t k = 0;
    const auto lab = compact_labels(labels, k);
    if (k < 2) throw std::invalid_argument("silhouette needs at least two clusters");
    const auto n = data.rows();
    std::vector<std::size_t> counts(k, 0);
    for (auto l : lab) ++counts[l];

    if (n < options.exact_below) {
        // Row i's summed distance to each cluster; each pair is measured once.
        Matrix sums(n, k);
        for (std::size_t i = 0; i < n; ++i) {
            auto xi = data.row(i);
            for (std::size_t j = i + 1; j < n; ++j) {
                const double d = std::sqrt(squared_distance(xi, data.row(j)));
                sums(i, lab[j]) += d;
                sums(j, lab[i]) += d;
            }
        }
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += silhouette_of(lab[i], sums.row(i), counts);
        return total / static_cast<double>(n);
    }

    std::vector<std::size_t> sample(n);
    std::iota(sample.begin(), sample.end(), 0);
    std::mt19937_64 rng(options.seed);
    std::shuffle(sample.begin(), sample.end(), rng);
    sample.resize(std::min(options.sample_size, n));
    std::vector<double> sums(k);
    double total = 0.0;
    for (auto i : sample) {
        std::fill(sums.begin(), sums.end(), 0.0);
        auto xi = data.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) sums[lab[j]] += std::sqrt(squared_distance(xi, data.row(j)));
        }
        total += silhouette_of(lab[i], sums, counts);
    }
    return total / static_cast<double>(sample.size());
}

double davies_bouldin_index(const Matrix& data, std::span<const int> labels) {
    if (labels.size() != data.rows()) throw std::invalid_argument("labels and data differ in length");
    std::size_t k = 0;
    const auto lab = compact_labels(labels, k);
    if (k < 2) throw std::invalid_argument("Davies-Bouldin index needs at least two clusters");
    std::vector<std::size_t> counts;
    const auto c = centroids_of(data, lab, k, counts);

    std::vector<double> dispersion(k, 0.0);
    for (std::size_t i = 0; i < data.rows(); ++i) dispersion[lab[i]] += std::sqrt(squared_distance(data.row(i), c.row(lab[i])));
    for (std::size_t a = 0; a < k; ++a) dispersion[a] /= static_cast<double>(counts[a]);

    double total = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
        double worst = 0.0;
        for (std::size_t b = 0; b < k; ++b) {
            if (a == b) continue;
            const double d = std::sqrt(squared_distance(c.row(a), c.row(b)));
            if (!(d > 0.0)) throw std::domain_error("Davies-Bouldin index undefined: coincident centroids");
            worst = std::max(worst, (dispersion[a] + dispersion[b]) / d);
        }
        total += worst;
    }
    return total / static_cast<double>(k);
}

double mean_index_adequacy(const Matrix& data, std::span<const int> labels) {
    if (labels.size() != data.rows()) throw std::invalid_argument("labels and data differ in length");
    if (data.empty()) throw std::invalid_argument("MIA needs at least one row");
    std::size_t k = 0;
    const auto lab = compact_labels(labels, k);
    std::vector<std::size_t> counts;
    const auto c = centroids_of(data, lab, k, counts);

    std::vector<double> ms(k, 0.0);  // mean squared member distance per cluster
    for (std::size_t i = 0; i < data.rows(); ++i) ms[lab[i]] += squared_distance(data.row(i), c.row(lab[i]));
    double acc = 0.0;
    for (std::size_t a = 0; a < k; ++a) acc += ms[a] / static_cast<double>(counts[a]);
    return std::sqrt(acc / static_cast<double>(k));
}

std::optional<double> ix_score(double dbi, double mia, double silhouette) {
    if (!(dbi > 0.0) || !(mia > 0.0) || !(silhouette > 0.0)) return std::nullopt;
    return dbi * mia / silhouette;
}

std::optional<double> ci_score(std::span<const BinIx> bins, std::size_t total) {
    std::size_t sum_n = 0;
    for (const auto& b : bins) sum_n += b.n_bin;
    if (sum_n != total || total == 0) throw std::invalid_argument("bin sizes must sum to N > 0");
    double weighted = 0.0;
    for (const auto& b : bins) {
        if (!b.ix) return std::nullopt;
        weighted += *b.ix * static_cast<double>(b.n_bin) / static_cast<double>(total);
    }
    return std::log(weighted);
}

InternalScores evaluate_internal(const ClusterModel& model, const SilhouetteOptions& options) {
    InternalScores out;
    std::vector<BinIx> ix;
    std::size_t total = 0;
    for (const auto& bm : model.bins) {
        BinScores s;
        s.bin = bm.bin;
        s.n_bin = bm.rows.size();
        Matrix data;
        for (auto r : bm.rows) data.push_row(model.normalized.row(r));
        std::size_t k = 0;
        compact_labels(bm.local_labels, k);
        s.clusters = k;
        s.mia = mean_index_adequacy(data, bm.local_labels);
        if (k >= 2) {
            SilhouetteOptions opt = options;
            opt.seed = options.seed + static_cast<std::uint64_t>(bm.bin);
            s.silhouette = silhouette_index(data, bm.local_labels, opt);
            try {
                s.dbi = davies_bouldin_index(data, bm.local_labels);
            } catch (const std::domain_error&) {
                s.dbi.reset();
            }
        }
        if (s.dbi && s.mia && s.silhouette) s.ix = ix_score(*s.dbi, *s.mia, *s.silhouette);
        ix.push_back({s.ix, s.n_bin});
        total += s.n_bin;
        out.bins.push_back(s);
    }
    if (!ix.empty()) out.ci = ci_score(ix, total);
    return out;
}

}  // namespace loadpat
