#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "loadpat/agreement.hpp"
#include "loadpat/errors.hpp"
#include "loadpat/experiment.hpp"
#include "loadpat/kmeans.hpp"
#include "loadpat/som.hpp"
#include "loadpat/synth.hpp"

using namespace loadpat;
using fixtures::constant;
using fixtures::profile;

namespace {

// Gaussian blobs around the given centres; truth holds the blob index per row.
Matrix blobs(const std::vector<std::vector<double>>& centres, std::size_t per, double sd, std::uint64_t seed,
             std::vector<int>* truth = nullptr) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, sd);
    Matrix m;
    for (std::size_t c = 0; c < centres.size(); ++c) {
        for (std::size_t i = 0; i < per; ++i) {
            std::vector<double> row = centres[c];
            for (auto& x : row) x += n(rng);
            m.push_row(row);
            if (truth) truth->push_back(static_cast<int>(c));
        }
    }
    return m;
}

std::vector<double> column_mean(const Matrix& m, std::size_t from, std::size_t to) {
    std::vector<double> mean(m.cols(), 0.0);
    for (std::size_t i = from; i < to; ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) mean[j] += m(i, j);
    }
    for (auto& x : mean) x /= static_cast<double>(to - from);
    return mean;
}

ProfileDataset shapes_dataset(std::uint64_t seed, std::vector<int>* truth = nullptr) {
    nlohmann::json spec{{"groups", nlohmann::json::array()}};
    int g = 0;
    for (int centre : {4, 12, 20}) {
        spec["groups"].push_back({{"name", "g" + std::to_string(g++)},
                                  {"households", 10},
                                  {"amplitude", {2.0, 4.0}},
                                  {"noise", 0.05},
                                  {"dates", {{"start", "2014-03-01"}, {"days", 10}}},
                                  {"template", fixtures::as_vector(fixtures::bump(centre, 1.0, 0.2))}});
    }
    auto data = synthesize_dataset(parse_generator_spec(spec), seed);
    if (truth) *truth = data.group;
    return std::move(data.dataset);
}

}  // namespace

TEST_CASE("k-means on two separated groups finds the group means") {
    const auto data = blobs({{0, 0}, {100, 100}}, 50, 1.0, 4);
    const auto r = fit_kmeans(data, 2, 9);
    const auto m0 = column_mean(data, 0, 50), m1 = column_mean(data, 50, 100);
    const int c0 = r.labels[0];
    for (std::size_t j = 0; j < 2; ++j) {
        CHECK(r.centroids(c0, j) == doctest::Approx(m0[j]).epsilon(1e-12));
        CHECK(r.centroids(1 - c0, j) == doctest::Approx(m1[j]).epsilon(1e-12));
    }
}

TEST_CASE("k equal to the number of distinct rows gives zero inertia") {
    Matrix data;
    for (double v : {1.0, 5.0, 9.0, 5.0, 1.0}) data.push_row(std::vector<double>{v, 2 * v});
    const auto r = fit_kmeans(data, 3, 1);
    CHECK(r.inertia == 0.0);
    CHECK(r.labels[0] == r.labels[4]);
    CHECK(r.labels[1] == r.labels[3]);
}

TEST_CASE("k-means is deterministic for a seed and validates k") {
    const auto data = blobs({{0, 0, 0}, {5, 5, 5}, {0, 9, 3}}, 40, 1.5, 2);
    const auto a = fit_kmeans(data, 3, 17), b = fit_kmeans(data, 3, 17);
    CHECK(a.labels == b.labels);
    CHECK(a.centroids == b.centroids);
    CHECK_THROWS_AS(fit_kmeans(data, 0, 1), ConfigError);
    CHECK_THROWS_AS(fit_kmeans(data, data.rows() + 1, 1), ConfigError);
}

TEST_CASE("k-means inertia never increases and labels point to the nearest centroid") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto data = blobs({{0, 0}, {3, 1}, {1, 4}, {6, 6}}, 30, 1.2, seed);
        const auto r = fit_kmeans(data, 4, seed);
        for (std::size_t i = 1; i < r.inertia_trace.size(); ++i) {
            CHECK(r.inertia_trace[i] <= r.inertia_trace[i - 1] * (1 + 1e-12));
        }
        for (std::size_t i = 0; i < data.rows(); ++i) {
            // Brute-force nearest with lowest-index tie break.
            int best = 0;
            double best_d = squared_distance(data.row(i), r.centroids.row(0));
            for (std::size_t c = 1; c < r.centroids.rows(); ++c) {
                const double d = squared_distance(data.row(i), r.centroids.row(c));
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<int>(c);
                }
            }
            CHECK(r.labels[i] == best);
        }
    }
}

TEST_CASE("nearest centroid ties go to the lowest index") {
    Matrix c;
    c.push_row(std::vector<double>{1.0});
    c.push_row(std::vector<double>{-1.0});
    const std::vector<double> x{0.0};
    CHECK(nearest_centroid(x, c) == 0);
}

TEST_CASE("SOM on constant data collapses to one vector") {
    Matrix data;
    for (int i = 0; i < 30; ++i) data.push_row(std::vector<double>{2.0, 3.0, 4.0});
    const auto som = fit_som(data, 3, 5);
    for (std::size_t n = 0; n < som.codebook.rows(); ++n) {
        for (std::size_t j = 0; j < 3; ++j) CHECK(som.codebook(n, j) == doctest::Approx(data(0, j)));
    }
    CHECK(std::set<int>(som.bmu.begin(), som.bmu.end()).size() == 1);
}

TEST_CASE("2x2 SOM separates four groups") {
    std::vector<int> truth;
    const auto data = blobs({{0, 0}, {20, 0}, {0, 20}, {20, 20}}, 50, 1.0, 8, &truth);
    const auto som = fit_som(data, 2, 3);
    CHECK(std::set<int>(som.bmu.begin(), som.bmu.end()).size() == 4);
    // Purity: share of rows whose BMU's majority group equals their own.
    std::map<int, std::map<int, int>> votes;
    for (std::size_t i = 0; i < truth.size(); ++i) ++votes[som.bmu[i]][truth[i]];
    int pure = 0;
    for (const auto& [node, groups] : votes) {
        int best = 0;
        for (const auto& [g, n] : groups) best = std::max(best, n);
        pure += best;
    }
    CHECK(static_cast<double>(pure) / truth.size() >= 0.9);
    CHECK(fit_som(data, 2, 3).codebook == som.codebook);
    CHECK_THROWS_AS(fit_som(data, 1, 3), ConfigError);
}

TEST_CASE("SOM+k-means") {
    std::vector<int> truth;
    const auto data = blobs({{0, 0, 0}, {10, 0, 5}, {0, 10, 10}}, 60, 1.0, 12, &truth);
    const auto one = fit_som_kmeans(data, 2, 1, 0);
    CHECK(std::set<int>(one.labels.begin(), one.labels.end()).size() == 1);
    CHECK_THROWS_AS(fit_som_kmeans(data, 2, 4, 0), ConfigError);
    const auto r = fit_som_kmeans(data, 5, 3, 21);
    CHECK(adjusted_rand_index(r.labels, truth) >= 0.9);
}

TEST_CASE("experiment config validation") {
    ExperimentConfig c;
    c.algorithm = Algorithm::SomKmeans;
    c.s = 3;
    c.m = 9;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.m = 8;
    CHECK_NOTHROW(c.validate());
    c.algorithm = Algorithm::Kmeans;
    c.m = 1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.algorithm = Algorithm::Som;
    c.s = 1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("run_experiment without pre-binning uses one bin") {
    const auto ds = shapes_dataset(1);
    ExperimentConfig c;
    c.m = 3;
    c.normalization = Normalization::Unit;
    const auto model = run_experiment(ds, c);
    REQUIRE(model.bins.size() == 1);
    CHECK(model.bins[0].rows.size() == ds.size());
    CHECK(model.n_clusters == 3);
    for (const auto& b : model.bins) CHECK(b.centroids.cols() == 24);
}

TEST_CASE("AMC pre-binning bounds the cluster count") {
    std::vector<DailyLoadProfile> rows;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> amp(0.01, 8.0);
    for (int h = 0; h < 60; ++h) {
        const double a = amp(rng) * amp(rng);
        for (int d = 1; d <= 5; ++d) {
            auto v = fixtures::bump(8 + d, a, a * 0.3);
            rows.push_back(profile("h" + std::to_string(h), "2014-01-0" + std::to_string(d), v));
        }
    }
    ProfileDataset ds(rows);
    ExperimentConfig c;
    c.m = 3;
    c.prebinning = BinScheme::Amc;
    c.normalization = Normalization::ZeroOne;
    const auto model = run_experiment(ds, c);
    CHECK(model.n_clusters <= 24);
    CHECK(model.bins.size() > 1);
    std::set<int> ids(model.labels.begin(), model.labels.end());
    CHECK(ids.size() == model.n_clusters);
}

TEST_CASE("integral pre-binning without zeros runs end to end") {
    auto ds0 = shapes_dataset(2);
    auto rows = std::vector<DailyLoadProfile>(ds0.profiles().begin(), ds0.profiles().end());
    rows.push_back(profile("zero", "2014-03-01", constant(0.0)));
    rows.push_back(profile("zero", "2014-03-02", constant(0.0)));
    ProfileDataset ds(rows);
    ExperimentConfig c;
    c.m = 3;
    c.prebinning = BinScheme::IntegralKmeans;
    c.n_bins = 2;
    c.normalization = Normalization::Unit;
    c.keep_zeros = false;
    const auto model = run_experiment(ds, c);
    CHECK(model.removed_zero == 2);
    CHECK(model.labels[ds.size() - 1] == -1);
    CHECK(model.clustered_rows() == ds.size() - 2);

    c.keep_zeros = true;
    const auto kept = run_experiment(ds, c);
    CHECK(kept.removed_zero == 0);
    CHECK(kept.labels[ds.size() - 1] >= 0);
    CHECK(kept.dropped_degenerate == 0);
}

TEST_CASE("RDLPs are means of raw member profiles") {
    ProfileDataset ds({profile("a", "2014-01-01", constant(0.0)), profile("b", "2014-01-01", constant(2.0)),
                       profile("c", "2014-01-01", constant(50.0))});
    ClusterModel model;
    model.labels = {0, 0, 1};
    model.n_clusters = 2;
    const auto rdlps = build_rdlps(model, ds);
    REQUIRE(rdlps.size() == 2);
    CHECK(rdlps[0].values == constant(1.0));
    CHECK(rdlps[0].member_count == 2);
    CHECK(rdlps[1].values == constant(50.0));
}

TEST_CASE("RDLPs depend on labels only, not on the normalization") {
    std::vector<int> truth;
    const auto ds = shapes_dataset(5, &truth);
    ExperimentConfig c;
    c.m = 3;
    c.normalization = Normalization::Unit;
    auto model = run_experiment(ds, c);
    const auto a = build_rdlps(model, ds);
    std::size_t total = 0;
    for (const auto& r : a) total += r.member_count;
    CHECK(total == model.clustered_rows());

    // Oracle: direct mean over raw rows with each label.
    for (const auto& r : a) {
        HourlyValues sum{};
        std::size_t n = 0;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            if (model.labels[i] != r.cluster) continue;
            for (int t = 0; t < 24; ++t) sum[t] += ds[i].values[t];
            ++n;
        }
        for (int t = 0; t < 24; ++t) CHECK(r.values[t] == doctest::Approx(sum[t] / n).epsilon(1e-12));
    }
    model.config.normalization = Normalization::SaNorm;
    const auto b = build_rdlps(model, ds);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].values == b[i].values);
}

TEST_CASE("row order within a bin does not change its centroids") {
    std::vector<int> truth;
    const auto data = blobs({{0, 0}, {30, 0}, {0, 30}}, 40, 1.0, 6, &truth);
    std::vector<std::size_t> order(data.rows());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), std::mt19937_64(1));
    Matrix shuffled;
    for (auto i : order) shuffled.push_row(data.row(i));
    const auto a = fit_kmeans(data, 3, 2), b = fit_kmeans(shuffled, 3, 2);
    auto sorted = [](const Matrix& c) {
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < c.rows(); ++i) rows.emplace_back(c.row(i).begin(), c.row(i).end());
        std::sort(rows.begin(), rows.end());
        return rows;
    };
    const auto ca = sorted(a.centroids), cb = sorted(b.centroids);
    for (std::size_t i = 0; i < ca.size(); ++i) {
        for (std::size_t j = 0; j < ca[i].size(); ++j) CHECK(ca[i][j] == doctest::Approx(cb[i][j]).epsilon(1e-9));
    }
}
