// Acceptance checks, one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "loadpat/agreement.hpp"
#include "loadpat/archetype.hpp"
#include "loadpat/external.hpp"
#include "loadpat/persist.hpp"
#include "loadpat/scoring.hpp"
#include "loadpat/suite.hpp"
#include "loadpat/validity.hpp"
#include "oracle.hpp"
#include "published_scores.hpp"

using namespace loadpat;
namespace fs = std::filesystem;

namespace {

struct Check {
    std::vector<std::string> failures;

    void expect(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
    void near(double got, double want, double tol, const std::string& what) {
        if (!(std::abs(got - want) <= tol)) {
            std::ostringstream s;
            s.precision(17);
            s << what << ": got " << got << ", want " << want;
            failures.push_back(s.str());
        }
    }
};

int g_failed = 0;

void criterion(int n, const std::string& title, double budget_s, const std::function<void(Check&)>& body) {
    Check c;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.failures.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > budget_s) c.failures.push_back("took " + std::to_string(secs) + " s");
    const bool ok = c.failures.empty();
    g_failed += !ok;
    std::cout << (ok ? "PASS" : "FAIL") << " [" << n << "] " << title << " (" << std::fixed;
    std::cout.precision(2);
    std::cout << secs << " s)\n";
    std::size_t shown = 0;
    for (const auto& f : c.failures) {
        if (++shown > 10) {
            std::cout << "    ... " << c.failures.size() - 10 << " more\n";
            break;
        }
        std::cout << "    " << f << '\n';
    }
}

void score_card(Check& c) {
    const auto card = total_score(published::kExperiments, published::rank_matrix(), WeightProfile::defaults(), false);
    c.expect(card.totals[6] == 57.0, "experiment 7 total is exactly 57.0");
    c.expect(card.totals[2] == 65.0, "experiment 4 (unit) total is exactly 65.0");
    for (std::size_t e = 0; e < 7; ++e) c.near(card.totals[e], published::kTotals[e], 0.01, published::kExperiments[e]);
    c.expect(card.order[0] == 6 && card.order[1] == 2, "ranking starts 7-unit, 4-unit");
}

void oracle_equivalence(Check& c) {
    std::mt19937_64 rng(20);
    for (int t = 0; t < 20; ++t) {
        const int n = std::uniform_int_distribution<int>(10, 50)(rng);
        const int k = std::uniform_int_distribution<int>(2, 5)(rng);
        const int dim = std::uniform_int_distribution<int>(2, 24)(rng);
        std::normal_distribution<double> g(0, 1);
        Matrix m;
        std::vector<int> lab(n);
        for (int i = 0; i < n; ++i) {
            lab[i] = i < k ? i : std::uniform_int_distribution<int>(0, k - 1)(rng);
            std::vector<double> p(dim);
            for (auto& x : p) x = g(rng) + 2.0 * lab[i];
            m.push_row(p);
        }
        const auto tag = "dataset " + std::to_string(t);
        c.near(silhouette_index(m, lab), oracle::silhouette(m, lab), 1e-9, tag + " silhouette");
        c.near(davies_bouldin_index(m, lab), oracle::dbi(m, lab), 1e-9, tag + " DBI");
        c.near(mean_index_adequacy(m, lab), oracle::mia(m, lab), 1e-9, tag + " MIA");
    }
}

void ci_properties(Check& c) {
    const auto one = ix_score(1.0, 1.0, 1.0);
    c.expect(one && *one == 1.0, "Ix(1,1,1) = 1");
    const std::vector<BinIx> unit{{1.0, 30}, {1.0, 70}};
    const auto ci0 = ci_score(unit, 100);
    c.expect(ci0 && *ci0 == 0.0, "Ix = 1 in every bin gives CI = 0 exactly");
    const std::vector<BinIx> two{{2.0, 1}, {5.0, 1}};
    const auto ci = ci_score(two, 2);
    c.expect(ci.has_value(), "two-bin CI defined");
    if (ci) c.near(*ci, std::log(3.5), 1e-12, "two-bin CI");
    for (double bad : {0.0, -0.5}) {
        c.expect(!ix_score(bad, 1, 1), "DBI <= 0 undefined");
        c.expect(!ix_score(1, bad, 1), "MIA <= 0 undefined");
        c.expect(!ix_score(1, 1, bad), "silhouette <= 0 undefined");
    }
    const std::vector<BinIx> partial{{2.0, 5}, {std::nullopt, 5}};
    c.expect(!ci_score(partial, 10), "an undefined bin makes CI undefined");
}

void error_identities(Check& c) {
    const auto perfect = error_metrics(std::vector<double>{2.5, 2.5, 2.5}, 2.5);
    c.expect(perfect.mape == 0 && perfect.mdape == 0 && perfect.mdlq == 0 && perfect.mdsyma == 0,
             "perfect cluster has zero error");
    const auto twice = error_metrics(std::vector<double>{1.7}, 3.4);
    c.near(twice.mape, 100, 1e-9, "r = 2h mape");
    c.near(twice.mdsyma, 100, 1e-9, "r = 2h mdsyma");
    c.near(twice.mdlq, std::log(2.0), 1e-9, "r = 2h mdlq");
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.01, 50);
    for (int t = 0; t < 500; ++t) {
        const double h = u(rng);
        const double q = u(rng) / u(rng);
        const auto e = error_metrics(std::vector<double>(1 + t % 7, h), q * h);
        c.near(e.mdsyma, 100 * (std::exp(std::abs(e.mdlq)) - 1), 1e-9, "constant-Q identity");
    }
}

void entropy_suite(Check& c) {
    std::vector<double> point(7, 0.0);
    point[2] = 1.0;
    c.expect(entropy_bits(point) == 0.0, "point mass has zero entropy");
    c.near(entropy_bits(std::vector<double>(7, 1.0 / 7)), std::log2(7.0), 1e-12, "uniform day types");

    // 1000 random clusters over a two-year random dataset.
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 3);
    std::vector<DailyLoadProfile> rows;
    const auto start = std::chrono::sys_days{parse_date("2013-01-01")};
    for (int h = 0; h < 20; ++h) {
        for (int d = 0; d < 730; ++d) {
            HourlyValues v;
            for (auto& x : v) x = u(rng);
            rows.push_back({"h" + std::to_string(h), Date{start + std::chrono::days{d}}, v});
        }
    }
    const ProfileDataset data(std::move(rows));
    ClusterModel model;
    model.n_clusters = 1000;
    model.labels.resize(data.size());
    // Skewed sizes: some clusters get many members, most a handful.
    std::uniform_int_distribution<int> pick(0, 999);
    for (std::size_t r = 0; r < data.size(); ++r) model.labels[r] = r < 1000 ? static_cast<int>(r) : pick(rng) % (1 + pick(rng));
    const auto report = evaluate_external(model, data, 10.0);
    c.expect(report.clusters.size() == 1000, "1000 clusters measured");
    const std::array<double, kFeatures> bounds{std::log2(7.0), std::log2(12.0), std::log2(100.0), std::log2(100.0)};
    std::size_t violations = 0;
    for (const auto& cm : report.clusters) {
        for (std::size_t f = 0; f < kFeatures; ++f) violations += cm.entropy[f] < 0 || cm.entropy[f] > bounds[f] + 1e-12;
    }
    c.expect(violations == 0, std::to_string(violations) + " entropy bound violations");
}

struct Truth {
    std::vector<int> group;
    std::vector<int> pattern;
};

Truth read_truth(const fs::path& path) {
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    Truth t;
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        std::istringstream s(line);
        for (std::string x; std::getline(s, x, ',');) f.push_back(x);
        t.group.push_back(std::stoi(f.at(3)));
        t.pattern.push_back(std::stoi(f.at(4)));
    }
    return t;
}

const fs::path kRunA = fs::temp_directory_path() / "loadpat_acceptance" / "a";
const fs::path kRunB = fs::temp_directory_path() / "loadpat_acceptance" / "b";

SuiteConfig planted_config() { return load_suite_config(fixtures::source_dir() / "configs" / "planted_suite.json"); }

const ManifestEntry* binned_cell(const RunManifest& m) {
    for (const auto& e : m.experiments) {
        if (e.id.rfind("binned-", 0) == 0) return &e;
    }
    return nullptr;
}

void planted_recovery(Check& c) {
    fs::remove_all(kRunA.parent_path());
    const auto config = planted_config();
    const auto manifest = run_suite(config, {kRunA});
    c.expect(manifest.experiments.size() == 6, "six-experiment grid");
    c.expect(manifest.failures() == 0, "every cell completed");
    c.expect(manifest.profile_count == 18000, "18000 planted profiles");
    const auto* best = binned_cell(manifest);
    if (!best) {
        c.expect(false, "no binned cell in the grid");
        return;
    }
    c.expect(best->config.normalization == Normalization::Unit && best->config.prebinning == BinScheme::IntegralKmeans,
             "binned cell is unit norm with integral k-means pre-binning");
    const auto model = cluster_model_from_json(read_json_file(kRunA / "cells" / best->id / "model.json"));
    const auto truth = read_truth(kRunA / "data" / "truth.csv");
    std::set<int> patterns(truth.pattern.begin(), truth.pattern.end());
    c.expect(patterns.size() == 12, "12 planted patterns");
    c.expect(model.n_clusters == 12, "12 clusters");
    const double ari = adjusted_rand_index(model.labels, truth.pattern);
    std::cout << "    adjusted Rand index of " << best->id << ": " << std::setprecision(4) << ari << std::setprecision(2) << '\n';
    c.expect(ari >= 0.9, "adjusted Rand index " + std::to_string(ari) + " below 0.9");
    c.expect(best->rank == std::size_t{1}, "correctly configured experiment ranked first");
    for (const auto& e : manifest.experiments) {
        std::cout << "    " << (e.rank ? std::to_string(*e.rank) : "-") << "  " << e.id << "  score "
                  << (e.score ? std::to_string(*e.score) : "-") << '\n';
    }
}

void archetype_round_trip(Check& c) {
    const auto config = planted_config();
    const auto manifest = load_manifest(kRunA);
    const auto* best = binned_cell(manifest);
    if (!best) {
        c.expect(false, "planted run missing");
        return;
    }
    ArchetypeRequest request;
    request.experiment = best->id;
    request.name = "rural";
    request.filter = expert_archetype("rural");
    const auto run = run_archetype(kRunA, request);

    // Group of each cluster by majority of its members.
    const auto model = cluster_model_from_json(read_json_file(kRunA / "cells" / best->id / "model.json"));
    const auto truth = read_truth(kRunA / "data" / "truth.csv");
    const auto& groups = config.generator->groups;
    std::vector<std::vector<std::size_t>> votes(model.n_clusters, std::vector<std::size_t>(groups.size(), 0));
    for (std::size_t r = 0; r < model.labels.size(); ++r) {
        if (model.labels[r] >= 0) ++votes[model.labels[r]][truth.group[r]];
    }
    std::vector<std::size_t> group_of(model.n_clusters);
    for (std::size_t k = 0; k < model.n_clusters; ++k) {
        group_of[k] = static_cast<std::size_t>(std::max_element(votes[k].begin(), votes[k].end()) - votes[k].begin());
    }

    std::vector<std::set<std::string>> planted(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (auto a : kAllAttributes) planted[g].insert(feature_name(a, (*groups[g].survey)[static_cast<std::size_t>(a)]));
    }

    std::set<std::pair<std::string, int>> found;
    for (const auto& a : run.associations) found.insert({a.feature, a.cluster});
    std::size_t expected = 0;
    for (std::size_t k = 0; k < model.n_clusters; ++k) {
        for (const auto& f : planted[group_of[k]]) {
            ++expected;
            c.expect(found.count({f, static_cast<int>(k)}) == 1,
                     "missing " + f + " -> cluster " + std::to_string(k));
        }
    }
    std::cout << "    planted associations checked: " << expected << ", associations found: " << found.size() << '\n';
    for (const auto& [f, k] : found) {
        if (f.rfind("daytype=", 0) == 0 || f.rfind("season=", 0) == 0) continue;
        c.expect(planted[group_of[k]].count(f) == 1, "cross-group association " + f + " -> cluster " + std::to_string(k));
    }
    c.expect(!run.archetype.clusters.empty(), "rural archetype has clusters");

    // Gradient of the fitted objective against central differences.
    const auto dataset = load_profiles(kRunA / "data" / "profiles.csv");
    const auto survey = load_survey(kRunA / "data" / "survey.csv");
    const auto training = build_training_set(dataset, model.labels, survey);
    Matrix sub;
    std::vector<int> sub_labels;
    for (std::size_t i = 0; i < training.features.rows(); i += 9) {
        sub.push_row(training.features.row(i));
        const auto& labels = run.model.regression.labels;
        sub_labels.push_back(static_cast<int>(std::find(labels.begin(), labels.end(), training.labels[i]) - labels.begin()));
    }
    const auto k = run.model.regression.n_classes();
    SoftmaxObjective f(sub, sub_labels, k, request.softmax.l2);
    std::vector<double> params;
    for (std::size_t cl = 0; cl < k; ++cl) {
        for (std::size_t j = 0; j < sub.cols(); ++j) params.push_back(run.model.regression.coefficients(cl, j));
    }
    for (double b : run.model.regression.bias) params.push_back(b);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> jitter(0, 0.3);
    for (auto& p : params) p += jitter(rng);  // away from the optimum, where the gradient is not near zero
    std::vector<double> grad;
    f.value_and_gradient(params, grad);
    double worst = 0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double h = 1e-5 * std::max(1.0, std::abs(params[i]));
        const double keep = params[i];
        params[i] = keep + h;
        const double up = f.value(params);
        params[i] = keep - h;
        const double down = f.value(params);
        params[i] = keep;
        const double fd = (up - down) / (2 * h);
        worst = std::max(worst, std::abs(fd - grad[i]) / std::max(1e-3, std::abs(fd) + std::abs(grad[i])));
    }
    std::cout << "    worst relative gradient error: " << std::scientific << worst << std::fixed << '\n';
    c.expect(worst < 1e-5, "gradient differs from finite differences");
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file() || e.path().filename() == "run_log.jsonl") continue;
        if (fs::relative(e.path(), dir).begin()->string() == "archetypes") continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        out[fs::relative(e.path(), dir).generic_string()] = s.str();
    }
    return out;
}

void determinism(Check& c) {
    fs::remove_all(kRunB);
    run_suite(planted_config(), {kRunB});
    const auto a = snapshot(kRunA);
    const auto b = snapshot(kRunB);
    c.expect(a.size() == b.size(), "same file set");
    for (const auto& [name, bytes] : a) {
        auto it = b.find(name);
        c.expect(it != b.end() && it->second == bytes, name + " differs");
    }
    std::cout << "    compared " << a.size() << " files\n";
}

}  // namespace

int main() {
    criterion(1, "score card reproduces the published totals", 1, score_card);
    criterion(2, "validity indices match brute-force references", 10, oracle_equivalence);
    criterion(3, "CI formula properties", 1, ci_properties);
    criterion(4, "error-metric identities", 1, error_identities);
    criterion(5, "entropy bounds", 60, entropy_suite);
    criterion(6, "planted structure recovered and ranked first", 300, planted_recovery);
    criterion(7, "archetype associations recovered", 120, archetype_round_trip);
    criterion(8, "identical seeds give identical outputs", 300, determinism);
    return g_failed == 0 ? 0 : 1;
}
