#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "loadpat/experiment.hpp"
#include "loadpat/external.hpp"
#include "loadpat/synth.hpp"

using namespace loadpat;
using fixtures::constant;

TEST_CASE("members identical to the representative have zero error") {
    const std::vector<double> h{3.0, 3.0, 3.0};
    const auto e = error_metrics(h, 3.0);
    CHECK(e.mape == 0.0);
    CHECK(e.mdape == 0.0);
    CHECK(e.mdlq == 0.0);
    CHECK(e.mdsyma == 0.0);
    CHECK(e.included == 3);
}

TEST_CASE("representative twice every member") {
    const std::vector<double> h{1.0, 2.5, 4.0, 7.0};
    const auto r = [&](double x) { return 2 * x; };
    // Each member sees its own r = 2h: use demand_errors with scaled copies.
    for (double x : h) {
        const auto e = error_metrics(std::vector<double>{x}, r(x));
        CHECK(std::abs(e.mape - 100) <= 1e-9);
        CHECK(std::abs(e.mdsyma - 100) <= 1e-9);
        CHECK(std::abs(e.mdlq - std::log(2.0)) <= 1e-9);
    }
    HourlyValues rdlp = constant(2.0);
    std::vector<HourlyValues> members(5, constant(1.0));
    const auto d = demand_errors(rdlp, members);
    for (const auto* m : {&d.total, &d.peak}) {
        CHECK(std::abs(m->mape - 100) <= 1e-9);
        CHECK(std::abs(m->mdape - 100) <= 1e-9);
        CHECK(std::abs(m->mdsyma - 100) <= 1e-9);
        CHECK(std::abs(m->mdlq - std::log(2.0)) <= 1e-9);
    }
}

TEST_CASE("symmetric Q gives mdlq 0 and mdsyma 100") {
    // r = 2; h = 4 gives Q = 0.5, h = 1 gives Q = 2.
    const auto e = error_metrics(std::vector<double>{4.0, 1.0}, 2.0);
    CHECK(std::abs(e.mdlq) <= 1e-15);
    CHECK(std::abs(e.mdsyma - 100) <= 1e-9);
    CHECK(e.mape == doctest::Approx((50.0 + 100.0) / 2));
}

TEST_CASE("constant Q ties mdsyma to mdlq") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.05, 20.0);
    for (int i = 0; i < 200; ++i) {
        const double q = u(rng) / 4.0;
        std::vector<double> h(1 + i % 9, u(rng));
        const auto e = error_metrics(h, q * h[0]);
        CHECK(std::abs(e.mdsyma - 100 * (std::exp(std::abs(e.mdlq)) - 1)) <= 1e-9);
    }
}

TEST_CASE("zero-demand members are excluded and counted") {
    const auto e = error_metrics(std::vector<double>{0.0, 2.0, 0.0}, 4.0);
    CHECK(e.excluded == 2);
    CHECK(e.included == 1);
    CHECK(e.mape == doctest::Approx(100));
    const auto none = error_metrics(std::vector<double>{0.0}, 0.0);
    CHECK(none.mape == 0.0);
    CHECK(none.included == 0);
}

TEST_CASE("median and mean use all included members") {
    // h = 1, 2, 4, 8 with r = 2: APE 100, 0, 50, 75.
    const auto e = error_metrics(std::vector<double>{1, 2, 4, 8}, 2.0);
    CHECK(e.mape == doctest::Approx(56.25));
    CHECK(e.mdape == doctest::Approx(62.5));
    // ln Q: ln2, 0, -ln2, -2ln2 -> median -ln2/2.
    CHECK(e.mdlq == doctest::Approx(-std::log(2.0) / 2));
}

namespace {

HourlyValues with_peaks(std::initializer_list<int> hours) {
    HourlyValues v = constant(0.2);
    for (int h : hours) v[h] = 1.0;
    return v;
}

}  // namespace

TEST_CASE("peak hours") {
    const auto p = peak_hours(with_peaks({7, 19}));
    CHECK(p.count() == 2);
    CHECK(p.test(7));
    CHECK(p.test(19));
    HourlyValues half = constant(1.0);
    half[3] = 2.0;
    CHECK(peak_hours(half).count() == 1);  // exactly half the max is not a peak
    CHECK(peak_hours(constant(0.0)).none());
}

TEST_CASE("peak coincidence ratio") {
    const auto rdlp = with_peaks({7, 19});
    std::vector<HourlyValues> same(4, rdlp);
    CHECK(peak_coincidence_ratio(rdlp, same) == 1.0);
    std::vector<HourlyValues> disjoint(3, with_peaks({2, 12}));
    CHECK(peak_coincidence_ratio(rdlp, disjoint) == 0.0);
    std::vector<HourlyValues> mixed{with_peaks({7}), with_peaks({7, 19}), with_peaks({7}), with_peaks({7, 19})};
    CHECK(peak_coincidence_ratio(rdlp, mixed) == doctest::Approx(0.75));
    CHECK(peak_coincidence_ratio(constant(0.0), mixed) == 0.0);

    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0, 5);
    for (int i = 0; i < 200; ++i) {
        HourlyValues r;
        for (auto& x : r) x = u(rng);
        std::vector<HourlyValues> ms(5);
        for (auto& m : ms) {
            for (auto& x : m) x = u(rng);
        }
        const double v = peak_coincidence_ratio(r, ms);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("entropy") {
    std::vector<double> point(7, 0.0);
    point[6] = 1.0;
    CHECK(entropy_bits(point) == 0.0);
    CHECK(std::abs(entropy_bits(std::vector<double>(7, 1.0 / 7)) - std::log2(7.0)) <= 1e-12);
    CHECK(entropy_bits(std::vector<double>{0.75, 0.25}) == doctest::Approx(0.8112781244591328).epsilon(1e-12));
    CHECK(entropy_bits(std::vector<double>{0.25, 0.0, 0.75}) == entropy_bits(std::vector<double>{0.75, 0.25}));
    CHECK_THROWS_AS(entropy_bits(std::vector<double>(3, 0.0)), std::invalid_argument);
}

TEST_CASE("assignment likelihood renormalizes q") {
    // q = {Sun: 0.6, Sat: 0.2} -> p = {0.75, 0.25}.
    std::vector<std::size_t> members{0, 0, 0, 0, 0, 2, 6};
    std::vector<std::size_t> dataset{10, 10, 10, 10, 10, 10, 10};
    const auto p = assignment_likelihood(members, dataset);
    CHECK(p[5] == doctest::Approx(0.25));
    CHECK(p[6] == doctest::Approx(0.75));
    CHECK(entropy_bits(p) == doctest::Approx(0.8113).epsilon(1e-4));
}

TEST_CASE("percentile bins are equal frequency with ties to the lower bin") {
    std::vector<double> v(1000);
    std::iota(v.begin(), v.end(), 1.0);
    PercentileBins bins(v);
    std::vector<int> counts(101, 0);
    for (double x : v) ++counts[bins.bin_of(x)];
    for (int b = 1; b <= 100; ++b) CHECK(counts[b] == 10);
    CHECK(bins.bin_of(10.0) == 1);
    CHECK(bins.bin_of(10.5) == 2);
    CHECK(bins.bin_of(-5) == 1);
    CHECK(bins.bin_of(5000) == 100);

    PercentileBins ties(std::vector<double>(50, 3.0));
    CHECK(ties.bin_of(3.0) == 1);
}

TEST_CASE("usability") {
    std::vector<Rdlp> rdlps;
    for (int c = 0; c < 10; ++c) rdlps.push_back({c, constant(1.0 + c), c < 4 ? 500u : 100u});
    auto u = usability(rdlps, 5.0, 210);
    CHECK(u.threshold_ratio == doctest::Approx(0.4));
    CHECK_FALSE(u.zero_profile_represented);
    rdlps.push_back({10, constant(0.0), 7});
    CHECK(usability(rdlps, 5.0, 210).zero_profile_represented);
    CHECK(auto_membership_threshold(300) == doctest::Approx(210));
    CHECK(kSurveyScaleMembershipThreshold == 10490);
}

namespace {

SyntheticData weekly_patterns() {
    nlohmann::json spec{{"groups",
                         {{{"name", "g"},
                           {"households", 30},
                           {"amplitude", {2.0, 6.0}},
                           {"noise", 0.05},
                           {"dates", {{"start", "2014-01-06"}, {"days", 70}}},
                           {"patterns",
                            {{{"template", fixtures::as_vector(fixtures::bump(7))}, {"days", {"Sun"}}},
                             {{"template", fixtures::as_vector(fixtures::bump(19))}}}}}}}};
    return synthesize_dataset(parse_generator_spec(spec), 8);
}

}  // namespace

TEST_CASE("external evaluation on a weekly pattern") {
    const auto data = weekly_patterns();
    ExperimentConfig c;
    c.m = 2;
    c.normalization = Normalization::Unit;
    const auto model = run_experiment(data.dataset, c);
    const auto report = evaluate_external(model, data.dataset, 10.0);
    REQUIRE(report.clusters.size() == 2);

    bool sunday_cluster = false;
    for (const auto& cm : report.clusters) {
        const double sum = std::accumulate(cm.daytype_likelihood.begin(), cm.daytype_likelihood.end(), 0.0);
        CHECK(std::abs(sum - 1.0) <= 1e-9);
        if (cm.daytype_likelihood[6] == 1.0) {
            sunday_cluster = true;
            CHECK(cm.entropy[static_cast<std::size_t>(Feature::DayType)] == 0.0);
        } else {
            CHECK(cm.entropy[0] == doctest::Approx(std::log2(6.0)).epsilon(1e-9));
        }
        CHECK(cm.entropy[0] <= std::log2(7.0) + 1e-12);
        CHECK(cm.entropy[1] <= std::log2(12.0) + 1e-12);
        CHECK(cm.entropy[2] <= std::log2(100.0) + 1e-12);
        CHECK(cm.entropy[3] <= std::log2(100.0) + 1e-12);
        CHECK(cm.peak_coincidence > 0.9);
    }
    CHECK(sunday_cluster);
    CHECK(report.usability.threshold_ratio == 1.0);

    // Members per percentile summed over clusters equal the dataset counts.
    const auto table = build_feature_table(data.dataset.profiles());
    std::vector<std::size_t> per_bin(100, 0);
    for (std::size_t i = 0; i < data.dataset.size(); ++i) {
        if (model.labels[i] >= 0) ++per_bin[table.values[i][2]];
    }
    for (std::size_t b = 0; b < 100; ++b) CHECK(per_bin[b] == table.counts[2][b]);
}
