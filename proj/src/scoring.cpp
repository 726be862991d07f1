#include "loadpat/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "loadpat/errors.hpp"

namespace loadpat {

std::string_view to_string(Measure m) {
    switch (m) {
        case Measure::ZeroProfile: return "zero_profile";
        case Measure::ThresholdRatio: return "threshold_ratio";
        case Measure::PeakCoincidence: return "peak_coincidence_ratio";
        case Measure::PeakDemandError: return "peak_demand_error";
        case Measure::TotalDemandError: return "total_demand_error";
        case Measure::PeakDemandEntropy: return "peak_demand_entropy";
        case Measure::TotalDemandEntropy: return "total_demand_entropy";
        case Measure::DayTypeEntropy: return "daytype_entropy";
        case Measure::MonthlyEntropy: return "monthly_entropy";
    }
    return "?";
}

Measure parse_measure(std::string_view name) {
    for (auto m : kAllMeasures) {
        if (to_string(m) == name) return m;
    }
    throw ConfigError("unknown measure '" + std::string(name) + "'");
}

WeightProfile WeightProfile::defaults() {
    WeightProfile w;
    w[Measure::ZeroProfile] = 1;
    w[Measure::ThresholdRatio] = 2;
    w[Measure::PeakCoincidence] = 3;
    w[Measure::PeakDemandError] = 6;
    w[Measure::TotalDemandError] = 6;
    w[Measure::PeakDemandEntropy] = 5;
    w[Measure::TotalDemandEntropy] = 5;
    w[Measure::DayTypeEntropy] = 4;
    w[Measure::MonthlyEntropy] = 4;
    return w;
}

double WeightProfile::sum() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

void WeightProfile::validate() const {
    for (auto m : kAllMeasures) {
        if (!((*this)[m] > 0.0)) throw ConfigError("weight of " + std::string(to_string(m)) + " must be positive");
    }
}

ExperimentValues aggregate_experiment_measures(std::string id, std::span<const ClusterMeasures> clusters,
                                               const UsabilityReport& usability, double threshold) {
    ExperimentValues v;
    v.id = std::move(id);
    v.zero_profile = usability.zero_profile_represented;
    v.threshold_ratio = usability.threshold_ratio;

    double weight = 0.0;
    for (const auto& c : clusters) {
        if (static_cast<double>(c.member_count) <= threshold) continue;
        const double w = static_cast<double>(c.member_count);
        weight += w;
        v.peak_coincidence += w * c.peak_coincidence;
        const std::array<double, kErrorMetrics> total{c.errors.total.mape, c.errors.total.mdape, c.errors.total.mdlq,
                                                     c.errors.total.mdsyma};
        const std::array<double, kErrorMetrics> peak{c.errors.peak.mape, c.errors.peak.mdape, c.errors.peak.mdlq,
                                                    c.errors.peak.mdsyma};
        for (std::size_t e = 0; e < kErrorMetrics; ++e) {
            v.total_errors[e] += w * total[e];
            v.peak_errors[e] += w * peak[e];
        }
        for (std::size_t f = 0; f < kFeatures; ++f) v.entropy[f] += w * c.entropy[f];
    }
    if (weight == 0.0) {
        v.scorable = false;
        return v;
    }
    v.peak_coincidence /= weight;
    for (std::size_t e = 0; e < kErrorMetrics; ++e) {
        v.total_errors[e] /= weight;
        v.peak_errors[e] /= weight;
    }
    for (auto& e : v.entropy) e /= weight;
    return v;
}

std::vector<double> rank_values(std::span<const double> values, Direction direction, const std::vector<bool>& valid,
                                double rel_tol) {
    const auto n = values.size();
    if (!valid.empty() && valid.size() != n) throw std::invalid_argument("validity mask length mismatch");
    auto is_valid = [&](std::size_t i) { return valid.empty() || valid[i]; };

    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i) {
        if (is_valid(i)) idx.push_back(i);
    }
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return direction == Direction::LowerIsBetter ? values[a] < values[b] : values[a] > values[b];
    });

    std::vector<double> ranks(n, 0.0);
    for (std::size_t start = 0; start < idx.size();) {
        std::size_t end = start + 1;
        const double first = values[idx[start]];
        auto same = [&](double v) { return std::abs(v - first) <= rel_tol * std::max({1.0, std::abs(v), std::abs(first)}); };
        while (end < idx.size() && same(values[idx[end]])) ++end;
        const double avg = (static_cast<double>(start + 1) + static_cast<double>(end)) / 2.0;
        for (std::size_t j = start; j < end; ++j) ranks[idx[j]] = avg;
        start = end;
    }
    const double trailing = (static_cast<double>(idx.size() + 1) + static_cast<double>(n)) / 2.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!is_valid(i)) ranks[i] = trailing;
    }
    return ranks;
}

Direction default_direction(Measure m) {
    switch (m) {
        case Measure::ZeroProfile:
        case Measure::ThresholdRatio:
        case Measure::PeakCoincidence: return Direction::HigherIsBetter;
        default: return Direction::LowerIsBetter;
    }
}

ScoreCard total_score(std::vector<std::string> experiments, Matrix ranks, const WeightProfile& weights,
                      bool include_zero_profile) {
    weights.validate();
    if (ranks.rows() != experiments.size() || (ranks.rows() > 0 && ranks.cols() != kMeasures)) {
        throw std::invalid_argument("rank matrix must be experiments x 9");
    }
    ScoreCard card;
    card.experiments = std::move(experiments);
    card.weights = weights;
    card.include_zero_profile = include_zero_profile;
    card.scorable.assign(card.experiments.size(), true);
    card.ci.assign(card.experiments.size(), std::nullopt);
    card.totals.assign(card.experiments.size(), 0.0);
    for (std::size_t e = 0; e < card.experiments.size(); ++e) {
        for (auto m : kAllMeasures) {
            if (m == Measure::ZeroProfile && !include_zero_profile) continue;
            card.totals[e] += weights[m] * ranks(e, static_cast<std::size_t>(m));
        }
    }
    card.ranks = std::move(ranks);
    card.order.resize(card.experiments.size());
    std::iota(card.order.begin(), card.order.end(), 0);
    std::stable_sort(card.order.begin(), card.order.end(),
                     [&](std::size_t a, std::size_t b) { return card.totals[a] < card.totals[b]; });
    return card;
}

ScoreCard build_scorecard(std::span<const ExperimentValues> experiments, const WeightProfile& weights,
                          const ScoringOptions& options) {
    if (experiments.empty()) throw std::invalid_argument("no experiments to score");
    const auto n = experiments.size();
    auto direction = [&](Measure m) {
        auto it = options.direction_overrides.find(m);
        return it != options.direction_overrides.end() ? it->second : default_direction(m);
    };
    std::vector<bool> valid(n);
    for (std::size_t e = 0; e < n; ++e) valid[e] = experiments[e].scorable;

    auto column = [&](auto getter) {
        std::vector<double> v(n);
        for (std::size_t e = 0; e < n; ++e) v[e] = getter(experiments[e]);
        return v;
    };
    auto set_ranks = [&](Matrix& ranks, Measure m, const std::vector<double>& r) {
        for (std::size_t e = 0; e < n; ++e) ranks(e, static_cast<std::size_t>(m)) = r[e];
    };

    Matrix ranks(n, kMeasures);
    set_ranks(ranks, Measure::ZeroProfile,
              rank_values(column([](const ExperimentValues& v) { return v.zero_profile ? 1.0 : 0.0; }),
                          direction(Measure::ZeroProfile), valid));
    set_ranks(ranks, Measure::ThresholdRatio,
              rank_values(column([](const ExperimentValues& v) { return v.threshold_ratio; }),
                          direction(Measure::ThresholdRatio), valid));
    set_ranks(ranks, Measure::PeakCoincidence,
              rank_values(column([](const ExperimentValues& v) { return v.peak_coincidence; }),
                          direction(Measure::PeakCoincidence), valid));

    auto error_rank = [&](Measure m, bool peak) {
        std::vector<double> mean(n, 0.0);
        for (std::size_t metric = 0; metric < kErrorMetrics; ++metric) {
            auto values = column([&](const ExperimentValues& v) {
                const double x = peak ? v.peak_errors[metric] : v.total_errors[metric];
                return metric == static_cast<std::size_t>(ErrorMetric::Mdlq) ? std::abs(x) : x;
            });
            auto r = rank_values(values, direction(m), valid);
            for (std::size_t e = 0; e < n; ++e) mean[e] += r[e] / static_cast<double>(kErrorMetrics);
        }
        set_ranks(ranks, m, mean);
    };
    error_rank(Measure::PeakDemandError, true);
    error_rank(Measure::TotalDemandError, false);

    const std::array<std::pair<Measure, Feature>, 4> entropies{{{Measure::DayTypeEntropy, Feature::DayType},
                                                                {Measure::MonthlyEntropy, Feature::Month},
                                                                {Measure::TotalDemandEntropy, Feature::TotalDemand},
                                                                {Measure::PeakDemandEntropy, Feature::PeakDemand}}};
    for (auto [m, f] : entropies) {
        set_ranks(ranks, m,
                  rank_values(column([f = f](const ExperimentValues& v) { return v.entropy[static_cast<std::size_t>(f)]; }),
                              direction(m), valid));
    }

    std::vector<std::string> ids;
    for (const auto& e : experiments) ids.push_back(e.id);
    auto card = total_score(std::move(ids), std::move(ranks), weights, options.include_zero_profile);
    for (std::size_t e = 0; e < n; ++e) {
        card.scorable[e] = experiments[e].scorable;
        card.ci[e] = experiments[e].ci;
    }
    return card;
}

void write_scorecard_text(std::ostream& out, const ScoreCard& card) {
    const auto n = card.experiments.size();
    std::size_t width = 10;
    for (const auto& id : card.experiments) width = std::max(width, id.size() + 2);
    auto fmt = [](double v, int precision) {
        std::ostringstream s;
        s << std::fixed << std::setprecision(precision) << v;
        return s.str();
    };

    out << std::left << std::setw(26) << "measure" << std::right << std::setw(8) << "weight";
    for (const auto& id : card.experiments) out << std::setw(static_cast<int>(width)) << id;
    out << '\n';
    for (auto m : kAllMeasures) {
        if (m == Measure::ZeroProfile && !card.include_zero_profile) continue;
        out << std::left << std::setw(26) << to_string(m) << std::right << std::setw(8) << fmt(card.weights[m], 1);
        for (std::size_t e = 0; e < n; ++e) out << std::setw(static_cast<int>(width)) << fmt(card.rank(e, m), 2);
        out << '\n';
    }
    out << std::left << std::setw(34) << "SCORE" << std::right;
    for (std::size_t e = 0; e < n; ++e) out << std::setw(static_cast<int>(width)) << fmt(card.totals[e], 1);
    out << "\n\n";

    // CI rank: lower CI ranks first; experiments without a CI tie for last.
    std::vector<double> ci_values(n, 0.0);
    std::vector<bool> has_ci(n);
    for (std::size_t e = 0; e < n; ++e) {
        has_ci[e] = card.ci[e].has_value();
        ci_values[e] = card.ci[e].value_or(0.0);
    }
    const auto ci_rank = rank_values(ci_values, Direction::LowerIsBetter, has_ci);

    out << std::left << std::setw(6) << "rank" << std::setw(static_cast<int>(width)) << "experiment" << std::right
        << std::setw(10) << "score" << std::setw(10) << "CI" << std::setw(10) << "CI rank" << '\n';
    for (std::size_t pos = 0; pos < n; ++pos) {
        const auto e = card.order[pos];
        out << std::left << std::setw(6) << pos + 1 << std::setw(static_cast<int>(width)) << card.experiments[e]
            << std::right << std::setw(10) << fmt(card.totals[e], 1) << std::setw(10)
            << (card.ci[e] ? fmt(*card.ci[e], 3) : std::string("undef")) << std::setw(10) << fmt(ci_rank[e], 1);
        if (!card.scorable[e]) out << "  (non-scorable)";
        out << '\n';
    }
}

}  // namespace loadpat
