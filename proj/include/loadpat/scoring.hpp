#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "loadpat/external.hpp"
#include "loadpat/matrix.hpp"

namespace loadpat {

enum class Measure {
    ZeroProfile = 0,
    ThresholdRatio,
    PeakCoincidence,
    PeakDemandError,
    TotalDemandError,
    PeakDemandEntropy,
    TotalDemandEntropy,
    DayTypeEntropy,
    MonthlyEntropy,
};
inline constexpr std::size_t kMeasures = 9;
inline constexpr std::array<Measure, kMeasures> kAllMeasures{
    Measure::ZeroProfile,       Measure::ThresholdRatio,     Measure::PeakCoincidence,
    Measure::PeakDemandError,   Measure::TotalDemandError,   Measure::PeakDemandEntropy,
    Measure::TotalDemandEntropy, Measure::DayTypeEntropy,    Measure::MonthlyEntropy};

std::string_view to_string(Measure m);
Measure parse_measure(std::string_view name);

enum class Direction { LowerIsBetter, HigherIsBetter };

struct WeightProfile {
    std::array<double, kMeasures> weights{};

    // zero-profile 1, threshold ratio 2, peak coincidence 3, demand errors 6,
    // demand entropies 5, day-type and monthly entropy 4.
    static WeightProfile defaults();

    double operator[](Measure m) const { return weights[static_cast<std::size_t>(m)]; }
    double& operator[](Measure m) { return weights[static_cast<std::size_t>(m)]; }
    double sum() const;
    void validate() const;  // every weight > 0
};

// Order within the demand-error arrays.
enum class ErrorMetric { Mape = 0, Mdape, Mdlq, Mdsyma };
inline constexpr std::size_t kErrorMetrics = 4;

// Experiment-level values of every measure.
struct ExperimentValues {
    std::string id;
    bool scorable = true;
    bool zero_profile = false;
    double threshold_ratio = 0.0;
    double peak_coincidence = 0.0;
    std::array<double, kErrorMetrics> total_errors{};
    std::array<double, kErrorMetrics> peak_errors{};
    std::array<double, kFeatures> entropy{};  // indexed by Feature
    std::optional<double> ci;                 // carried for comparison only
};

// Member-weighted mean of each cluster measure over clusters with more than
// `threshold` members. No qualifying cluster marks the experiment non-scorable.
ExperimentValues aggregate_experiment_measures(std::string id, std::span<const ClusterMeasures> clusters,
                                               const UsabilityReport& usability, double threshold);

inline constexpr double kRankTieTolerance = 1e-9;

// 1-based ranks with average ranks for ties. Values within rel_tol of the
// first value of a run (relative, floored at 1) tie, so summation-order noise
// does not decide a rank. Invalid entries tie for last.
std::vector<double> rank_values(std::span<const double> values, Direction direction,
                                const std::vector<bool>& valid = {}, double rel_tol = kRankTieTolerance);

struct ScoringOptions {
    bool include_zero_profile = true;
    std::map<Measure, Direction> direction_overrides;
};

Direction default_direction(Measure m);

struct ScoreCard {
    std::vector<std::string> experiments;
    std::vector<bool> scorable;
    std::vector<std::optional<double>> ci;
    Matrix ranks;  // experiments x kMeasures
    WeightProfile weights;
    bool include_zero_profile = true;
    std::vector<double> totals;
    std::vector<std::size_t> order;  // experiment indices, best first

    double rank(std::size_t experiment, Measure m) const { return ranks(experiment, static_cast<std::size_t>(m)); }
};

// Sum of weight * rank per experiment, ascending order (stable on ties).
// Ranks of the zero-profile measure are ignored when include_zero_profile is false.
ScoreCard total_score(std::vector<std::string> experiments, Matrix ranks, const WeightProfile& weights,
                      bool include_zero_profile = true);

// Ranks every measure (each demand error as the mean of its four metric ranks,
// mdlq by magnitude) and totals the weighted ranks.
ScoreCard build_scorecard(std::span<const ExperimentValues> experiments, const WeightProfile& weights,
                          const ScoringOptions& options = {});

// Measures as rows with weights, experiments as columns, totals footer, then
// the final ranking with the CI rank for comparison.
void write_scorecard_text(std::ostream& out, const ScoreCard& card);

}  // namespace loadpat
