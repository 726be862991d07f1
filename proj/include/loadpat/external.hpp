#pragma once

#include <array>
#include <bitset>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "loadpat/calendar.hpp"
#include "loadpat/experiment.hpp"
#include "loadpat/profile.hpp"

namespace loadpat {

// Deviation of a representative value r from member values h.
//   mape   = 100 * mean |h - r| / h
//   mdape  = 100 * median |h - r| / h
//   mdlq   = median ln(r / h)
//   mdsyma = 100 * (exp(median |ln(r / h)|) - 1)
// Members with h = 0 are excluded; `included` counts the rest. With no
// included member every metric is 0.
struct ErrorMetrics {
    double mape = 0.0;
    double mdape = 0.0;
    double mdlq = 0.0;
    double mdsyma = 0.0;
    std::size_t included = 0;
    std::size_t excluded = 0;
};

ErrorMetrics error_metrics(std::span<const double> member_values, double representative);

struct DemandErrors {
    ErrorMetrics total;
    ErrorMetrics peak;
};

DemandErrors demand_errors(const HourlyValues& rdlp, std::span<const HourlyValues> members);

// Hours whose value exceeds half the profile maximum. Empty for an all-zero profile.
std::bitset<kHours> peak_hours(const HourlyValues& values);

// Mean count of RDLP peak hours shared by each member, over the RDLP peak
// count. 0 for an all-zero RDLP.
double peak_coincidence_ratio(const HourlyValues& rdlp, std::span<const HourlyValues> members);

enum class Feature { DayType = 0, Month, TotalDemand, PeakDemand };
inline constexpr std::size_t kFeatures = 4;
inline constexpr std::size_t kPercentiles = 100;

std::string_view to_string(Feature f);
std::size_t feature_cardinality(Feature f);

// Equal-frequency percentile bins 1..100 over a sample; a value equal to an
// edge goes to the lower bin.
class PercentileBins {
public:
    PercentileBins() = default;
    explicit PercentileBins(std::vector<double> values);

    int bin_of(double value) const;  // 1-based
    const std::vector<double>& edges() const { return edges_; }

private:
    std::vector<double> edges_;  // 99 upper edges of bins 1..99
};

// Per-row feature values (0-based indices) plus their counts over the rows.
struct FeatureTable {
    std::vector<std::array<int, kFeatures>> values;
    std::array<std::vector<std::size_t>, kFeatures> counts;
    PercentileBins total_bins;
    PercentileBins peak_bins;
};

FeatureTable build_feature_table(std::span<const DailyLoadProfile> rows, const SeasonMap& seasons = SeasonMap{});

// q_i = member_counts_i / dataset_counts_i, then p = q / sum q.
std::vector<double> assignment_likelihood(std::span<const std::size_t> member_counts,
                                          std::span<const std::size_t> dataset_counts);

// -sum p log2 p over p > 0. Throws std::invalid_argument for an all-zero p
// (empty cluster).
double entropy_bits(std::span<const double> p);

struct ClusterMeasures {
    int cluster = 0;
    int bin = 1;
    std::size_t member_count = 0;
    DemandErrors errors;
    double peak_coincidence = 0.0;
    std::array<double, kFeatures> entropy{};
    std::array<double, kDayTypes> daytype_likelihood{};
};

struct UsabilityReport {
    bool zero_profile_represented = false;
    double threshold_ratio = 0.0;
    double threshold = 0.0;
};

// Threshold used on the full multi-million-profile survey data.
inline constexpr double kSurveyScaleMembershipThreshold = 10490.0;

// 5% of households using a cluster for 14 days.
double auto_membership_threshold(std::size_t households);

// An RDLP whose maximum is at most rel_tol times the mean daily peak counts as
// a zero profile.
UsabilityReport usability(std::span<const Rdlp> rdlps, double mean_peak, double threshold, double rel_tol = 1e-6);

struct ExternalReport {
    std::vector<Rdlp> rdlps;
    std::vector<ClusterMeasures> clusters;  // parallel to rdlps
    UsabilityReport usability;
};

// Measures every non-empty cluster of the model. Feature marginals and demand
// percentiles come from the rows the model clustered.
ExternalReport evaluate_external(const ClusterModel& model, const ProfileDataset& dataset, double threshold,
                                 const SeasonMap& seasons = SeasonMap{});

}  // namespace loadpat
