#include "loadpat/external.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace loadpat {

namespace {

double median(std::vector<double> v) {
    const auto n = v.size();
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (n % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(v.begin(), mid);
    return 0.5 * (lower + upper);
}

}  // namespace

ErrorMetrics error_metrics(std::span<const double> member_values, double representative) {
    ErrorMetrics m;
    std::vector<double> ape, log_q, abs_log_q;
    for (double h : member_values) {
        if (!(h > 0.0)) {
            ++m.excluded;
            continue;
        }
        const double q = representative / h;
        ape.push_back(std::abs(h - representative) / h);
        log_q.push_back(std::log(q));
        abs_log_q.push_back(std::abs(std::log(q)));
    }
    m.included = ape.size();
    if (ape.empty()) return m;
    double sum = 0.0;
    for (double e : ape) sum += e;
    m.mape = 100.0 * sum / static_cast<double>(ape.size());
    m.mdape = 100.0 * median(ape);
    m.mdlq = median(log_q);
    m.mdsyma = 100.0 * (std::exp(median(abs_log_q)) - 1.0);
    return m;
}

DemandErrors demand_errors(const HourlyValues& rdlp, std::span<const HourlyValues> members) {
    std::vector<double> totals, peaks;
    totals.reserve(members.size());
    peaks.reserve(members.size());
    for (const auto& m : members) {
        totals.push_back(total_demand(m));
        peaks.push_back(peak_demand(m));
    }
    return {error_metrics(totals, total_demand(rdlp)), error_metrics(peaks, peak_demand(rdlp))};
}

std::bitset<kHours> peak_hours(const HourlyValues& values) {
    std::bitset<kHours> out;
    const double half = 0.5 * peak_demand(values);
    for (std::size_t t = 0; t < kHours; ++t) out[t] = values[t] > half;
    return out;
}

double peak_coincidence_ratio(const HourlyValues& rdlp, std::span<const HourlyValues> members) {
    const auto ref = peak_hours(rdlp);
    if (ref.none() || members.empty()) return 0.0;
    double coincidence = 0.0;
    for (const auto& m : members) coincidence += static_cast<double>((peak_hours(m) & ref).count());
    return coincidence / static_cast<double>(members.size()) / static_cast<double>(ref.count());
}

std::string_view to_string(Feature f) {
    switch (f) {
        case Feature::DayType: return "daytype";
        case Feature::Month: return "month";
        case Feature::TotalDemand: return "total_demand";
        case Feature::PeakDemand: return "peak_demand";
    }
    return "?";
}

std::size_t feature_cardinality(Feature f) {
    switch (f) {
        case Feature::DayType: return kDayTypes;
        case Feature::Month: return kMonths;
        case Feature::TotalDemand:
        case Feature::PeakDemand: return kPercentiles;
    }
    return 0;
}

PercentileBins::PercentileBins(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("percentile bins need at least one value");
    std::sort(values.begin(), values.end());
    const auto n = values.size();
    edges_.reserve(kPercentiles - 1);
    for (std::size_t k = 1; k < kPercentiles; ++k) {
        // Value at empirical rank ceil(k * n / 100).
        const auto rank = (k * n + kPercentiles - 1) / kPercentiles;
        edges_.push_back(values[std::max<std::size_t>(rank, 1) - 1]);
    }
}

int PercentileBins::bin_of(double value) const {
    // Edges strictly below the value; ties fall to the lower bin.
    return 1 + static_cast<int>(std::lower_bound(edges_.begin(), edges_.end(), value) - edges_.begin());
}

FeatureTable build_feature_table(std::span<const DailyLoadProfile> rows, const SeasonMap& seasons) {
    FeatureTable table;
    std::vector<double> totals, peaks;
    totals.reserve(rows.size());
    peaks.reserve(rows.size());
    for (const auto& p : rows) {
        totals.push_back(total_demand(p.values));
        peaks.push_back(peak_demand(p.values));
    }
    table.total_bins = PercentileBins(totals);
    table.peak_bins = PercentileBins(peaks);
    for (std::size_t f = 0; f < kFeatures; ++f) table.counts[f].assign(feature_cardinality(static_cast<Feature>(f)), 0);

    table.values.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto t = temporal_attributes(rows[i].date, seasons);
        std::array<int, kFeatures> v{static_cast<int>(t.daytype), static_cast<int>(t.month) - 1,
                                     table.total_bins.bin_of(totals[i]) - 1, table.peak_bins.bin_of(peaks[i]) - 1};
        for (std::size_t f = 0; f < kFeatures; ++f) ++table.counts[f][static_cast<std::size_t>(v[f])];
        table.values.push_back(v);
    }
    return table;
}

std::vector<double> assignment_likelihood(std::span<const std::size_t> member_counts,
                                          std::span<const std::size_t> dataset_counts) {
    if (member_counts.size() != dataset_counts.size()) throw std::invalid_argument("count vectors differ in length");
    std::vector<double> p(member_counts.size(), 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (member_counts[i] == 0) continue;
        if (dataset_counts[i] < member_counts[i]) throw std::invalid_argument("member count exceeds dataset count");
        p[i] = static_cast<double>(member_counts[i]) / static_cast<double>(dataset_counts[i]);
        sum += p[i];
    }
    if (sum > 0.0) {
        for (double& x : p) x /= sum;
    }
    return p;
}

double entropy_bits(std::span<const double> p) {
    double s = 0.0;
    bool any = false;
    for (double x : p) {
        if (x > 0.0) {
            s -= x * std::log2(x);
            any = true;
        }
    }
    if (!any) throw std::invalid_argument("entropy of an empty cluster");
    return std::max(s, 0.0);
}

double auto_membership_threshold(std::size_t households) {
    return 0.05 * static_cast<double>(households) * 14.0;
}

UsabilityReport usability(std::span<const Rdlp> rdlps, double mean_peak, double threshold, double rel_tol) {
    UsabilityReport r;
    r.threshold = threshold;
    const double zero_tol = rel_tol * mean_peak;
    std::size_t above = 0;
    for (const auto& rdlp : rdlps) {
        if (peak_demand(rdlp.values) <= zero_tol) r.zero_profile_represented = true;
        if (static_cast<double>(rdlp.member_count) > threshold) ++above;
    }
    r.threshold_ratio = rdlps.empty() ? 0.0 : static_cast<double>(above) / static_cast<double>(rdlps.size());
    return r;
}

ExternalReport evaluate_external(const ClusterModel& model, const ProfileDataset& dataset, double threshold,
                                 const SeasonMap& seasons) {
    ExternalReport report;
    report.rdlps = build_rdlps(model, dataset);

    std::vector<std::size_t> clustered;
    std::vector<DailyLoadProfile> rows;
    for (std::size_t r = 0; r < dataset.size(); ++r) {
        if (model.labels[r] >= 0) {
            clustered.push_back(r);
            rows.push_back(dataset[r]);
        }
    }
    const auto table = build_feature_table(rows, seasons);

    // Members per cluster, in clustered-row order.
    std::vector<std::vector<std::size_t>> members(model.n_clusters);
    for (std::size_t i = 0; i < clustered.size(); ++i) {
        members[static_cast<std::size_t>(model.labels[clustered[i]])].push_back(i);
    }
    std::vector<int> bin_of_cluster(model.n_clusters, 1);
    for (const auto& bm : model.bins) {
        for (std::size_t c = 0; c < bm.centroids.rows(); ++c) bin_of_cluster[static_cast<std::size_t>(bm.first_cluster) + c] = bm.bin;
    }

    double mean_peak = 0.0;
    for (const auto& p : rows) mean_peak += peak_demand(p.values);
    mean_peak /= static_cast<double>(rows.size());

    for (const auto& rdlp : report.rdlps) {
        const auto& idx = members[static_cast<std::size_t>(rdlp.cluster)];
        std::vector<HourlyValues> values;
        values.reserve(idx.size());
        std::array<std::vector<std::size_t>, kFeatures> counts;
        for (std::size_t f = 0; f < kFeatures; ++f) counts[f].assign(table.counts[f].size(), 0);
        for (auto i : idx) {
            values.push_back(rows[i].values);
            for (std::size_t f = 0; f < kFeatures; ++f) ++counts[f][static_cast<std::size_t>(table.values[i][f])];
        }

        ClusterMeasures m;
        m.cluster = rdlp.cluster;
        m.bin = bin_of_cluster[static_cast<std::size_t>(rdlp.cluster)];
        m.member_count = rdlp.member_count;
        m.errors = demand_errors(rdlp.values, values);
        m.peak_coincidence = peak_coincidence_ratio(rdlp.values, values);
        for (std::size_t f = 0; f < kFeatures; ++f) {
            const auto p = assignment_likelihood(counts[f], table.counts[f]);
            m.entropy[f] = entropy_bits(p);
            if (static_cast<Feature>(f) == Feature::DayType) std::copy(p.begin(), p.end(), m.daytype_likelihood.begin());
        }
        report.clusters.push_back(m);
    }
    report.usability = usability(report.rdlps, mean_peak, threshold);
    return report;
}

}  // namespace loadpat
