#include "loadpat/normalize.hpp"

#include <algorithm>
#include <cmath>

#include "loadpat/errors.hpp"

namespace loadpat {

std::string_view to_string(Normalization n) {
    switch (n) {
        case Normalization::None: return "none";
        case Normalization::Unit: return "unit";
        case Normalization::Deminning: return "deminning";
        case Normalization::ZeroOne: return "zero_one";
        case Normalization::SaNorm: return "sa_norm";
    }
    return "?";
}

Normalization parse_normalization(std::string_view name) {
    for (auto n : {Normalization::None, Normalization::Unit, Normalization::Deminning, Normalization::ZeroOne,
                   Normalization::SaNorm}) {
        if (to_string(n) == name) return n;
    }
    throw ConfigError("unknown normalization '" + std::string(name) + "'");
}

namespace {

double l2_norm(const HourlyValues& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

std::optional<HourlyValues> divide(HourlyValues v, double denominator) {
    if (!(denominator > 0.0)) return std::nullopt;
    for (double& x : v) x /= denominator;
    return v;
}

}  // namespace

std::optional<HourlyValues> normalize(const HourlyValues& values, Normalization method) {
    switch (method) {
        case Normalization::None: return values;
        case Normalization::Unit: return divide(values, l2_norm(values));
        case Normalization::Deminning: {
            const double lo = *std::min_element(values.begin(), values.end());
            HourlyValues shifted = values;
            for (double& x : shifted) x -= lo;
            return divide(shifted, l2_norm(shifted));
        }
        case Normalization::ZeroOne: return divide(values, peak_demand(values));
        case Normalization::SaNorm: return divide(values, total_demand(values) / static_cast<double>(kHours));
    }
    return std::nullopt;
}

FilterResult filter_zeros(const ProfileDataset& dataset, bool keep_zeros) {
    FilterResult out;
    out.kept_rows.reserve(dataset.size());
    for (std::size_t r = 0; r < dataset.size(); ++r) {
        if (keep_zeros || !is_all_zero(dataset[r].values)) out.kept_rows.push_back(r);
    }
    out.removed = dataset.size() - out.kept_rows.size();
    out.dataset = out.removed == 0 ? dataset : dataset.subset(out.kept_rows);
    return out;
}

}  // namespace loadpat
