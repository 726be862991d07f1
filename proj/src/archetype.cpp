#include "loadpat/archetype.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <ostream>
#include <unordered_map>

#include "loadpat/errors.hpp"

namespace loadpat {

std::string feature_name(Attribute a, std::string_view value) {
    return std::string(to_string(a)) + "=" + std::string(value);
}
std::string feature_name(DayType d) { return "daytype=" + std::string(to_string(d)); }
std::string feature_name(Season s) { return "season=" + std::string(to_string(s)); }

FeatureVocabulary::FeatureVocabulary() {
    for (auto a : kAllAttributes) {
        for (auto v : vocabulary(a)) names_.push_back(feature_name(a, v));
    }
    for (std::size_t d = 0; d < kDayTypes; ++d) names_.push_back(feature_name(static_cast<DayType>(d)));
    for (std::size_t s = 0; s < kSeasons; ++s) names_.push_back(feature_name(static_cast<Season>(s)));
}

std::optional<std::size_t> FeatureVocabulary::find(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names_.begin());
}

std::size_t FeatureVocabulary::index(Attribute a, std::string_view value) const {
    auto i = find(feature_name(a, value));
    if (!i) throw ConfigError("value '" + std::string(value) + "' is not in the " + std::string(to_string(a)) + " vocabulary");
    return *i;
}
std::size_t FeatureVocabulary::index(DayType d) const { return *find(feature_name(d)); }
std::size_t FeatureVocabulary::index(Season s) const { return *find(feature_name(s)); }

TrainingSet build_training_set(const ProfileDataset& dataset, std::span<const int> cluster_labels,
                               std::span<const SurveyRecord> survey, const SeasonMap& seasons) {
    if (cluster_labels.size() != dataset.size()) throw DataError("cluster labels do not cover the dataset");
    std::unordered_map<std::string, const SurveyRecord*> by_household;
    for (const auto& rec : survey) by_household[rec.household_id] = &rec;

    TrainingSet out;
    const auto& vocab = out.vocabulary;
    std::vector<double> x(vocab.size());
    for (std::size_t r = 0; r < dataset.size(); ++r) {
        if (cluster_labels[r] < 0) continue;
        auto it = by_household.find(dataset[r].household_id);
        if (it == by_household.end()) {
            ++out.skipped_rows;
            continue;
        }
        std::fill(x.begin(), x.end(), 0.0);
        for (auto a : kAllAttributes) x[vocab.index(a, (*it->second)[a])] = 1.0;
        const auto t = temporal_attributes(dataset[r].date, seasons);
        x[vocab.index(t.daytype)] = 1.0;
        x[vocab.index(t.season)] = 1.0;
        out.features.push_row(x);
        out.labels.push_back(cluster_labels[r]);
        out.rows.push_back(r);
    }
    return out;
}

std::optional<double> ArchetypeModel::odds_ratio(const std::string& feature, int cluster) const {
    auto f = vocabulary.find(feature);
    auto c = std::find(regression.labels.begin(), regression.labels.end(), cluster);
    if (!f || c == regression.labels.end()) return std::nullopt;
    return odds_ratios(*f, static_cast<std::size_t>(c - regression.labels.begin()));
}

ArchetypeModel fit_archetype_model(const TrainingSet& training, const SoftmaxOptions& options) {
    ArchetypeModel model;
    model.vocabulary = training.vocabulary;
    model.regression = fit_softmax(training.features, training.labels, options);
    const auto k = model.regression.n_classes();
    model.odds_ratios = Matrix(model.vocabulary.size(), k);
    for (std::size_t f = 0; f < model.vocabulary.size(); ++f) {
        for (std::size_t c = 0; c < k; ++c) model.odds_ratios(f, c) = model.regression.odds_ratio(c, f);
    }
    return model;
}

std::vector<Association> associate(const ArchetypeModel& model, double threshold) {
    std::vector<Association> out;
    for (std::size_t c = 0; c < model.regression.n_classes(); ++c) {
        for (std::size_t f = 0; f < model.vocabulary.size(); ++f) {
            const double ratio = model.odds_ratios(f, c);
            if (ratio >= threshold) out.push_back({model.vocabulary.name(f), model.regression.labels[c], ratio});
        }
    }
    return out;
}

Archetype assemble_archetype(std::span<const Association> associations, const SocioFilter& filter) {
    for (const auto& [attr, values] : filter) {
        for (const auto& v : values) {
            if (!in_vocabulary(attr, v)) {
                throw ConfigError("archetype filter value '" + v + "' is not in the " + std::string(to_string(attr)) +
                                  " vocabulary");
            }
        }
    }

    std::map<int, std::vector<std::string>> features_of;
    for (const auto& a : associations) features_of[a.cluster].push_back(a.feature);

    Archetype out;
    out.filter = filter;
    for (const auto& [cluster, features] : features_of) {
        auto has = [&](const std::string& f) { return std::find(features.begin(), features.end(), f) != features.end(); };
        bool match = true;
        for (const auto& [attr, values] : filter) {
            match = match && std::any_of(values.begin(), values.end(),
                                         [&](const std::string& v) { return has(feature_name(attr, v)); });
        }
        if (!match) continue;
        ArchetypeCluster ac{cluster, {}, {}};
        for (std::size_t d = 0; d < kDayTypes; ++d) {
            if (has(feature_name(static_cast<DayType>(d)))) ac.daytypes.push_back(static_cast<DayType>(d));
        }
        for (std::size_t s = 0; s < kSeasons; ++s) {
            if (has(feature_name(static_cast<Season>(s)))) ac.seasons.push_back(static_cast<Season>(s));
        }
        out.clusters.push_back(ac);
    }

    for (const auto& ac : out.clusters) {
        for (std::size_t s = 0; s < kSeasons; ++s) {
            const bool season_ok = ac.seasons.empty() ||
                std::find(ac.seasons.begin(), ac.seasons.end(), static_cast<Season>(s)) != ac.seasons.end();
            if (!season_ok) continue;
            for (std::size_t d = 0; d < kDayTypes; ++d) {
                const bool day_ok = ac.daytypes.empty() ||
                    std::find(ac.daytypes.begin(), ac.daytypes.end(), static_cast<DayType>(d)) != ac.daytypes.end();
                if (day_ok) out.coverage[s][d].push_back(ac.cluster);
            }
        }
    }
    if (out.clusters.empty()) out.warnings.push_back("no cluster is associated with every filtered attribute");
    for (std::size_t s = 0; s < kSeasons; ++s) {
        for (std::size_t d = 0; d < kDayTypes; ++d) {
            if (out.coverage[s][d].empty()) {
                out.warnings.push_back("no cluster covers " + std::string(to_string(static_cast<Season>(s))) + " " +
                                       std::string(to_string(static_cast<DayType>(d))));
            }
        }
    }
    return out;
}

void write_archetype_report(std::ostream& out, const Archetype& archetype, std::span<const Rdlp> rdlps) {
    out << "filter:\n";
    for (const auto& [attr, values] : archetype.filter) {
        out << "  " << to_string(attr) << ":";
        for (const auto& v : values) out << " [" << v << "]";
        out << '\n';
    }
    out << "clusters:\n";
    for (const auto& ac : archetype.clusters) {
        out << "  C" << ac.cluster << "  daytypes:";
        if (ac.daytypes.empty()) out << " any";
        for (auto d : ac.daytypes) out << ' ' << to_string(d);
        out << "  seasons:";
        if (ac.seasons.empty()) out << " any";
        for (auto s : ac.seasons) out << ' ' << to_string(s);
        auto it = std::find_if(rdlps.begin(), rdlps.end(), [&](const Rdlp& r) { return r.cluster == ac.cluster; });
        if (it != rdlps.end()) {
            out << "  members: " << it->member_count << "\n    rdlp:";
            for (double v : it->values) out << ' ' << std::fixed << std::setprecision(3) << v;
            out.unsetf(std::ios::floatfield);
        }
        out << '\n';
    }
    out << "coverage:\n  " << std::setw(8) << "";
    for (std::size_t d = 0; d < kDayTypes; ++d) out << std::setw(10) << to_string(static_cast<DayType>(d));
    out << '\n';
    for (std::size_t s = 0; s < kSeasons; ++s) {
        out << "  " << std::left << std::setw(8) << to_string(static_cast<Season>(s)) << std::right;
        for (std::size_t d = 0; d < kDayTypes; ++d) {
            std::string cell;
            for (int c : archetype.coverage[s][d]) cell += (cell.empty() ? "C" : ",C") + std::to_string(c);
            out << std::setw(10) << (cell.empty() ? "-" : cell);
        }
        out << '\n';
    }
    for (const auto& w : archetype.warnings) out << "warning: " << w << '\n';
}

}  // namespace loadpat
