#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "loadpat/calendar.hpp"
#include "loadpat/experiment.hpp"
#include "loadpat/matrix.hpp"
#include "loadpat/profile.hpp"
#include "loadpat/softmax.hpp"
#include "loadpat/survey.hpp"

namespace loadpat {

// One-hot feature names: "<attribute>=<value>" for every survey vocabulary
// value, then "daytype=<Mon..Sun>" and "season=<winter|summer>".
class FeatureVocabulary {
public:
    FeatureVocabulary();

    std::size_t size() const { return names_.size(); }
    const std::string& name(std::size_t i) const { return names_.at(i); }
    std::optional<std::size_t> find(const std::string& name) const;

    std::size_t index(Attribute a, std::string_view value) const;
    std::size_t index(DayType d) const;
    std::size_t index(Season s) const;

private:
    std::vector<std::string> names_;
};

std::string feature_name(Attribute a, std::string_view value);
std::string feature_name(DayType d);
std::string feature_name(Season s);

struct TrainingSet {
    FeatureVocabulary vocabulary;
    Matrix features;
    std::vector<int> labels;        // cluster id per training row
    std::vector<std::size_t> rows;  // dataset row per training row
    std::size_t skipped_rows = 0;   // clustered rows whose household has no survey record
};

// One row per clustered profile (cluster_labels >= 0) of a surveyed household.
TrainingSet build_training_set(const ProfileDataset& dataset, std::span<const int> cluster_labels,
                               std::span<const SurveyRecord> survey, const SeasonMap& seasons = SeasonMap{});

struct ArchetypeModel {
    FeatureVocabulary vocabulary;
    SoftmaxModel regression;
    Matrix odds_ratios;  // features x classes, class order of regression.labels

    std::optional<double> odds_ratio(const std::string& feature, int cluster) const;
};

ArchetypeModel fit_archetype_model(const TrainingSet& training, const SoftmaxOptions& options = {});

inline constexpr double kAssociationThreshold = 1.05;

struct Association {
    std::string feature;
    int cluster = 0;
    double odds_ratio = 0.0;
};

// (feature value, cluster) pairs with odds ratio >= threshold.
std::vector<Association> associate(const ArchetypeModel& model, double threshold = kAssociationThreshold);

struct ArchetypeCluster {
    int cluster = 0;
    std::vector<DayType> daytypes;  // associated day types
    std::vector<Season> seasons;    // associated seasons
};

struct Archetype {
    SocioFilter filter;
    std::vector<ArchetypeCluster> clusters;
    // coverage[season][daytype]: clusters serving that cell. A cluster with no
    // associated day type (or season) serves all of them.
    std::array<std::array<std::vector<int>, kDayTypes>, kSeasons> coverage;
    std::vector<std::string> warnings;
};

// Clusters associated with at least one allowed value of every filtered
// attribute, tagged with their temporal associations. Throws ConfigError for
// a value outside the attribute vocabulary.
Archetype assemble_archetype(std::span<const Association> associations, const SocioFilter& filter);

void write_archetype_report(std::ostream& out, const Archetype& archetype, std::span<const Rdlp> rdlps);

}  // namespace loadpat
