#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "loadpat/archetype.hpp"
#include "loadpat/experiment.hpp"
#include "loadpat/scoring.hpp"
#include "loadpat/softmax.hpp"
#include "loadpat/survey.hpp"
#include "loadpat/synth.hpp"
#include "loadpat/validity.hpp"

namespace loadpat {

// One experiment block of a suite config. Every combination of the listed
// values is a cell; m applies to k-means stages and s to SOM stages.
struct GridSpec {
    std::string name;
    std::vector<Algorithm> algorithms{Algorithm::Kmeans};
    std::vector<std::size_t> m{2};
    std::vector<std::size_t> s{2};
    std::vector<Normalization> normalizations{Normalization::None};
    std::vector<BinScheme> prebinning{BinScheme::None};
    std::size_t n_bins = 8;
    std::vector<bool> keep_zeros{true};
    std::optional<std::uint64_t> seed;
};

struct SuiteConfig {
    std::string digest;  // SHA-256 of the config bytes
    std::uint64_t seed = 0;

    // Either input files or a generator spec.
    std::optional<std::filesystem::path> profiles;
    std::optional<std::filesystem::path> survey;
    std::optional<GeneratorSpec> generator;

    std::size_t threads = 1;
    std::size_t top_k = 0;           // 0 = external measures for every completed cell
    std::optional<double> threshold;  // nullopt = auto from the household count
    WeightProfile weights = WeightProfile::defaults();
    ScoringOptions scoring;
    std::array<Season, kMonths> seasons{};
    AmcBinEdges amc_edges = AmcBinEdges::tariff_defaults();
    KmeansOptions kmeans;
    SomOptions som;
    SilhouetteOptions silhouette;
    std::vector<GridSpec> experiments;
};

// Relative data paths resolve against base_dir.
SuiteConfig parse_suite_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
SuiteConfig load_suite_config(const std::filesystem::path& path);

struct SuiteCell {
    std::string id;
    ExperimentConfig config;
};

// Cell ids: <name>-<algorithm>-<normalization>-<prebinning>-z<0|1>[-m<m>][-s<s>].
std::vector<SuiteCell> expand_grid(const SuiteConfig& config);

enum class CellStatus { Pending, Ok, Error };

struct ManifestEntry {
    std::string id;
    std::string digest;
    ExperimentConfig config;
    CellStatus status = CellStatus::Pending;
    std::string error;
    std::optional<double> ci;
    bool external = false;
    std::optional<double> score;
    std::optional<std::size_t> rank;
};

struct RunManifest {
    std::string run_id;
    std::string config_digest;
    std::string dataset_digest;
    std::uint64_t seed = 0;
    std::string profiles;  // relative paths are relative to the run directory
    std::string survey;    // empty when none
    std::size_t households = 0;
    std::size_t profile_count = 0;
    double threshold = 0.0;
    std::size_t top_k = 0;
    std::array<Season, kMonths> seasons{};
    WeightProfile weights;
    ScoringOptions scoring;
    std::vector<ManifestEntry> experiments;

    std::size_t failures() const;
    const ManifestEntry* find(const std::string& id) const;
};

nlohmann::json to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::json& j);
RunManifest load_manifest(const std::filesystem::path& run_dir);

struct RunOptions {
    std::filesystem::path out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> top_k;
    std::optional<std::size_t> threads;
    std::ostream* log = nullptr;
};

// Runs every cell, computes internal scores for all, external measures for the
// top-K by CI and the score card, and persists everything under out_dir.
// Cells already completed with the same digest are reused.
RunManifest run_suite(const SuiteConfig& config, const RunOptions& options);

// Rebuilds the score card from persisted cell files, writes scorecard.txt,
// scorecard.json, results.csv and clusters.csv, and updates the manifest.
ScoreCard report_scorecard(const std::filesystem::path& run_dir);

// Writes the per-cluster p(daytype) table of a cell. Throws ConfigError for an
// unknown id or a cell without external measures.
void export_daytype_likelihood(const std::filesystem::path& run_dir, const std::string& experiment, std::ostream& out);

struct ArchetypeRequest {
    std::string experiment;  // empty = best scored cell
    std::optional<std::filesystem::path> survey;
    std::string name = "custom";
    SocioFilter filter;
    double threshold = kAssociationThreshold;
    SoftmaxOptions softmax;
};

// Keys: experiment, survey, archetype (expert name) | filter {attribute: [values]},
// threshold, l2, max_iter, balance_classes.
ArchetypeRequest parse_archetype_request(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

struct ArchetypeRun {
    std::string experiment;
    ArchetypeModel model;
    std::vector<Association> associations;
    Archetype archetype;
    std::filesystem::path report;
};

// Fits the regression on a completed cell, writes
// archetypes/<experiment>/{odds_ratios.csv, associations.csv, <name>.txt}.
ArchetypeRun run_archetype(const std::filesystem::path& run_dir, const ArchetypeRequest& request);

// Synthetic data files: profiles.csv, survey.csv (when planted), truth.csv.
SyntheticData write_synthetic(const GeneratorSpec& spec, std::uint64_t seed, const std::filesystem::path& dir);

}  // namespace loadpat
