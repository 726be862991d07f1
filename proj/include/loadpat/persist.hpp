#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include "json.hpp"
#include "loadpat/experiment.hpp"
#include "loadpat/external.hpp"
#include "loadpat/validity.hpp"

namespace loadpat {

// Structured-text forms of the pipeline objects. Doubles are written in
// shortest round-trip form, so a load/save cycle is exact.

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

// Config, seed, centroids per bin and the per-row labels. The normalized data
// matrix is not stored.
nlohmann::json to_json(const ClusterModel& model);
ClusterModel cluster_model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const InternalScores& scores);
InternalScores internal_scores_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ExternalReport& report);
ExternalReport external_report_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::filesystem::path& path);
// Writes via a temporary file and rename.
void write_text_file(const std::filesystem::path& path, const std::string& text);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

// Results tables (CSV, header row first).
//   internal:  experiment,bin,n_bin,clusters,dbi,mia,silhouette,ix,ci
//   clusters:  experiment,cluster,bin,members,{total,peak}_{mape,mdape,mdlq,mdsyma,excluded},
//              peak_coincidence,entropy_{daytype,month,total_demand,peak_demand}
//   daytype:   cluster,Mon,Tue,Wed,Thu,Fri,Sat,Sun
//   rdlps:     cluster,members,v0..v23
// Undefined values are written as empty fields.
void write_internal_header(std::ostream& out);
void write_internal_rows(std::ostream& out, const std::string& experiment, const InternalScores& scores);
void write_cluster_header(std::ostream& out);
void write_cluster_rows(std::ostream& out, const std::string& experiment, const ExternalReport& report);
void write_daytype_likelihood(std::ostream& out, const ExternalReport& report);
void write_rdlps(std::ostream& out, std::span<const Rdlp> rdlps);

}  // namespace loadpat
