#include "loadpat/persist.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "loadpat/errors.hpp"
#include "text_util.hpp"

namespace loadpat {

using nlohmann::json;

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

std::string csv_optional(const std::optional<double>& v) { return v ? detail::format_double(*v) : std::string(); }

json to_json(const ErrorMetrics& m) {
    return {{"mape", m.mape}, {"mdape", m.mdape}, {"mdlq", m.mdlq}, {"mdsyma", m.mdsyma},
            {"included", m.included}, {"excluded", m.excluded}};
}

ErrorMetrics error_metrics_from_json(const json& j) {
    ErrorMetrics m;
    m.mape = j.at("mape").get<double>();
    m.mdape = j.at("mdape").get<double>();
    m.mdlq = j.at("mdlq").get<double>();
    m.mdsyma = j.at("mdsyma").get<double>();
    m.included = j.at("included").get<std::size_t>();
    m.excluded = j.at("excluded").get<std::size_t>();
    return m;
}

json rows_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
    return rows;
}

Matrix matrix_from_json(const json& j) {
    Matrix m;
    for (const auto& row : j) m.push_row(row.get<std::vector<double>>());
    return m;
}

}  // namespace

json to_json(const ExperimentConfig& c) {
    return {{"algorithm", to_string(c.algorithm)},
            {"m", c.m},
            {"s", c.s},
            {"normalization", to_string(c.normalization)},
            {"prebinning", to_string(c.prebinning)},
            {"n_bins", c.n_bins},
            {"keep_zeros", c.keep_zeros},
            {"seed", c.seed},
            {"kmeans", {{"max_iter", c.kmeans.max_iter}, {"tol", c.kmeans.tol}, {"n_init", c.kmeans.n_init}}},
            {"som", {{"epochs", c.som.epochs}}},
            {"amc_edges", c.amc_edges.lower}};
}

ExperimentConfig experiment_config_from_json(const json& j) {
    ExperimentConfig c;
    c.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    c.m = j.at("m").get<std::size_t>();
    c.s = j.at("s").get<std::size_t>();
    c.normalization = parse_normalization(j.at("normalization").get<std::string>());
    c.prebinning = parse_bin_scheme(j.at("prebinning").get<std::string>());
    c.n_bins = j.at("n_bins").get<std::size_t>();
    c.keep_zeros = j.at("keep_zeros").get<bool>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.kmeans.max_iter = j.at("kmeans").at("max_iter").get<std::size_t>();
    c.kmeans.tol = j.at("kmeans").at("tol").get<double>();
    c.kmeans.n_init = j.at("kmeans").at("n_init").get<std::size_t>();
    c.som.epochs = j.at("som").at("epochs").get<std::size_t>();
    c.amc_edges.lower = j.at("amc_edges").get<std::vector<double>>();
    return c;
}

json to_json(const ClusterModel& model) {
    json bins = json::array();
    for (const auto& b : model.bins) {
        bins.push_back({{"bin", b.bin}, {"first_cluster", b.first_cluster}, {"rows", b.rows.size()},
                        {"centroids", rows_json(b.centroids)}});
    }
    return {{"config", to_json(model.config)},
            {"seed", model.config.seed},
            {"n_clusters", model.n_clusters},
            {"removed_zero", model.removed_zero},
            {"dropped_degenerate", model.dropped_degenerate},
            {"bins", bins},
            {"labels", model.labels}};
}

ClusterModel cluster_model_from_json(const json& j) {
    ClusterModel model;
    model.config = experiment_config_from_json(j.at("config"));
    model.n_clusters = j.at("n_clusters").get<std::size_t>();
    model.removed_zero = j.at("removed_zero").get<std::size_t>();
    model.dropped_degenerate = j.at("dropped_degenerate").get<std::size_t>();
    model.labels = j.at("labels").get<std::vector<int>>();
    for (const auto& b : j.at("bins")) {
        BinModel bm;
        bm.bin = b.at("bin").get<int>();
        bm.first_cluster = b.at("first_cluster").get<int>();
        bm.centroids = matrix_from_json(b.at("centroids"));
        model.bins.push_back(std::move(bm));
    }
    // Bin rows and local labels follow from the global labels.
    for (std::size_t r = 0; r < model.labels.size(); ++r) {
        const int l = model.labels[r];
        if (l < 0) continue;
        for (auto& bm : model.bins) {
            if (l >= bm.first_cluster && l < bm.first_cluster + static_cast<int>(bm.centroids.rows())) {
                bm.rows.push_back(r);
                bm.local_labels.push_back(l - bm.first_cluster);
                break;
            }
        }
    }
    return model;
}

json to_json(const InternalScores& scores) {
    json bins = json::array();
    for (const auto& b : scores.bins) {
        bins.push_back({{"bin", b.bin},
                        {"n_bin", b.n_bin},
                        {"clusters", b.clusters},
                        {"dbi", optional_json(b.dbi)},
                        {"mia", optional_json(b.mia)},
                        {"silhouette", optional_json(b.silhouette)},
                        {"ix", optional_json(b.ix)}});
    }
    return {{"bins", bins}, {"ci", optional_json(scores.ci)}};
}

InternalScores internal_scores_from_json(const json& j) {
    InternalScores s;
    for (const auto& b : j.at("bins")) {
        BinScores bs;
        bs.bin = b.at("bin").get<int>();
        bs.n_bin = b.at("n_bin").get<std::size_t>();
        bs.clusters = b.at("clusters").get<std::size_t>();
        bs.dbi = optional_from(b.at("dbi"));
        bs.mia = optional_from(b.at("mia"));
        bs.silhouette = optional_from(b.at("silhouette"));
        bs.ix = optional_from(b.at("ix"));
        s.bins.push_back(bs);
    }
    s.ci = optional_from(j.at("ci"));
    return s;
}

json to_json(const ExternalReport& report) {
    json clusters = json::array();
    for (const auto& c : report.clusters) {
        json entropy;
        for (std::size_t f = 0; f < kFeatures; ++f) entropy[std::string(to_string(static_cast<Feature>(f)))] = c.entropy[f];
        clusters.push_back({{"cluster", c.cluster},
                            {"bin", c.bin},
                            {"members", c.member_count},
                            {"total_error", to_json(c.errors.total)},
                            {"peak_error", to_json(c.errors.peak)},
                            {"peak_coincidence", c.peak_coincidence},
                            {"entropy", entropy},
                            {"daytype_likelihood", c.daytype_likelihood}});
    }
    json rdlps = json::array();
    for (const auto& r : report.rdlps) {
        rdlps.push_back({{"cluster", r.cluster}, {"members", r.member_count}, {"values", r.values}});
    }
    return {{"usability",
             {{"zero_profile_represented", report.usability.zero_profile_represented},
              {"threshold_ratio", report.usability.threshold_ratio},
              {"threshold", report.usability.threshold}}},
            {"clusters", clusters},
            {"rdlps", rdlps}};
}

ExternalReport external_report_from_json(const json& j) {
    ExternalReport r;
    const auto& u = j.at("usability");
    r.usability.zero_profile_represented = u.at("zero_profile_represented").get<bool>();
    r.usability.threshold_ratio = u.at("threshold_ratio").get<double>();
    r.usability.threshold = u.at("threshold").get<double>();
    for (const auto& c : j.at("clusters")) {
        ClusterMeasures m;
        m.cluster = c.at("cluster").get<int>();
        m.bin = c.at("bin").get<int>();
        m.member_count = c.at("members").get<std::size_t>();
        m.errors.total = error_metrics_from_json(c.at("total_error"));
        m.errors.peak = error_metrics_from_json(c.at("peak_error"));
        m.peak_coincidence = c.at("peak_coincidence").get<double>();
        for (std::size_t f = 0; f < kFeatures; ++f) {
            m.entropy[f] = c.at("entropy").at(std::string(to_string(static_cast<Feature>(f)))).get<double>();
        }
        m.daytype_likelihood = c.at("daytype_likelihood").get<std::array<double, kDayTypes>>();
        r.clusters.push_back(m);
    }
    for (const auto& d : j.at("rdlps")) {
        Rdlp rdlp;
        rdlp.cluster = d.at("cluster").get<int>();
        rdlp.member_count = d.at("members").get<std::size_t>();
        rdlp.values = d.at("values").get<HourlyValues>();
        r.rdlps.push_back(rdlp);
    }
    return r;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw DataError("cannot write " + tmp.string());
        out << text;
    }
    std::filesystem::rename(tmp, path);
}

void write_json_file(const std::filesystem::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

void write_internal_header(std::ostream& out) { out << "experiment,bin,n_bin,clusters,dbi,mia,silhouette,ix,ci\n"; }

void write_internal_rows(std::ostream& out, const std::string& experiment, const InternalScores& scores) {
    for (const auto& b : scores.bins) {
        out << experiment << ',' << b.bin << ',' << b.n_bin << ',' << b.clusters << ',' << csv_optional(b.dbi) << ','
            << csv_optional(b.mia) << ',' << csv_optional(b.silhouette) << ',' << csv_optional(b.ix) << ','
            << csv_optional(scores.ci) << '\n';
    }
}

void write_cluster_header(std::ostream& out) {
    out << "experiment,cluster,bin,members";
    for (const char* kind : {"total", "peak"}) {
        for (const char* metric : {"mape", "mdape", "mdlq", "mdsyma", "excluded"}) out << ',' << kind << '_' << metric;
    }
    out << ",peak_coincidence";
    for (std::size_t f = 0; f < kFeatures; ++f) out << ",entropy_" << to_string(static_cast<Feature>(f));
    out << '\n';
}

void write_cluster_rows(std::ostream& out, const std::string& experiment, const ExternalReport& report) {
    using detail::format_double;
    for (const auto& c : report.clusters) {
        out << experiment << ',' << c.cluster << ',' << c.bin << ',' << c.member_count;
        for (const auto* m : {&c.errors.total, &c.errors.peak}) {
            out << ',' << format_double(m->mape) << ',' << format_double(m->mdape) << ',' << format_double(m->mdlq)
                << ',' << format_double(m->mdsyma) << ',' << m->excluded;
        }
        out << ',' << format_double(c.peak_coincidence);
        for (double e : c.entropy) out << ',' << format_double(e);
        out << '\n';
    }
}

void write_daytype_likelihood(std::ostream& out, const ExternalReport& report) {
    out << "cluster";
    for (std::size_t d = 0; d < kDayTypes; ++d) out << ',' << to_string(static_cast<DayType>(d));
    out << '\n';
    for (const auto& c : report.clusters) {
        out << c.cluster;
        for (double p : c.daytype_likelihood) out << ',' << detail::format_double(p);
        out << '\n';
    }
}

void write_rdlps(std::ostream& out, std::span<const Rdlp> rdlps) {
    out << "cluster,members";
    for (std::size_t h = 0; h < kHours; ++h) out << ",v" << h;
    out << '\n';
    for (const auto& r : rdlps) {
        out << r.cluster << ',' << r.member_count;
        for (double v : r.values) out << ',' << detail::format_double(v);
        out << '\n';
    }
}

}  // namespace loadpat
