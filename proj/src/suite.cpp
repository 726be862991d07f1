#include "loadpat/suite.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "loadpat/digest.hpp"
#include "loadpat/errors.hpp"
#include "loadpat/external.hpp"
#include "loadpat/persist.hpp"
#include "text_util.hpp"

namespace loadpat {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::array<Season, kMonths> default_seasons() {
    std::array<Season, kMonths> s;
    s.fill(Season::Summer);
    for (unsigned m = 5; m <= 8; ++m) s[m - 1] = Season::Winter;
    return s;
}

template <class T, class F>
std::vector<T> list_of(const json& j, const char* key, std::vector<T> fallback, F convert) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    std::vector<T> out;
    if (v.is_array()) {
        for (const auto& x : v) out.push_back(convert(x));
    } else {
        out.push_back(convert(v));
    }
    if (out.empty()) throw ConfigError(std::string("'") + key + "' is empty");
    return out;
}

// A list of integers or {"from", "to", "step"}.
std::vector<std::size_t> size_list(const json& j, const char* key, std::vector<std::size_t> fallback) {
    if (j.contains(key) && j.at(key).is_object()) {
        const auto& r = j.at(key);
        const auto from = r.at("from").get<std::size_t>();
        const auto to = r.at("to").get<std::size_t>();
        const auto step = r.value("step", std::size_t{1});
        if (step == 0 || to < from) throw ConfigError(std::string("bad range for '") + key + "'");
        std::vector<std::size_t> out;
        for (auto v = from; v <= to; v += step) out.push_back(v);
        return out;
    }
    return list_of<std::size_t>(j, key, std::move(fallback), [](const json& x) { return x.get<std::size_t>(); });
}

std::string status_name(CellStatus s) {
    switch (s) {
        case CellStatus::Pending: return "pending";
        case CellStatus::Ok: return "ok";
        case CellStatus::Error: return "error";
    }
    return "?";
}

CellStatus parse_status(const std::string& s) {
    if (s == "ok") return CellStatus::Ok;
    if (s == "error") return CellStatus::Error;
    return CellStatus::Pending;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

fs::path cell_dir(const fs::path& run_dir, const std::string& id) { return run_dir / "cells" / id; }

std::string profiles_text(const ProfileDataset& dataset) {
    std::ostringstream out;
    write_profiles(out, dataset);
    return out.str();
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) fn(i);
        });
    }
}

std::string utc_now() {
    const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
    const auto day = std::chrono::floor<std::chrono::days>(now);
    const std::chrono::hh_mm_ss hms(now - day);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02dZ", format_date(std::chrono::year_month_day(day)).c_str(),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

void append_log(const fs::path& run_dir, const json& event) {
    std::ofstream out(run_dir / "run_log.jsonl", std::ios::app);
    json e = event;
    e["time"] = utc_now();
    out << e.dump() << '\n';
}

struct LoadedData {
    ProfileDataset dataset;
    std::vector<SurveyRecord> survey;
};

LoadedData load_run_data(const fs::path& run_dir, const RunManifest& manifest) {
    auto resolve = [&](const std::string& p) {
        const fs::path path(p);
        return path.is_absolute() ? path : run_dir / path;
    };
    LoadedData d{load_profiles(resolve(manifest.profiles)), {}};
    if (!manifest.survey.empty()) d.survey = load_survey(resolve(manifest.survey));
    return d;
}

}  // namespace

SuiteConfig parse_suite_config(const json& j, const fs::path& base_dir) {
    SuiteConfig c;
    try {
        c.seed = j.value("seed", std::uint64_t{0});
        c.threads = j.value("threads", std::size_t{1});
        c.top_k = j.value("top_k", std::size_t{0});
        c.seasons = default_seasons();
        if (j.contains("winter_months")) {
            c.seasons.fill(Season::Summer);
            for (auto m : j.at("winter_months").get<std::vector<unsigned>>()) {
                if (m < 1 || m > 12) throw ConfigError("winter_months: month out of range");
                c.seasons[m - 1] = Season::Winter;
            }
        }

        const auto& data = j.at("data");
        if (data.contains("synthetic")) {
            c.generator = parse_generator_spec(data.at("synthetic"));
            c.generator->seasons = SeasonMap(c.seasons);
        } else {
            c.profiles = base_dir / data.at("profiles").get<std::string>();
            if (data.contains("survey")) c.survey = base_dir / data.at("survey").get<std::string>();
        }

        if (j.contains("threshold")) {
            const auto& t = j.at("threshold");
            if (t.is_string()) {
                if (t.get<std::string>() != "auto") throw ConfigError("threshold must be a number or \"auto\"");
            } else {
                c.threshold = t.get<double>();
                if (*c.threshold < 0) throw ConfigError("threshold must be non-negative");
            }
        }

        const auto mode = j.value("zero_profile_mode", std::string("include"));
        if (mode != "include" && mode != "exclude") throw ConfigError("zero_profile_mode must be include or exclude");
        c.scoring.include_zero_profile = mode == "include";
        if (j.contains("weights")) {
            for (const auto& [name, w] : j.at("weights").items()) c.weights[parse_measure(name)] = w.get<double>();
        }
        c.weights.validate();
        if (j.contains("directions")) {
            for (const auto& [name, d] : j.at("directions").items()) {
                const auto v = d.get<std::string>();
                if (v != "lower" && v != "higher") throw ConfigError("direction must be lower or higher");
                c.scoring.direction_overrides[parse_measure(name)] =
                    v == "lower" ? Direction::LowerIsBetter : Direction::HigherIsBetter;
            }
        }
        if (j.contains("amc_bins")) {
            c.amc_edges.lower = j.at("amc_bins").get<std::vector<double>>();
            if (c.amc_edges.lower.empty() || !std::is_sorted(c.amc_edges.lower.begin(), c.amc_edges.lower.end())) {
                throw ConfigError("amc_bins must be a non-empty ascending list");
            }
        }
        if (j.contains("kmeans")) {
            const auto& k = j.at("kmeans");
            c.kmeans.max_iter = k.value("max_iter", c.kmeans.max_iter);
            c.kmeans.tol = k.value("tol", c.kmeans.tol);
            c.kmeans.n_init = k.value("n_init", c.kmeans.n_init);
            if (c.kmeans.n_init == 0) throw ConfigError("kmeans.n_init must be at least 1");
        }
        if (j.contains("som")) c.som.epochs = j.at("som").value("epochs", c.som.epochs);
        if (j.contains("silhouette")) {
            const auto& s = j.at("silhouette");
            c.silhouette.exact_below = s.value("exact_below", c.silhouette.exact_below);
            c.silhouette.sample_size = s.value("sample_size", c.silhouette.sample_size);
        }
        c.silhouette.seed = c.seed;

        for (const auto& e : j.at("experiments")) {
            GridSpec g;
            g.name = e.at("name").get<std::string>();
            if (g.name.empty() || g.name.find_first_of("/\\ ") != std::string::npos) {
                throw ConfigError("experiment name '" + g.name + "' must be non-empty without spaces or slashes");
            }
            const json& alg = e.contains("algorithms") ? e : json{{"algorithms", e.value("algorithm", json("kmeans"))}};
            g.algorithms = list_of<Algorithm>(alg, "algorithms", g.algorithms,
                                              [](const json& x) { return parse_algorithm(x.get<std::string>()); });
            g.m = size_list(e, "m", g.m);
            g.s = size_list(e, "s", g.s);
            const json& norm =
                e.contains("normalizations") ? e : json{{"normalizations", e.value("normalization", json("none"))}};
            g.normalizations = list_of<Normalization>(norm, "normalizations", g.normalizations, [](const json& x) {
                return parse_normalization(x.get<std::string>());
            });
            g.prebinning = list_of<BinScheme>(e, "prebinning", g.prebinning,
                                              [](const json& x) { return parse_bin_scheme(x.get<std::string>()); });
            g.n_bins = e.value("n_bins", g.n_bins);
            g.keep_zeros = list_of<bool>(e, "keep_zeros", g.keep_zeros, [](const json& x) { return x.get<bool>(); });
            if (e.contains("seed")) g.seed = e.at("seed").get<std::uint64_t>();
            c.experiments.push_back(std::move(g));
        }
        if (c.experiments.empty()) throw ConfigError("no experiments");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const DataError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

SuiteConfig load_suite_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::ostringstream bytes;
    bytes << in.rdbuf();
    json j;
    try {
        j = json::parse(bytes.str());
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    auto c = parse_suite_config(j, path.parent_path());
    c.digest = sha256_hex(bytes.str());
    return c;
}

std::vector<SuiteCell> expand_grid(const SuiteConfig& config) {
    std::vector<SuiteCell> cells;
    for (const auto& g : config.experiments) {
        for (auto alg : g.algorithms) {
            const bool uses_kmeans = alg != Algorithm::Som;
            const bool uses_som = alg != Algorithm::Kmeans;
            const std::vector<std::size_t> no_value{0};
            for (auto norm : g.normalizations) {
                for (auto bins : g.prebinning) {
                    for (bool zeros : g.keep_zeros) {
                        for (auto s : uses_som ? g.s : no_value) {
                            for (auto m : uses_kmeans ? g.m : no_value) {
                                SuiteCell cell;
                                cell.config.algorithm = alg;
                                cell.config.m = m;
                                cell.config.s = s;
                                cell.config.normalization = norm;
                                cell.config.prebinning = bins;
                                cell.config.n_bins = g.n_bins;
                                cell.config.keep_zeros = zeros;
                                cell.config.seed = g.seed.value_or(config.seed);
                                cell.config.kmeans = config.kmeans;
                                cell.config.som = config.som;
                                cell.config.amc_edges = config.amc_edges;
                                cell.id = g.name + "-" + std::string(to_string(alg)) + "-" +
                                          std::string(to_string(norm)) + "-" + std::string(to_string(bins)) + "-z" +
                                          (zeros ? "1" : "0");
                                if (uses_kmeans) cell.id += "-m" + std::to_string(m);
                                if (uses_som) cell.id += "-s" + std::to_string(s);
                                cells.push_back(std::move(cell));
                            }
                        }
                    }
                }
            }
        }
    }
    std::vector<std::string> ids;
    for (const auto& c : cells) ids.push_back(c.id);
    std::sort(ids.begin(), ids.end());
    if (auto dup = std::adjacent_find(ids.begin(), ids.end()); dup != ids.end()) {
        throw ConfigError("duplicate experiment cell '" + *dup + "'");
    }
    return cells;
}

std::size_t RunManifest::failures() const {
    return static_cast<std::size_t>(std::count_if(experiments.begin(), experiments.end(),
                                                  [](const auto& e) { return e.status == CellStatus::Error; }));
}

const ManifestEntry* RunManifest::find(const std::string& id) const {
    for (const auto& e : experiments) {
        if (e.id == id) return &e;
    }
    return nullptr;
}

json to_json(const RunManifest& m) {
    json winter = json::array();
    for (unsigned month = 1; month <= kMonths; ++month) {
        if (m.seasons[month - 1] == Season::Winter) winter.push_back(month);
    }
    json weights;
    for (auto measure : kAllMeasures) weights[std::string(to_string(measure))] = m.weights[measure];
    json directions = json::object();
    for (const auto& [measure, d] : m.scoring.direction_overrides) {
        directions[std::string(to_string(measure))] = d == Direction::LowerIsBetter ? "lower" : "higher";
    }
    json experiments = json::array();
    for (const auto& e : m.experiments) {
        const auto dir = "cells/" + e.id + "/";
        json artifacts = json::object();
        if (e.status == CellStatus::Ok) {
            artifacts["model"] = dir + "model.json";
            artifacts["internal"] = dir + "internal.json";
            if (e.external) {
                artifacts["external"] = dir + "external.json";
                artifacts["rdlps"] = dir + "rdlps.csv";
                artifacts["daytype_likelihood"] = dir + "daytype_likelihood.csv";
            }
        }
        json entry{{"id", e.id},
                   {"digest", e.digest},
                   {"status", status_name(e.status)},
                   {"config", to_json(e.config)},
                   {"ci", optional_json(e.ci)},
                   {"external", e.external},
                   {"score", optional_json(e.score)},
                   {"rank", e.rank ? json(*e.rank) : json(nullptr)},
                   {"artifacts", artifacts}};
        if (e.status == CellStatus::Error) entry["error"] = e.error;
        experiments.push_back(std::move(entry));
    }
    return {{"run_id", m.run_id},
            {"config_digest", m.config_digest},
            {"dataset_digest", m.dataset_digest},
            {"seed", m.seed},
            {"data",
             {{"profiles", m.profiles},
              {"survey", m.survey},
              {"households", m.households},
              {"profiles_count", m.profile_count}}},
            {"threshold", m.threshold},
            {"top_k", m.top_k},
            {"winter_months", winter},
            {"scoring",
             {{"weights", weights},
              {"zero_profile_mode", m.scoring.include_zero_profile ? "include" : "exclude"},
              {"directions", directions}}},
            {"experiments", experiments}};
}

RunManifest manifest_from_json(const json& j) {
    RunManifest m;
    try {
        m.run_id = j.at("run_id").get<std::string>();
        m.config_digest = j.at("config_digest").get<std::string>();
        m.dataset_digest = j.at("dataset_digest").get<std::string>();
        m.seed = j.at("seed").get<std::uint64_t>();
        const auto& data = j.at("data");
        m.profiles = data.at("profiles").get<std::string>();
        m.survey = data.at("survey").get<std::string>();
        m.households = data.at("households").get<std::size_t>();
        m.profile_count = data.at("profiles_count").get<std::size_t>();
        m.threshold = j.at("threshold").get<double>();
        m.top_k = j.at("top_k").get<std::size_t>();
        m.seasons.fill(Season::Summer);
        for (auto month : j.at("winter_months").get<std::vector<unsigned>>()) m.seasons.at(month - 1) = Season::Winter;
        const auto& scoring = j.at("scoring");
        for (const auto& [name, w] : scoring.at("weights").items()) m.weights[parse_measure(name)] = w.get<double>();
        m.scoring.include_zero_profile = scoring.at("zero_profile_mode").get<std::string>() == "include";
        for (const auto& [name, d] : scoring.at("directions").items()) {
            m.scoring.direction_overrides[parse_measure(name)] =
                d.get<std::string>() == "lower" ? Direction::LowerIsBetter : Direction::HigherIsBetter;
        }
        for (const auto& e : j.at("experiments")) {
            ManifestEntry entry;
            entry.id = e.at("id").get<std::string>();
            entry.digest = e.at("digest").get<std::string>();
            entry.status = parse_status(e.at("status").get<std::string>());
            entry.error = e.value("error", std::string());
            entry.config = experiment_config_from_json(e.at("config"));
            if (!e.at("ci").is_null()) entry.ci = e.at("ci").get<double>();
            entry.external = e.at("external").get<bool>();
            if (!e.at("score").is_null()) entry.score = e.at("score").get<double>();
            if (!e.at("rank").is_null()) entry.rank = e.at("rank").get<std::size_t>();
            m.experiments.push_back(std::move(entry));
        }
    } catch (const json::exception& e) {
        throw DataError(std::string("manifest: ") + e.what());
    }
    return m;
}

RunManifest load_manifest(const fs::path& run_dir) {
    const auto path = run_dir / "manifest.json";
    if (!fs::exists(path)) throw ConfigError("no manifest in " + run_dir.string());
    return manifest_from_json(read_json_file(path));
}

SyntheticData write_synthetic(const GeneratorSpec& spec, std::uint64_t seed, const fs::path& dir) {
    auto data = synthesize_dataset(spec, seed);
    write_text_file(dir / "profiles.csv", profiles_text(data.dataset));
    if (!data.survey.empty()) {
        std::ostringstream survey;
        write_survey(survey, data.survey);
        write_text_file(dir / "survey.csv", survey.str());
    }
    std::ostringstream truth;
    truth << "row,household_id,date,group,pattern\n";
    for (std::size_t r = 0; r < data.dataset.size(); ++r) {
        const auto& p = data.dataset[r];
        truth << r << ',' << p.household_id << ',' << format_date(p.date) << ',' << data.group[r] << ','
              << data.pattern[r] << '\n';
    }
    write_text_file(dir / "truth.csv", truth.str());
    return data;
}

RunManifest run_suite(const SuiteConfig& config_in, const RunOptions& options) {
    SuiteConfig config = config_in;
    if (options.seed) {
        config.seed = *options.seed;
        config.silhouette.seed = *options.seed;
    }
    if (options.top_k) config.top_k = *options.top_k;
    if (options.threads) config.threads = *options.threads;
    const auto& out_dir = options.out_dir;
    fs::create_directories(out_dir);
    auto log = [&](const std::string& line) {
        if (options.log) *options.log << line << '\n';
    };

    const auto cells = expand_grid(config);

    RunManifest manifest;
    manifest.seed = config.seed;
    manifest.config_digest = config.digest;
    manifest.run_id = sha256_hex(config.digest + ":" + std::to_string(config.seed)).substr(0, 16);
    manifest.top_k = config.top_k;
    manifest.seasons = config.seasons;
    manifest.weights = config.weights;
    manifest.scoring = config.scoring;

    ProfileDataset dataset;
    if (config.generator) {
        auto data = write_synthetic(*config.generator, config.seed, out_dir / "data");
        dataset = std::move(data.dataset);
        manifest.profiles = "data/profiles.csv";
        if (!data.survey.empty()) manifest.survey = "data/survey.csv";
    } else {
        dataset = load_profiles(*config.profiles);
        manifest.profiles = fs::absolute(*config.profiles).lexically_normal().string();
        if (config.survey) manifest.survey = fs::absolute(*config.survey).lexically_normal().string();
    }
    if (dataset.empty()) throw ConfigError("dataset has no profiles");
    manifest.dataset_digest = sha256_hex(profiles_text(dataset));
    manifest.households = dataset.households().size();
    manifest.profile_count = dataset.size();
    manifest.threshold = config.threshold.value_or(auto_membership_threshold(manifest.households));
    const SeasonMap seasons(config.seasons);

    std::optional<RunManifest> previous;
    if (fs::exists(out_dir / "manifest.json")) {
        try {
            previous = load_manifest(out_dir);
        } catch (const DataError&) {
            previous.reset();
        }
    }

    json common{{"dataset", manifest.dataset_digest},
                {"threshold", manifest.threshold},
                {"winter_months", to_json(manifest)["winter_months"]},
                {"silhouette",
                 {config.silhouette.exact_below, config.silhouette.sample_size, config.silhouette.seed}}};
    for (const auto& cell : cells) {
        ManifestEntry e;
        e.id = cell.id;
        e.config = cell.config;
        e.digest = sha256_hex(common.dump() + to_json(cell.config).dump());
        manifest.experiments.push_back(std::move(e));
    }

    append_log(out_dir, {{"event", "start"}, {"run_id", manifest.run_id}, {"cells", cells.size()}});
    std::mutex writer;
    auto commit = [&](std::size_t i, ManifestEntry entry) {
        std::lock_guard lock(writer);
        manifest.experiments[i] = std::move(entry);
        write_json_file(out_dir / "manifest.json", to_json(manifest));
        const auto& e = manifest.experiments[i];
        json event{{"event", "cell"}, {"id", e.id}, {"status", status_name(e.status)}};
        if (!e.error.empty()) event["error"] = e.error;
        append_log(out_dir, event);
    };
    {
        std::lock_guard lock(writer);
        write_json_file(out_dir / "manifest.json", to_json(manifest));
    }

    auto reusable = [&](const ManifestEntry& e) -> const ManifestEntry* {
        if (!previous) return nullptr;
        const auto* p = previous->find(e.id);
        if (!p || p->digest != e.digest || p->status != CellStatus::Ok) return nullptr;
        const auto dir = cell_dir(out_dir, e.id);
        if (!fs::exists(dir / "model.json") || !fs::exists(dir / "internal.json")) return nullptr;
        return p;
    };

    // Stage 1: clustering and internal validity for every cell.
    parallel_for(cells.size(), config.threads, [&](std::size_t i) {
        ManifestEntry entry;
        {
            std::lock_guard lock(writer);
            entry = manifest.experiments[i];
        }
        if (const auto* p = reusable(entry)) {
            entry.status = CellStatus::Ok;
            entry.ci = p->ci;
            entry.external = p->external && fs::exists(cell_dir(out_dir, entry.id) / "external.json");
            log("reuse " + entry.id);
            commit(i, std::move(entry));
            return;
        }
        try {
            entry.config.validate();
            const auto model = run_experiment(dataset, entry.config);
            const auto internal = evaluate_internal(model, config.silhouette);
            const auto dir = cell_dir(out_dir, entry.id);
            fs::remove(dir / "external.json");
            write_json_file(dir / "model.json", to_json(model));
            write_json_file(dir / "internal.json", to_json(internal));
            entry.status = CellStatus::Ok;
            entry.ci = internal.ci;
            entry.external = false;
            log("done " + entry.id);
        } catch (const std::exception& ex) {
            entry.status = CellStatus::Error;
            entry.error = ex.what();
            log("error " + entry.id + ": " + entry.error);
        }
        commit(i, std::move(entry));
    });

    // Stage 2: external measures for the top-K by CI.
    std::vector<std::size_t> selected;
    for (std::size_t i = 0; i < manifest.experiments.size(); ++i) {
        const auto& e = manifest.experiments[i];
        if (e.status == CellStatus::Ok && (config.top_k == 0 || e.ci)) selected.push_back(i);
    }
    if (config.top_k > 0) {
        std::stable_sort(selected.begin(), selected.end(), [&](std::size_t a, std::size_t b) {
            return *manifest.experiments[a].ci < *manifest.experiments[b].ci;
        });
        if (selected.size() > config.top_k) selected.resize(config.top_k);
    }
    std::vector<bool> wanted(manifest.experiments.size(), false);
    for (auto i : selected) wanted[i] = true;
    for (std::size_t i = 0; i < manifest.experiments.size(); ++i) {
        if (!wanted[i] && manifest.experiments[i].external) {
            auto entry = manifest.experiments[i];
            entry.external = false;
            commit(i, std::move(entry));
        }
    }
    parallel_for(selected.size(), config.threads, [&](std::size_t k) {
        const auto i = selected[k];
        ManifestEntry entry;
        {
            std::lock_guard lock(writer);
            entry = manifest.experiments[i];
        }
        if (entry.external) return;
        const auto dir = cell_dir(out_dir, entry.id);
        try {
            const auto model = cluster_model_from_json(read_json_file(dir / "model.json"));
            const auto report = evaluate_external(model, dataset, manifest.threshold, seasons);
            std::ostringstream rdlps, daytype;
            write_rdlps(rdlps, report.rdlps);
            write_daytype_likelihood(daytype, report);
            write_text_file(dir / "rdlps.csv", rdlps.str());
            write_text_file(dir / "daytype_likelihood.csv", daytype.str());
            write_json_file(dir / "external.json", to_json(report));
            entry.external = true;
            log("external " + entry.id);
        } catch (const std::exception& ex) {
            entry.status = CellStatus::Error;
            entry.error = std::string("external measures: ") + ex.what();
        }
        commit(i, std::move(entry));
    });

    report_scorecard(out_dir);
    manifest = load_manifest(out_dir);
    append_log(out_dir, {{"event", "finish"}, {"run_id", manifest.run_id}, {"failures", manifest.failures()}});
    return manifest;
}

ScoreCard report_scorecard(const fs::path& run_dir) {
    auto manifest = load_manifest(run_dir);

    std::ostringstream results, clusters;
    write_internal_header(results);
    write_cluster_header(clusters);
    std::vector<ExperimentValues> values;
    std::vector<std::size_t> entry_of;
    for (std::size_t i = 0; i < manifest.experiments.size(); ++i) {
        auto& e = manifest.experiments[i];
        e.score.reset();
        e.rank.reset();
        if (e.status != CellStatus::Ok) continue;
        const auto dir = cell_dir(run_dir, e.id);
        write_internal_rows(results, e.id, internal_scores_from_json(read_json_file(dir / "internal.json")));
        if (!e.external) continue;
        const auto report = external_report_from_json(read_json_file(dir / "external.json"));
        write_cluster_rows(clusters, e.id, report);
        auto v = aggregate_experiment_measures(e.id, report.clusters, report.usability, manifest.threshold);
        v.ci = e.ci;
        values.push_back(std::move(v));
        entry_of.push_back(i);
    }
    write_text_file(run_dir / "results.csv", results.str());
    write_text_file(run_dir / "clusters.csv", clusters.str());

    ScoreCard card;
    if (!values.empty()) {
        card = build_scorecard(values, manifest.weights, manifest.scoring);
        for (std::size_t pos = 0; pos < card.order.size(); ++pos) {
            const auto e = card.order[pos];
            auto& entry = manifest.experiments[entry_of[e]];
            entry.score = card.totals[e];
            entry.rank = pos + 1;
        }
    }

    std::ostringstream text;
    if (values.empty()) {
        text << "no experiments with external measures\n";
    } else {
        write_scorecard_text(text, card);
    }
    write_text_file(run_dir / "scorecard.txt", text.str());

    json measures = json::array();
    for (auto m : kAllMeasures) {
        std::vector<double> ranks;
        for (std::size_t e = 0; e < card.experiments.size(); ++e) ranks.push_back(card.rank(e, m));
        measures.push_back({{"measure", to_string(m)},
                            {"weight", card.weights[m]},
                            {"counted", m != Measure::ZeroProfile || card.include_zero_profile},
                            {"ranks", ranks}});
    }
    json ci = json::array();
    for (const auto& c : card.ci) ci.push_back(optional_json(c));
    json order = json::array();
    for (auto e : card.order) order.push_back(card.experiments[e]);
    json values_json = json::array();
    for (const auto& v : values) {
        json entropy;
        for (std::size_t f = 0; f < kFeatures; ++f) entropy[std::string(to_string(static_cast<Feature>(f)))] = v.entropy[f];
        values_json.push_back({{"experiment", v.id},
                               {"scorable", v.scorable},
                               {"zero_profile", v.zero_profile},
                               {"threshold_ratio", v.threshold_ratio},
                               {"peak_coincidence", v.peak_coincidence},
                               {"total_errors", v.total_errors},
                               {"peak_errors", v.peak_errors},
                               {"entropy", entropy}});
    }
    write_json_file(run_dir / "scorecard.json", {{"run_id", manifest.run_id},
                                                 {"experiments", card.experiments},
                                                 {"scorable", card.scorable},
                                                 {"ci", ci},
                                                 {"measures", measures},
                                                 {"values", values_json},
                                                 {"totals", card.totals},
                                                 {"ranking", order}});
    write_json_file(run_dir / "manifest.json", to_json(manifest));
    return card;
}

void export_daytype_likelihood(const fs::path& run_dir, const std::string& experiment, std::ostream& out) {
    const auto manifest = load_manifest(run_dir);
    const auto* e = manifest.find(experiment);
    if (!e) throw ConfigError("unknown experiment '" + experiment + "'");
    if (e->status != CellStatus::Ok || !e->external) {
        throw ConfigError("experiment '" + experiment + "' has no external measures");
    }
    const auto report = external_report_from_json(read_json_file(cell_dir(run_dir, experiment) / "external.json"));
    write_daytype_likelihood(out, report);
}

ArchetypeRequest parse_archetype_request(const json& j, const fs::path& base_dir) {
    ArchetypeRequest r;
    try {
        r.experiment = j.value("experiment", std::string());
        if (j.contains("survey")) r.survey = base_dir / j.at("survey").get<std::string>();
        if (j.contains("archetype")) {
            r.name = j.at("archetype").get<std::string>();
            r.filter = expert_archetype(r.name);
        }
        if (j.contains("filter")) {
            r.filter.clear();
            for (const auto& [attr, vals] : j.at("filter").items()) {
                const auto a = parse_attribute(attr);
                auto& allowed = r.filter[a];
                for (const auto& v : vals) {
                    const auto value = v.get<std::string>();
                    if (!in_vocabulary(a, value)) {
                        throw ConfigError("archetype filter value '" + value + "' is not in the " + attr + " vocabulary");
                    }
                    allowed.insert(value);
                }
            }
            r.name = j.value("name", std::string("custom"));
        }
        r.threshold = j.value("threshold", r.threshold);
        r.softmax.l2 = j.value("l2", r.softmax.l2);
        r.softmax.max_iter = j.value("max_iter", r.softmax.max_iter);
        r.softmax.balance_classes = j.value("balance_classes", r.softmax.balance_classes);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("archetype config: ") + e.what());
    }
    if (r.filter.empty()) throw ConfigError("archetype config needs 'archetype' or 'filter'");
    if (r.name.empty() || r.name.find_first_of("/\\") != std::string::npos) throw ConfigError("bad archetype name");
    return r;
}

ArchetypeRun run_archetype(const fs::path& run_dir, const ArchetypeRequest& request) {
    const auto manifest = load_manifest(run_dir);
    ArchetypeRun run;
    run.experiment = request.experiment;
    if (run.experiment.empty()) {
        for (const auto& e : manifest.experiments) {
            if (e.rank && *e.rank == 1) run.experiment = e.id;
        }
        if (run.experiment.empty()) throw ConfigError("no scored experiment in " + run_dir.string());
    }
    const auto* entry = manifest.find(run.experiment);
    if (!entry) throw ConfigError("unknown experiment '" + run.experiment + "'");
    if (entry->status != CellStatus::Ok) throw ConfigError("experiment '" + run.experiment + "' did not complete");

    auto data = load_run_data(run_dir, manifest);
    if (request.survey) data.survey = load_survey(*request.survey);
    if (data.survey.empty()) throw ConfigError("no survey data for the archetype fit");

    const auto dir = cell_dir(run_dir, run.experiment);
    const auto model = cluster_model_from_json(read_json_file(dir / "model.json"));
    if (model.labels.size() != data.dataset.size()) throw DataError("model does not match the run dataset");
    const SeasonMap seasons(manifest.seasons);
    const auto training = build_training_set(data.dataset, model.labels, data.survey, seasons);
    if (training.labels.empty()) throw ConfigError("no clustered profile has a survey record");
    run.model = fit_archetype_model(training, request.softmax);
    run.associations = associate(run.model, request.threshold);
    run.archetype = assemble_archetype(run.associations, request.filter);

    std::vector<Rdlp> rdlps;
    if (fs::exists(dir / "external.json")) {
        rdlps = external_report_from_json(read_json_file(dir / "external.json")).rdlps;
    } else {
        rdlps = build_rdlps(model, data.dataset);
    }

    const auto out = run_dir / "archetypes" / run.experiment;
    std::ostringstream odds;
    odds << "feature";
    for (int label : run.model.regression.labels) odds << ",c" << label;
    odds << '\n';
    for (std::size_t f = 0; f < run.model.vocabulary.size(); ++f) {
        odds << run.model.vocabulary.name(f);
        for (std::size_t c = 0; c < run.model.odds_ratios.cols(); ++c) {
            odds << ',' << detail::format_double(run.model.odds_ratios(f, c));
        }
        odds << '\n';
    }
    write_text_file(out / "odds_ratios.csv", odds.str());

    std::ostringstream assoc;
    assoc << "feature,cluster,odds_ratio\n";
    for (const auto& a : run.associations) {
        assoc << a.feature << ',' << a.cluster << ',' << detail::format_double(a.odds_ratio) << '\n';
    }
    write_text_file(out / "associations.csv", assoc.str());

    std::ostringstream report;
    report << "experiment " << run.experiment << "\narchetype " << request.name << "\ntraining rows "
           << training.labels.size() << " (skipped " << training.skipped_rows << ")\n";
    write_archetype_report(report, run.archetype, rdlps);
    run.report = out / (request.name + ".txt");
    write_text_file(run.report, report.str());
    return run;
}

}  // namespace loadpat
