#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "loadpat/errors.hpp"
#include "loadpat/persist.hpp"
#include "loadpat/suite.hpp"

namespace fs = std::filesystem;
using namespace loadpat;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kPartial = 2;

nlohmann::json read_config(const fs::path& path) {
    try {
        return read_json_file(path);
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Load-profile clustering experiments"};
    app.require_subcommand(1);

    std::string config_path, out_dir, experiment, output, archetype_name;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> top_k, threads;
    bool quiet = false;

    auto* generate = app.add_subcommand("generate", "Write a synthetic dataset");
    generate->add_option("--config", config_path, "Generator spec, or a suite config with data.synthetic")->required();
    generate->add_option("--seed", seed, "Random seed");
    generate->add_option("--out-dir", out_dir, "Output directory")->required();

    auto* run = app.add_subcommand("run", "Run an experiment suite");
    run->add_option("--config", config_path, "Suite config")->required();
    run->add_option("--seed", seed, "Override the config seed");
    run->add_option("--out-dir", out_dir, "Run directory")->required();
    run->add_option("--top-k", top_k, "Cells evaluated externally (0 = all)");
    run->add_option("--threads", threads, "Worker threads");
    run->add_flag("--quiet", quiet, "No progress output");

    auto* score = app.add_subcommand("score", "Rebuild and print the score card of a run");
    score->add_option("--out-dir", out_dir, "Run directory")->required();

    auto* exp = app.add_subcommand("export", "Export day-type likelihoods of one experiment");
    exp->add_option("--out-dir", out_dir, "Run directory")->required();
    exp->add_option("--experiment", experiment, "Experiment cell id")->required();
    exp->add_option("--output", output, "Output file (default stdout)");

    auto* arch = app.add_subcommand("archetype", "Fit attribute associations and assemble an archetype");
    arch->add_option("--config", config_path, "Archetype config");
    arch->add_option("--out-dir", out_dir, "Run directory")->required();
    arch->add_option("--experiment", experiment, "Experiment cell id (default: best scored)");
    arch->add_option("--archetype", archetype_name, "Expert archetype name");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*generate) {
            auto j = read_config(config_path);
            GeneratorSpec spec;
            std::uint64_t s = seed.value_or(0);
            if (j.contains("groups")) {
                spec = parse_generator_spec(j);
            } else {
                const auto suite = load_suite_config(config_path);
                if (!suite.generator) throw ConfigError("config has no synthetic data section");
                spec = *suite.generator;
                if (!seed) s = suite.seed;
            }
            const auto data = write_synthetic(spec, s, out_dir);
            std::cout << data.dataset.size() << " profiles, " << data.dataset.households().size()
                      << " households written to " << out_dir << '\n';
            return kOk;
        }
        if (*run) {
            const auto config = load_suite_config(config_path);
            RunOptions opts{out_dir, seed, top_k, threads, quiet ? nullptr : &std::cerr};
            const auto manifest = run_suite(config, opts);
            std::ifstream card(fs::path(out_dir) / "scorecard.txt");
            std::cout << card.rdbuf();
            const auto failures = manifest.failures();
            if (failures > 0) {
                std::cerr << failures << " of " << manifest.experiments.size() << " cells failed\n";
                return kPartial;
            }
            return kOk;
        }
        if (*score) {
            report_scorecard(out_dir);
            std::ifstream card(fs::path(out_dir) / "scorecard.txt");
            std::cout << card.rdbuf();
            return kOk;
        }
        if (*exp) {
            if (output.empty()) {
                export_daytype_likelihood(out_dir, experiment, std::cout);
            } else {
                std::ostringstream text;
                export_daytype_likelihood(out_dir, experiment, text);
                write_text_file(output, text.str());
            }
            return kOk;
        }
        if (*arch) {
            nlohmann::json j = nlohmann::json::object();
            fs::path base;
            if (!config_path.empty()) {
                j = read_config(config_path);
                base = fs::path(config_path).parent_path();
            }
            if (!archetype_name.empty()) j["archetype"] = archetype_name;
            if (!experiment.empty()) j["experiment"] = experiment;
            const auto request = parse_archetype_request(j, base);
            const auto result = run_archetype(out_dir, request);
            std::ifstream report(result.report);
            std::cout << report.rdbuf();
            return kOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    }
    return kOk;
}
