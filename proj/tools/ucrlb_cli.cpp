// Command-line entry point for experiment suites, coverage checks and
// ground-truth computation.
//
//   ucrlb run --config suite.cfg
//   ucrlb coverage --config coverage.cfg
//   ucrlb ground-truth --env riverswim:n=6
//
// Failures print one JSON object on stderr and exit nonzero:
//   {"error":"config","field":"run.delta","line":7,"message":"..."}

#include "ucrlb/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>

namespace {

int report_error(const std::string& kind, const std::string& message, const std::string& field = {},
                 int line = 0) {
    nlohmann::ordered_json error;
    error["error"] = kind;
    if (!field.empty()) error["field"] = field;
    if (line > 0) error["line"] = line;
    error["message"] = message;
    std::cerr << error.dump() << std::endl;
    return kind == "config" ? 2 : 1;
}

ucrlb::EnvironmentSpec resolve_env(const std::string& text) {
    if (std::filesystem::is_regular_file(text))
        return ucrlb::EnvironmentSpec::from_config(ucrlb::KeyValueConfig::load(text));
    return ucrlb::EnvironmentSpec::parse_inline(text);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"UCRL2B average-reward learner: experiments, coverage and ground truth"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    unsigned workers = 0;
    auto* run = app.add_subcommand("run", "run an experiment suite and write CSV artifacts");
    run->add_option("--config", config_path, "experiment config file")->required();
    run->add_option("--output-dir", output_dir, "override run.output_dir");
    run->add_option("--workers", workers, "override run.workers");

    auto* coverage = app.add_subcommand("coverage", "Monte-Carlo confidence-set coverage test");
    coverage->add_option("--config", config_path, "experiment config file")->required();
    coverage->add_option("--workers", workers, "override run.workers");

    std::string env_text;
    double tolerance = 1e-10;
    auto* truth = app.add_subcommand("ground-truth", "optimal gain, bias and diameter of an environment");
    truth->add_option("--env", env_text, "inline spec (name:key=value;...) or config file")->required();
    truth->add_option("--tol", tolerance, "solver tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        return report_error("usage", e.what());
    }

    try {
        if (*run) {
            auto config = ucrlb::ExperimentConfig::load(config_path);
            if (!output_dir.empty()) config.output_dir = output_dir;
            if (workers > 0) config.workers = workers;
            const auto result = ucrlb::run_suite(config);
            nlohmann::ordered_json summary;
            summary["output_dir"] = config.output_dir;
            summary["g_star"] = result.truth.g_star;
            summary["files"] = result.files;
            std::cout << summary.dump(2) << std::endl;
        } else if (*coverage) {
            auto config = ucrlb::ExperimentConfig::load(config_path);
            if (workers > 0) config.workers = workers;
            const auto report = ucrlb::coverage_experiment(config);
            std::cout << ucrlb::coverage_report_json(report);
        } else if (*truth) {
            const auto spec = resolve_env(env_text);
            const auto mdp = ucrlb::build_environment(spec);
            std::cout << ucrlb::to_json(ucrlb::compute_ground_truth(mdp, tolerance));
        }
    } catch (const ucrlb::ConfigError& e) {
        return report_error("config", e.what(), e.field(), e.line());
    } catch (const std::invalid_argument& e) {
        return report_error("config", e.what());
    } catch (const std::exception& e) {
        return report_error("runtime", e.what());
    }
    return 0;
}
