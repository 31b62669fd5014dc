#include "ucrlb/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace ucrlb {

namespace fs = std::filesystem;

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    for (const auto& item : split_list(text)) {
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            seeds.push_back(std::stoull(item));
            continue;
        }
        const std::uint64_t first = std::stoull(item.substr(0, dots));
        const std::uint64_t last = std::stoull(item.substr(dots + 2));
        if (last < first) throw std::invalid_argument("empty seed range '" + item + "'");
        for (std::uint64_t s = first; s <= last; ++s) seeds.push_back(s);
    }
    return seeds;
}

namespace {

template <typename Parse>
auto parse_field(const KeyValueConfig& config, const std::string& key, Parse parse) {
    try {
        return parse(config.get_string(key));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(key, config.line_of(key), e.what());
    }
}

} // namespace

ExperimentConfig ExperimentConfig::from_config(const KeyValueConfig& config) {
    ExperimentConfig out;
    out.env = EnvironmentSpec::from_config(config);
    try {
        build_environment(out.env);
    } catch (const std::invalid_argument& e) {
        const std::string field = config.contains("env.name") ? "env.name" : "env";
        throw ConfigError(field, config.line_of(field), e.what());
    }

    if (config.contains("run.algorithms")) {
        out.algorithms = parse_field(config, "run.algorithms", [](const std::string& text) {
            std::vector<Algorithm> list;
            for (const auto& item : split_list(text)) list.push_back(parse_algorithm(item));
            if (list.empty()) throw std::invalid_argument("algorithm list is empty");
            return list;
        });
    }
    out.policy = config.get_string("run.policy", out.policy);
    out.horizon = config.get_uint("run.horizon");
    if (out.horizon < 1) throw ConfigError("run.horizon", config.line_of("run.horizon"), "horizon must be >= 1");
    out.delta = config.get_double("run.delta", out.delta);
    if (!(out.delta > 0.0 && out.delta < 1.0))
        throw ConfigError("run.delta", config.line_of("run.delta"), "delta must lie in (0, 1)");
    out.alpha = config.get_double("run.alpha", out.alpha);
    if (!(out.alpha > 0.0 && out.alpha <= 1.0))
        throw ConfigError("run.alpha", config.line_of("run.alpha"), "alpha must lie in (0, 1]");
    if (config.contains("run.seeds")) {
        out.seeds = parse_field(config, "run.seeds", parse_seed_list);
        if (out.seeds.empty()) throw ConfigError("run.seeds", config.line_of("run.seeds"), "seed list is empty");
    }
    if (config.contains("run.set_override"))
        out.set_override = parse_field(config, "run.set_override", parse_set_override);
    out.initial_state = config.get_uint("run.initial_state", 0);
    out.output_dir = config.get_string("run.output_dir", out.output_dir);
    out.workers = static_cast<unsigned>(std::max<std::uint64_t>(1, config.get_uint("run.workers", 1)));

    out.coverage.num_runs = config.get_uint("coverage.num_runs", out.coverage.num_runs);
    out.coverage.check_horizon = config.get_uint("coverage.check_horizon", out.coverage.check_horizon);
    if (out.coverage.num_runs < 1 || out.coverage.check_horizon < 1)
        throw ConfigError("coverage", 0, "coverage.num_runs and coverage.check_horizon must be >= 1");
    if (config.contains("coverage.set_override"))
        out.coverage.set_override = parse_field(config, "coverage.set_override", parse_set_override);
    return out;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    return from_config(KeyValueConfig::load(path));
}

LearnerConfig ExperimentConfig::learner(Algorithm algorithm, std::uint64_t seed) const {
    LearnerConfig cfg;
    cfg.algorithm = algorithm;
    cfg.horizon = horizon;
    cfg.delta = delta;
    cfg.alpha = alpha;
    cfg.seed = seed;
    cfg.initial_state = initial_state;
    cfg.set_override = set_override;
    return cfg;
}

std::vector<std::uint64_t> regret_grid(std::uint64_t horizon) {
    std::vector<std::uint64_t> grid;
    for (std::uint64_t t = 1; t <= horizon; t *= 2) {
        grid.push_back(t);
        if (t > horizon / 2) break;
    }
    if (grid.empty() || grid.back() != horizon) grid.push_back(horizon);
    return grid;
}

RegretSeries compute_regret(const RunLog& log, const GroundTruth& truth,
                            std::span<const std::uint64_t> grid) {
    RegretSeries series;
    double cumulative = 0.0;
    std::uint64_t episodes = 0;
    std::size_t next = 0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        if (grid[j] > log.steps.size())
            throw std::invalid_argument("regret grid point " + std::to_string(grid[j]) +
                                        " exceeds log length " + std::to_string(log.steps.size()));
        if (j > 0 && grid[j] < grid[j - 1])
            throw std::invalid_argument("regret grid must be nondecreasing");
    }
    // A zero grid point carries the empty sum.
    for (; next < grid.size() && grid[next] == 0; ++next) {
        series.t.push_back(0);
        series.regret.push_back(0.0);
        series.episodes.push_back(0);
    }
    for (std::size_t i = 0; i < log.steps.size() && next < grid.size(); ++i) {
        cumulative += truth.g_star - log.steps[i].reward;
        episodes = std::max(episodes, log.steps[i].k);
        while (next < grid.size() && grid[next] == i + 1) {
            series.t.push_back(grid[next]);
            series.regret.push_back(cumulative);
            series.episodes.push_back(episodes);
            ++next;
        }
    }
    return series;
}

namespace {

/// Runs `count` independent jobs on up to `workers` threads; rethrows the
/// first failure.
template <typename Job>
void parallel_for(std::size_t count, unsigned workers, Job job) {
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = cursor++; i < count; i = cursor++) {
            try {
                job(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < n; ++w) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
}

void write_atomically(const fs::path& path, const std::string& content) {
    fs::path temporary = path;
    temporary += ".tmp";
    {
        std::ofstream out(temporary, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + temporary.string() + "'");
        out << content;
        if (!out) throw std::runtime_error("write failed for '" + temporary.string() + "'");
    }
    fs::rename(temporary, path);
}

std::uint64_t coverage_seed(std::uint64_t base, std::uint64_t run) {
    return RandomStream(base).split(run).next_u64();
}

} // namespace

CoverageReport coverage_experiment(const ExperimentConfig& config) {
    const TabularMDP env = build_environment(config.env);
    const std::uint64_t runs = config.coverage.num_runs;
    std::vector<std::vector<bool>> profiles(runs);

    parallel_for(runs, config.workers, [&](std::size_t i) {
        LearnerConfig cfg = config.learner(Algorithm::ucrl2b, coverage_seed(config.seeds.front(), i));
        cfg.horizon = config.coverage.check_horizon;
        cfg.set_override = config.coverage.set_override;
        std::vector<bool>& profile = profiles[i];
        run_ucrl2b(env, cfg, [&](const RunningStats&, const ConfidenceSets& sets, const PlanResult&) {
            profile.push_back(!sets.contains(env));
        });
    });

    CoverageReport report;
    report.num_runs = runs;
    for (const auto& profile : profiles) {
        if (profile.size() > report.runs_by_episode.size()) {
            report.runs_by_episode.resize(profile.size(), 0);
            report.violations_by_episode.resize(profile.size(), 0);
        }
        bool any = false;
        for (std::size_t k = 0; k < profile.size(); ++k) {
            ++report.runs_by_episode[k];
            if (profile[k]) {
                ++report.violations_by_episode[k];
                any = true;
            }
        }
        if (any) ++report.runs_with_violation;
    }
    report.violation_fraction =
        static_cast<double>(report.runs_with_violation) / static_cast<double>(runs);
    return report;
}

std::string coverage_report_json(const CoverageReport& report) {
    nlohmann::ordered_json out;
    out["num_runs"] = report.num_runs;
    out["runs_with_violation"] = report.runs_with_violation;
    out["violation_fraction"] = report.violation_fraction;
    out["violations_by_episode"] = report.violations_by_episode;
    out["runs_by_episode"] = report.runs_by_episode;
    return out.dump(2) + "\n";
}

SuiteResult run_suite(const ExperimentConfig& config) {
    const TabularMDP env = build_environment(config.env);
    const fs::path dir(config.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw std::runtime_error("cannot create output directory '" + dir.string() + "'");

    SuiteResult result;
    result.truth = compute_ground_truth(env, config.truth_tolerance);
    const std::string truth_json = to_json(result.truth);

    Policy fixed = result.truth.optimal_policy;
    if (config.policy != "optimal") {
        std::vector<Action> actions;
        for (const auto& item : split_list(config.policy)) actions.push_back(std::stoull(item));
        fixed = Policy::deterministic(std::move(actions));
        validate_policy(fixed, env.num_states(), env.num_actions());
    }

    struct Cell {
        Algorithm algorithm;
        std::uint64_t seed;
        RegretSeries series;
    };
    std::vector<Cell> cells;
    for (const Algorithm algorithm : config.algorithms)
        for (const std::uint64_t seed : config.seeds) cells.push_back({algorithm, seed, {}});

    const auto grid = regret_grid(config.horizon);
    parallel_for(cells.size(), config.workers, [&](std::size_t i) {
        Cell& cell = cells[i];
        const RunLog log = run_learner(env, config.learner(cell.algorithm, cell.seed), &fixed);
        cell.series = compute_regret(log, result.truth, grid);

        const std::string stem = to_string(cell.algorithm) + "_seed" + std::to_string(cell.seed);
        std::ostringstream steps, episodes, regret;
        write_steps_csv(steps, log);
        write_episodes_csv(episodes, log);
        regret.precision(17);
        regret << "algorithm,seed,t,regret,episodes_so_far\n";
        for (std::size_t j = 0; j < cell.series.t.size(); ++j)
            regret << to_string(cell.algorithm) << ',' << cell.seed << ',' << cell.series.t[j] << ','
                   << cell.series.regret[j] << ',' << cell.series.episodes[j] << '\n';
        write_atomically(dir / (stem + ".steps.csv"), steps.str());
        write_atomically(dir / (stem + ".episodes.csv"), episodes.str());
        write_atomically(dir / (stem + ".regret.csv"), regret.str());
        write_atomically(dir / (stem + ".truth.json"), truth_json);
    });

    std::ostringstream aggregate, scaling;
    aggregate.precision(17);
    scaling.precision(17);
    aggregate << "algorithm,t,mean_regret,min_regret,max_regret,num_seeds\n";
    scaling << "algorithm,t,mean_regret,mean_regret_over_sqrt_t\n";
    for (const Algorithm algorithm : config.algorithms) {
        for (std::size_t j = 0; j < grid.size(); ++j) {
            double total = 0.0;
            double lo = std::numeric_limits<double>::infinity();
            double hi = -std::numeric_limits<double>::infinity();
            std::size_t count = 0;
            for (const Cell& cell : cells) {
                if (cell.algorithm != algorithm) continue;
                const double value = cell.series.regret[j];
                total += value;
                lo = std::min(lo, value);
                hi = std::max(hi, value);
                ++count;
            }
            const double mean = total / static_cast<double>(count);
            const std::string name = to_string(algorithm);
            aggregate << name << ',' << grid[j] << ',' << mean << ',' << lo << ',' << hi << ','
                      << count << '\n';
            scaling << name << ',' << grid[j] << ',' << mean << ','
                    << mean / std::sqrt(static_cast<double>(grid[j])) << '\n';
        }
    }
    write_atomically(dir / "aggregate.csv", aggregate.str());
    write_atomically(dir / "scaling.csv", scaling.str());

    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file()) result.files.push_back(entry.path().filename().string());
    std::sort(result.files.begin(), result.files.end());
    return result;
}

} // namespace ucrlb
