#pragma once

#include "ucrlb/config.hpp"
#include "ucrlb/exact.hpp"
#include "ucrlb/learner.hpp"
#include "ucrlb/mdp.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ucrlb {

struct CoverageParams {
    std::uint64_t num_runs = 200;
    std::uint64_t check_horizon = 10'000;
    SetOverride set_override = SetOverride::none;
};

/// Experiment description, usually read from a key-value file:
///
///   env.name = riverswim            # riverswim | two-state-cycle | random-communicating | bandit
///   env.params.n = 6                # environment parameters, see EnvironmentSpec
///   env.seed = 0
///   env.reward_kind = bernoulli     # bernoulli | deterministic
///   env.r_max = 1
///   run.algorithms = ucrl2b, ucrl2-hoeffding   # also fixed-policy
///   run.policy = optimal            # fixed-policy only: `optimal` or a comma list of actions
///   run.horizon = 100000
///   run.delta = 0.1
///   run.alpha = 0.9
///   run.seeds = 1..10               # comma list and/or inclusive ranges
///   run.set_override = none         # none | zero-width | vacuous
///   run.initial_state = 0
///   run.output_dir = out
///   run.workers = 1
///   coverage.num_runs = 200
///   coverage.check_horizon = 10000
///   coverage.set_override = none
struct ExperimentConfig {
    EnvironmentSpec env;
    std::vector<Algorithm> algorithms{Algorithm::ucrl2b};
    std::string policy = "optimal";
    std::uint64_t horizon = 1;
    double delta = 0.1;
    double alpha = 0.9;
    std::vector<std::uint64_t> seeds{0};
    SetOverride set_override = SetOverride::none;
    State initial_state = 0;
    std::string output_dir = "out";
    unsigned workers = 1;
    CoverageParams coverage;
    double truth_tolerance = 1e-10;

    /// Throws ConfigError naming the field and line of the first problem.
    static ExperimentConfig from_config(const KeyValueConfig& config);
    static ExperimentConfig load(const std::string& path);

    LearnerConfig learner(Algorithm algorithm, std::uint64_t seed) const;
};

/// Powers of two up to T, plus T itself.
std::vector<std::uint64_t> regret_grid(std::uint64_t horizon);

struct RegretSeries {
    std::vector<std::uint64_t> t;
    std::vector<double> regret;
    std::vector<std::uint64_t> episodes;
};

/// Cumulative regret sum_{u <= t} (g* - r_u) at each grid point. Throws
/// std::invalid_argument when a grid point exceeds the log length.
RegretSeries compute_regret(const RunLog& log, const GroundTruth& truth,
                            std::span<const std::uint64_t> grid);

struct CoverageReport {
    std::uint64_t num_runs = 0;
    std::uint64_t runs_with_violation = 0;
    double violation_fraction = 0.0;
    /// Index k-1: runs whose sets missed the true MDP at episode k, and runs
    /// that reached episode k at all.
    std::vector<std::uint64_t> violations_by_episode;
    std::vector<std::uint64_t> runs_by_episode;
};

/// Runs UCRL2B coverage.num_runs times up to coverage.check_horizon and tests,
/// at every episode start, whether the true rewards and transitions lie in the
/// confidence sets. Run i uses a seed split deterministically from seeds[0].
CoverageReport coverage_experiment(const ExperimentConfig& config);

std::string coverage_report_json(const CoverageReport& report);

struct SuiteResult {
    GroundTruth truth;
    std::vector<std::string> files; // relative to output_dir, sorted
};

/// For every (algorithm, seed): `<alg>_seed<n>.steps.csv` with its
/// `.episodes.csv` sidecar, `<alg>_seed<n>.regret.csv` and
/// `<alg>_seed<n>.truth.json`; then `aggregate.csv` and `scaling.csv`.
///
/// regret.csv:    algorithm,seed,t,regret,episodes_so_far
/// aggregate.csv: algorithm,t,mean_regret,min_regret,max_regret,num_seeds
/// scaling.csv:   algorithm,t,mean_regret,mean_regret_over_sqrt_t
///
/// Cells run on up to `workers` threads; each file is written to a temporary
/// name and renamed into place.
SuiteResult run_suite(const ExperimentConfig& config);

/// Seed list syntax: `1, 4, 10..20`.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

} // namespace ucrlb
