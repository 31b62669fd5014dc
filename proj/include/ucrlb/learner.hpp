#pragma once

#include "ucrlb/evi.hpp"
#include "ucrlb/mdp.hpp"
#include "ucrlb/statistics.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace ucrlb {

enum class Algorithm { ucrl2b, ucrl2_hoeffding, fixed_policy };

std::string to_string(Algorithm algorithm);
Algorithm parse_algorithm(const std::string& text);

struct LearnerConfig {
    std::uint64_t horizon = 1;
    double delta = 0.1;
    double alpha = 0.9;
    Algorithm algorithm = Algorithm::ucrl2b;
    std::uint64_t seed = 0;
    State initial_state = 0;
    SetOverride set_override = SetOverride::none;
    std::uint64_t evi_max_iterations = 1'000'000;
    /// When set, statistics and radii are dumped at every episode start.
    std::ostream* debug_dump = nullptr;

    std::string describe() const;
};

struct StepRecord {
    std::uint64_t t;
    State s;
    Action a;
    double reward;
    State next;
    std::uint64_t k;

    bool operator==(const StepRecord&) const = default;
};

struct EpisodeRecord {
    std::uint64_t k;
    std::uint64_t t_k;
    double gain;
    std::uint64_t evi_iterations;
    double epsilon;
    bool converged;

    bool operator==(const EpisodeRecord&) const = default;
};

struct RunLog {
    std::vector<StepRecord> steps;
    std::vector<EpisodeRecord> episodes;
    std::uint64_t seed = 0;
    std::string config;
};

/// Called once per episode, after planning and before the first action.
using EpisodeObserver =
    std::function<void(const RunningStats&, const ConfidenceSets&, const PlanResult&)>;

/// UCRL2B: empirical Bernstein box sets, extended value iteration at accuracy
/// r_max / t_k, and the doubling rule nu_k(s,a) >= max(1, N_k(s,a)) checked
/// after each executed step.
RunLog run_ucrl2b(const TabularMDP& env, const LearnerConfig& config,
                  const EpisodeObserver& observer = {});

/// UCRL2 baseline with Hoeffding reward intervals and L1 transition balls.
RunLog run_ucrl2_hoeffding(const TabularMDP& env, const LearnerConfig& config,
                           const EpisodeObserver& observer = {});

/// Follows `policy` for `horizon` steps without learning. The log has a
/// single episode whose gain is NaN.
RunLog run_fixed_policy(const TabularMDP& env, const Policy& policy, std::uint64_t horizon,
                        std::uint64_t seed, State initial_state = 0);

/// Dispatches on config.algorithm; `policy` is used only by fixed-policy runs.
RunLog run_learner(const TabularMDP& env, const LearnerConfig& config, const Policy* policy = nullptr);

/// Re-applies the doubling rule to the recorded (s,a) sequence and returns
/// the episode index of every step.
std::vector<std::uint64_t> replay_episode_indices(const RunLog& log, std::size_t num_states,
                                                  std::size_t num_actions);

/// Steps file: header `t,s,a,r,s_next,k`, one row per step.
/// Episodes sidecar: header `k,t_k,gain,evi_iterations,epsilon,converged`.
/// Reals are written with 17 significant digits.
void write_steps_csv(std::ostream& out, const RunLog& log);
void write_episodes_csv(std::ostream& out, const RunLog& log);
RunLog read_run_log(std::istream& steps, std::istream& episodes);

} // namespace ucrlb
