#pragma once

#include "ucrlb/mdp.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ucrlb {

/// Per-(s,a) visit counts and reward/transition statistics for the episodic
/// learner. Counters in the current episode accumulate in record_step; the
/// empirical estimates (p_hat, r_hat and their variances) only move at
/// finalize_episode, so they always describe data from before t_k.
class RunningStats {
public:
    RunningStats(std::size_t num_states, std::size_t num_actions, double r_max);

    /// Throws std::out_of_range on bad indices and std::invalid_argument on
    /// rewards outside [0, r_max].
    void record_step(State s, Action a, double reward, State next);

    /// Folds the episode counters into N and refreshes the estimates.
    void finalize_episode();

    /// Doubling rule: nu_k(s,a) >= max(1, N_k(s,a)).
    bool episode_should_end(State s, Action a) const {
        const auto i = index(s, a);
        return episode_visits_[i] >= std::max<std::uint64_t>(1, visits_[i]);
    }

    std::size_t num_states() const { return num_states_; }
    std::size_t num_actions() const { return num_actions_; }
    double r_max() const { return r_max_; }

    std::uint64_t visits(State s, Action a) const { return visits_[index(s, a)]; }
    std::uint64_t episode_visits(State s, Action a) const { return episode_visits_[index(s, a)]; }
    std::uint64_t transition_count(State s, Action a, State next) const {
        return transition_count_[index(s, a) * num_states_ + next];
    }
    double reward_sum(State s, Action a) const { return reward_sum_[index(s, a)]; }
    double reward_sq_sum(State s, Action a) const { return reward_sq_sum_[index(s, a)]; }

    double p_hat(State s, Action a, State next) const { return p_hat_[index(s, a) * num_states_ + next]; }
    double r_hat(State s, Action a) const { return r_hat_[index(s, a)]; }
    double var_p(State s, Action a, State next) const {
        const double p = p_hat(s, a, next);
        return p * (1.0 - p);
    }
    double var_r(State s, Action a) const { return var_r_[index(s, a)]; }

    /// Global time, starting at 1; advanced once per recorded step.
    std::uint64_t t() const { return t_; }
    std::uint64_t episode_start() const { return t_k_; }
    std::uint64_t episode() const { return k_; }

private:
    std::size_t index(State s, Action a) const { return s * num_actions_ + a; }

    std::size_t num_states_;
    std::size_t num_actions_;
    double r_max_;

    std::vector<std::uint64_t> visits_;
    std::vector<std::uint64_t> episode_visits_;
    std::vector<std::uint64_t> transition_count_;
    std::vector<double> reward_sum_;
    std::vector<double> reward_sq_sum_;
    std::vector<double> episode_reward_sq_sum_;

    std::vector<double> p_hat_;
    std::vector<double> r_hat_;
    std::vector<double> var_r_;

    std::uint64_t t_ = 1;
    std::uint64_t t_k_ = 1;
    std::uint64_t k_ = 1;
};

/// Empirical Bernstein half-width
///   2 sqrt(variance * L / n+) + 6 * scale * L / n+,   L = ln(6 S A n+ / delta),
/// with n+ = max(1, n). `scale` is 1 for transitions and r_max for rewards.
double bernstein_radius(double variance, std::uint64_t n, std::size_t num_states,
                        std::size_t num_actions, double delta, double scale);

double bernstein_radius_p(const RunningStats& stats, State s, Action a, State next, double delta);
double bernstein_radius_r(const RunningStats& stats, State s, Action a, double delta);

/// Hoeffding radii of the UCRL2 baseline:
///   reward:        r_max * sqrt(7 ln(2 S A t_k / delta) / (2 n+))
///   transition L1: sqrt(14 S ln(2 A t_k / delta) / n+)
double hoeffding_radius_r(std::uint64_t n, std::size_t num_states, std::size_t num_actions,
                          std::uint64_t t_k, double delta, double r_max);
double hoeffding_radius_l1(std::uint64_t n, std::size_t num_states, std::size_t num_actions,
                           std::uint64_t t_k, double delta);

/// Testing and experiment hooks for the set builders. `zero_width` forces
/// every radius of a visited pair to 0; unvisited pairs stay full-range
/// because their empirical rows are not distributions. `vacuous` ignores the
/// data and returns the full range everywhere.
enum class SetOverride { none, zero_width, vacuous };

std::string to_string(SetOverride value);
SetOverride parse_set_override(const std::string& text);

/// Episode-k plausible set: a reward interval per (s,a) and, per (s,a),
/// either a box of per-s' intervals (Bernstein) or an L1 ball around p_hat
/// (Hoeffding baseline). Immutable once built.
struct ConfidenceSets {
    enum class Shape { box, l1_ball };

    std::size_t num_states = 0;
    std::size_t num_actions = 0;
    double r_max = 1.0;
    double delta = 0.0;
    Shape shape = Shape::box;

    std::vector<double> r_low, r_high, beta_r; // (s, a)
    std::vector<double> p_low, p_high, beta_p; // (s, a, s'), box shape
    std::vector<double> p_center, l1_radius;   // (s, a, s') and (s, a), l1 shape

    std::size_t sa(State s, Action a) const { return s * num_actions + a; }
    std::size_t sas(State s, Action a, State next) const { return sa(s, a) * num_states + next; }

    /// True when the MDP's mean rewards and transitions all lie in the sets.
    bool contains(const TabularMDP& mdp) const;

    /// Zero-width box at the MDP's own parameters.
    static ConfidenceSets point(const TabularMDP& mdp);
    /// Full-range box: every reward in [0, r_max], every transition in [0, 1].
    static ConfidenceSets vacuous(std::size_t num_states, std::size_t num_actions, double r_max);
};

/// Bernstein box sets from the finalized statistics.
ConfidenceSets build_confidence_sets(const RunningStats& stats, double delta,
                                     SetOverride override = SetOverride::none);

/// Hoeffding reward intervals and L1 transition balls (UCRL2 baseline).
ConfidenceSets build_hoeffding_sets(const RunningStats& stats, double delta,
                                    SetOverride override = SetOverride::none);

/// Appends one row per (s,a,s'):
///   episode s a s_next N p_hat beta_p r_hat beta_r
void write_debug_dump(std::ostream& out, const RunningStats& stats, const ConfidenceSets& sets);
void write_debug_dump_header(std::ostream& out);

} // namespace ucrlb
