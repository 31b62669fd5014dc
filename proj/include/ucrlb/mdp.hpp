#pragma once

#include "ucrlb/config.hpp"
#include "ucrlb/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace ucrlb {

using State = std::size_t;
using Action = std::size_t;

enum class RewardKind { bernoulli_scaled, deterministic };

std::string to_string(RewardKind kind);
RewardKind parse_reward_kind(const std::string& text);

/// Finite MDP with a uniform action set. Transitions are stored row-major as
/// (s, a, s'); rewards are means of a [0, r_max]-supported distribution.
///
/// Immutable after construction. The constructor checks shapes only; use
/// validate_mdp for the probabilistic invariants.
class TabularMDP {
public:
    TabularMDP(std::size_t num_states, std::size_t num_actions, std::vector<double> transition,
               std::vector<double> reward_mean, RewardKind reward_kind = RewardKind::bernoulli_scaled,
               double r_max = 1.0);

    std::size_t num_states() const { return num_states_; }
    std::size_t num_actions() const { return num_actions_; }
    RewardKind reward_kind() const { return reward_kind_; }
    double r_max() const { return r_max_; }

    double transition(State s, Action a, State next) const {
        return transition_[(s * num_actions_ + a) * num_states_ + next];
    }
    std::span<const double> row(State s, Action a) const {
        return {transition_.data() + (s * num_actions_ + a) * num_states_, num_states_};
    }
    double reward_mean(State s, Action a) const { return reward_mean_[s * num_actions_ + a]; }

    const std::vector<double>& transition_tensor() const { return transition_; }
    const std::vector<double>& reward_matrix() const { return reward_mean_; }

private:
    std::size_t num_states_;
    std::size_t num_actions_;
    std::vector<double> transition_;
    std::vector<double> reward_mean_;
    RewardKind reward_kind_;
    double r_max_;
};

struct SupportProfile {
    std::vector<std::size_t> gamma; // indexed s * A + a
    std::size_t gamma_max = 0;
};

/// Stationary policy, either deterministic (one action per state) or a
/// distribution over actions per state.
class Policy {
public:
    enum class Kind { deterministic, stochastic };

    static Policy deterministic(std::vector<Action> actions);
    static Policy stochastic(std::size_t num_actions, std::vector<double> probabilities);

    Kind kind() const { return kind_; }
    std::size_t num_states() const;
    const std::vector<Action>& actions() const { return actions_; }
    const std::vector<double>& probabilities() const { return probabilities_; }

    /// For deterministic policies the RNG is not touched.
    Action select(State s, RandomStream& rng) const;
    Action action(State s) const;
    double probability(State s, Action a) const;

    bool operator==(const Policy&) const = default;

private:
    Kind kind_ = Kind::deterministic;
    std::size_t num_actions_ = 0;
    std::vector<Action> actions_;
    std::vector<double> probabilities_;
};

struct Violation {
    enum class Kind { row_sum, transition_range, reward_range };
    Kind kind;
    State s;
    Action a;
    double value;
};

struct ValidationReport {
    bool ok = true;
    std::vector<Violation> violations;
};

ValidationReport validate_mdp(const TabularMDP& mdp);

/// Errors from validate_policy are thrown as std::invalid_argument.
void validate_policy(const Policy& policy, std::size_t num_states, std::size_t num_actions);

SupportProfile support_profile(const TabularMDP& mdp);

/// True when every state reaches every other along some action's support.
bool is_communicating(const TabularMDP& mdp);

struct StepResult {
    double reward;
    State next_state;
};

/// Samples one transition. Consumes exactly two draws from `rng`.
StepResult step(const TabularMDP& mdp, State s, Action a, RandomStream& rng);

struct EnvironmentSpec {
    std::string name;
    std::map<std::string, std::string> params;
    std::uint64_t seed = 0;
    RewardKind reward_kind = RewardKind::bernoulli_scaled;
    double r_max = 1.0;

    /// Reads `env.name`, `env.params.*`, `env.seed`, `env.reward_kind`, `env.r_max`.
    static EnvironmentSpec from_config(const KeyValueConfig& config);
    /// Compact form `name[:key=value,...]`, e.g. `riverswim:n=6`. The keys
    /// `seed`, `reward_kind` and `r_max` are lifted out of `params`.
    static EnvironmentSpec parse_inline(const std::string& text);

    std::string describe() const;
};

/// Known names: riverswim, two-state-cycle, random-communicating, bandit.
/// Throws std::invalid_argument for unknown names or out-of-range parameters.
TabularMDP build_environment(const EnvironmentSpec& spec);

TabularMDP make_riverswim(std::size_t n, RewardKind kind = RewardKind::bernoulli_scaled,
                          double r_max = 1.0);
TabularMDP make_two_state_cycle();
TabularMDP make_random_communicating(std::size_t num_states, std::size_t num_actions,
                                     std::size_t gamma, std::uint64_t seed,
                                     RewardKind kind = RewardKind::bernoulli_scaled,
                                     double r_max = 1.0);
TabularMDP make_bandit(std::vector<double> means, RewardKind kind = RewardKind::bernoulli_scaled,
                       double r_max = 1.0);

} // namespace ucrlb
