#include "ucrlb/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ucrlb {

std::string to_string(RewardKind kind) {
    return kind == RewardKind::deterministic ? "deterministic" : "bernoulli";
}

RewardKind parse_reward_kind(const std::string& text) {
    if (text == "bernoulli" || text == "bernoulli-scaled") return RewardKind::bernoulli_scaled;
    if (text == "deterministic") return RewardKind::deterministic;
    throw std::invalid_argument("unknown reward kind '" + text + "'");
}

TabularMDP::TabularMDP(std::size_t num_states, std::size_t num_actions, std::vector<double> transition,
                       std::vector<double> reward_mean, RewardKind reward_kind, double r_max)
    : num_states_(num_states),
      num_actions_(num_actions),
      transition_(std::move(transition)),
      reward_mean_(std::move(reward_mean)),
      reward_kind_(reward_kind),
      r_max_(r_max) {
    if (num_states_ == 0 || num_actions_ == 0)
        throw std::invalid_argument("MDP needs at least one state and one action");
    if (transition_.size() != num_states_ * num_actions_ * num_states_)
        throw std::invalid_argument("transition tensor has wrong size");
    if (reward_mean_.size() != num_states_ * num_actions_)
        throw std::invalid_argument("reward matrix has wrong size");
    if (!(r_max_ > 0.0)) throw std::invalid_argument("r_max must be positive");
}

// ---------------------------------------------------------------------------
// Policy

Policy Policy::deterministic(std::vector<Action> actions) {
    Policy policy;
    policy.kind_ = Kind::deterministic;
    policy.actions_ = std::move(actions);
    return policy;
}

Policy Policy::stochastic(std::size_t num_actions, std::vector<double> probabilities) {
    if (num_actions == 0 || probabilities.size() % num_actions != 0)
        throw std::invalid_argument("stochastic policy table has wrong size");
    Policy policy;
    policy.kind_ = Kind::stochastic;
    policy.num_actions_ = num_actions;
    policy.probabilities_ = std::move(probabilities);
    return policy;
}

std::size_t Policy::num_states() const {
    return kind_ == Kind::deterministic ? actions_.size() : probabilities_.size() / num_actions_;
}

Action Policy::action(State s) const {
    if (kind_ != Kind::deterministic)
        throw std::logic_error("action() requires a deterministic policy");
    return actions_.at(s);
}

double Policy::probability(State s, Action a) const {
    if (kind_ == Kind::deterministic) return actions_.at(s) == a ? 1.0 : 0.0;
    return probabilities_.at(s * num_actions_ + a);
}

Action Policy::select(State s, RandomStream& rng) const {
    if (kind_ == Kind::deterministic) return actions_.at(s);
    const double u = rng.uniform();
    double cumulative = 0.0;
    Action last_positive = 0;
    for (Action a = 0; a < num_actions_; ++a) {
        const double p = probabilities_[s * num_actions_ + a];
        if (p <= 0.0) continue;
        cumulative += p;
        last_positive = a;
        if (u < cumulative) return a;
    }
    return last_positive;
}

void validate_policy(const Policy& policy, std::size_t num_states, std::size_t num_actions) {
    if (policy.num_states() != num_states)
        throw std::invalid_argument("policy covers " + std::to_string(policy.num_states()) +
                                    " states, MDP has " + std::to_string(num_states));
    if (policy.kind() == Policy::Kind::deterministic) {
        for (State s = 0; s < num_states; ++s)
            if (policy.actions()[s] >= num_actions)
                throw std::invalid_argument("policy action out of range at state " +
                                            std::to_string(s));
        return;
    }
    if (policy.probabilities().size() != num_states * num_actions)
        throw std::invalid_argument("stochastic policy has wrong action count");
    for (State s = 0; s < num_states; ++s) {
        double total = 0.0;
        for (Action a = 0; a < num_actions; ++a) {
            const double p = policy.probability(s, a);
            if (p < 0.0 || p > 1.0)
                throw std::invalid_argument("policy probability out of [0,1]");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw std::invalid_argument("policy row does not sum to 1 at state " +
                                        std::to_string(s));
    }
}

// ---------------------------------------------------------------------------
// Validation and structure

ValidationReport validate_mdp(const TabularMDP& mdp) {
    ValidationReport report;
    const std::size_t S = mdp.num_states();
    const std::size_t A = mdp.num_actions();
    for (State s = 0; s < S; ++s) {
        for (Action a = 0; a < A; ++a) {
            double total = 0.0;
            for (State next = 0; next < S; ++next) {
                const double p = mdp.transition(s, a, next);
                if (!(p >= 0.0 && p <= 1.0))
                    report.violations.push_back({Violation::Kind::transition_range, s, a, p});
                total += p;
            }
            if (!(std::abs(total - 1.0) <= 1e-12))
                report.violations.push_back({Violation::Kind::row_sum, s, a, total});
            const double r = mdp.reward_mean(s, a);
            if (!(r >= 0.0 && r <= mdp.r_max()))
                report.violations.push_back({Violation::Kind::reward_range, s, a, r});
        }
    }
    report.ok = report.violations.empty();
    return report;
}

SupportProfile support_profile(const TabularMDP& mdp) {
    SupportProfile profile;
    const std::size_t S = mdp.num_states();
    const std::size_t A = mdp.num_actions();
    profile.gamma.resize(S * A);
    for (State s = 0; s < S; ++s) {
        for (Action a = 0; a < A; ++a) {
            const auto row = mdp.row(s, a);
            const auto count = static_cast<std::size_t>(
                std::count_if(row.begin(), row.end(), [](double p) { return p > 0.0; }));
            profile.gamma[s * A + a] = count;
            profile.gamma_max = std::max(profile.gamma_max, count);
        }
    }
    return profile;
}

namespace {

std::vector<bool> reachable_from(const TabularMDP& mdp, State start, bool reversed) {
    const std::size_t S = mdp.num_states();
    std::vector<bool> seen(S, false);
    std::vector<State> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
        const State u = stack.back();
        stack.pop_back();
        for (State w = 0; w < S; ++w) {
            if (seen[w]) continue;
            bool edge = false;
            for (Action a = 0; a < mdp.num_actions() && !edge; ++a)
                edge = reversed ? mdp.transition(w, a, u) > 0.0 : mdp.transition(u, a, w) > 0.0;
            if (edge) {
                seen[w] = true;
                stack.push_back(w);
            }
        }
    }
    return seen;
}

} // namespace

bool is_communicating(const TabularMDP& mdp) {
    const auto forward = reachable_from(mdp, 0, false);
    const auto backward = reachable_from(mdp, 0, true);
    return std::all_of(forward.begin(), forward.end(), [](bool b) { return b; }) &&
           std::all_of(backward.begin(), backward.end(), [](bool b) { return b; });
}

StepResult step(const TabularMDP& mdp, State s, Action a, RandomStream& rng) {
    if (s >= mdp.num_states()) throw std::out_of_range("state index out of range");
    if (a >= mdp.num_actions()) throw std::out_of_range("action index out of range");

    const auto row = mdp.row(s, a);
    const double u = rng.uniform();
    double cumulative = 0.0;
    State next = 0;
    for (State x = 0; x < row.size(); ++x) {
        if (row[x] <= 0.0) continue;
        cumulative += row[x];
        next = x;
        if (u < cumulative) break;
    }

    const double mean = mdp.reward_mean(s, a);
    const double v = rng.uniform();
    double reward = mean;
    if (mdp.reward_kind() == RewardKind::bernoulli_scaled)
        reward = v < mean / mdp.r_max() ? mdp.r_max() : 0.0;
    return {reward, next};
}

// ---------------------------------------------------------------------------
// Environments

TabularMDP make_riverswim(std::size_t n, RewardKind kind, double r_max) {
    if (n < 2) throw std::invalid_argument("riverswim needs n >= 2");
    constexpr Action left = 0;
    constexpr Action right = 1;
    std::vector<double> p(n * 2 * n, 0.0);
    std::vector<double> r(n * 2, 0.0);
    auto at = [&](State s, Action a, State next) -> double& { return p[(s * 2 + a) * n + next]; };

    for (State s = 0; s < n; ++s) {
        at(s, left, s == 0 ? 0 : s - 1) = 1.0;
        if (s == 0) {
            at(s, right, 0) = 0.4;
            at(s, right, 1) = 0.6;
        } else if (s == n - 1) {
            at(s, right, s - 1) = 0.4;
            at(s, right, s) = 0.6;
        } else {
            at(s, right, s - 1) = 0.05;
            at(s, right, s) = 0.6;
            at(s, right, s + 1) = 0.35;
        }
    }
    r[0 * 2 + left] = 0.005 * r_max;
    r[(n - 1) * 2 + right] = r_max;
    return TabularMDP(n, 2, std::move(p), std::move(r), kind, r_max);
}

TabularMDP make_two_state_cycle() {
    return TabularMDP(2, 1, {0.0, 1.0, 1.0, 0.0}, {0.0, 1.0}, RewardKind::deterministic, 1.0);
}

TabularMDP make_random_communicating(std::size_t num_states, std::size_t num_actions,
                                     std::size_t gamma, std::uint64_t seed, RewardKind kind,
                                     double r_max) {
    const std::size_t S = num_states;
    const std::size_t A = num_actions;
    if (S < 1 || A < 1) throw std::invalid_argument("random-communicating needs S, A >= 1");
    if (gamma < 1 || gamma > S) throw std::invalid_argument("random-communicating needs 1 <= gamma <= S");

    RandomStream rng(seed);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        // A random Hamiltonian cycle carried by action 0 makes every draw
        // communicating; the reachability check below still guards it.
        std::vector<State> order(S);
        std::iota(order.begin(), order.end(), State{0});
        for (std::size_t i = S; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        std::vector<State> successor(S);
        for (std::size_t i = 0; i < S; ++i) successor[order[i]] = order[(i + 1) % S];

        std::vector<double> p(S * A * S, 0.0);
        std::vector<double> r(S * A, 0.0);
        for (State s = 0; s < S; ++s) {
            for (Action a = 0; a < A; ++a) {
                std::vector<State> pool(S);
                std::iota(pool.begin(), pool.end(), State{0});
                std::size_t chosen = 0;
                if (a == 0) {
                    std::swap(pool[0], pool[successor[s]]);
                    chosen = 1;
                }
                for (; chosen < gamma; ++chosen)
                    std::swap(pool[chosen], pool[chosen + rng.below(S - chosen)]);

                std::vector<double> weights(gamma);
                double total = 0.0;
                for (auto& w : weights) {
                    w = -std::log(1.0 - rng.uniform());
                    w = std::max(w, 1e-6);
                    total += w;
                }
                for (std::size_t i = 0; i < gamma; ++i)
                    p[(s * A + a) * S + pool[i]] = weights[i] / total;
                r[s * A + a] = rng.uniform() * r_max;
            }
        }
        TabularMDP mdp(S, A, std::move(p), std::move(r), kind, r_max);
        if (is_communicating(mdp) && validate_mdp(mdp).ok) return mdp;
    }
    throw std::runtime_error("could not draw a communicating MDP");
}

TabularMDP make_bandit(std::vector<double> means, RewardKind kind, double r_max) {
    if (means.empty()) throw std::invalid_argument("bandit needs at least one arm");
    const std::size_t A = means.size();
    for (double m : means)
        if (!(m >= 0.0 && m <= r_max)) throw std::invalid_argument("bandit mean outside [0, r_max]");
    return TabularMDP(1, A, std::vector<double>(A, 1.0), std::move(means), kind, r_max);
}

// ---------------------------------------------------------------------------
// Specs

namespace {

std::size_t param_uint(const EnvironmentSpec& spec, const std::string& key) {
    const auto it = spec.params.find(key);
    if (it == spec.params.end())
        throw std::invalid_argument(spec.name + ": missing parameter '" + key + "'");
    try {
        std::size_t used = 0;
        const long long value = std::stoll(it->second, &used);
        if (used != it->second.size() || value < 0) throw std::invalid_argument("");
        return static_cast<std::size_t>(value);
    } catch (const std::exception&) {
        throw std::invalid_argument(spec.name + ": parameter '" + key +
                                    "' must be a nonnegative integer");
    }
}

std::size_t param_uint(const EnvironmentSpec& spec, const std::string& key, std::size_t fallback) {
    return spec.params.count(key) ? param_uint(spec, key) : fallback;
}

} // namespace

EnvironmentSpec EnvironmentSpec::from_config(const KeyValueConfig& config) {
    EnvironmentSpec spec;
    spec.name = config.get_string("env.name");
    spec.params = config.with_prefix("env.params.");
    spec.seed = config.get_uint("env.seed", 0);
    try {
        spec.reward_kind = parse_reward_kind(config.get_string("env.reward_kind", "bernoulli"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError("env.reward_kind", config.line_of("env.reward_kind"), e.what());
    }
    spec.r_max = config.get_double("env.r_max", 1.0);
    if (!(spec.r_max > 0.0))
        throw ConfigError("env.r_max", config.line_of("env.r_max"), "r_max must be positive");
    return spec;
}

EnvironmentSpec EnvironmentSpec::parse_inline(const std::string& text) {
    EnvironmentSpec spec;
    const auto colon = text.find(':');
    spec.name = trim(text.substr(0, colon));
    if (colon != std::string::npos) {
        // `means` is itself a list, so parameters are separated by ';' or ','
        // and a value continues until the next `key=`.
        std::string body = text.substr(colon + 1);
        std::replace(body.begin(), body.end(), ';', ',');
        std::string current_key;
        for (const auto& item : split_list(body)) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) {
                if (current_key.empty()) throw std::invalid_argument("bad environment parameter '" + item + "'");
                spec.params[current_key] += "," + item;
                continue;
            }
            current_key = trim(item.substr(0, eq));
            spec.params[current_key] = trim(item.substr(eq + 1));
        }
    }
    if (auto it = spec.params.find("seed"); it != spec.params.end()) {
        spec.seed = std::stoull(it->second);
        spec.params.erase(it);
    }
    if (auto it = spec.params.find("reward_kind"); it != spec.params.end()) {
        spec.reward_kind = parse_reward_kind(it->second);
        spec.params.erase(it);
    }
    if (auto it = spec.params.find("r_max"); it != spec.params.end()) {
        spec.r_max = std::stod(it->second);
        spec.params.erase(it);
    }
    return spec;
}

std::string EnvironmentSpec::describe() const {
    std::ostringstream out;
    out << name;
    char sep = ':';
    for (const auto& [key, value] : params) {
        out << sep << key << '=' << value;
        sep = ';';
    }
    out << sep << "seed=" << seed << ";reward_kind=" << to_string(reward_kind)
        << ";r_max=" << r_max;
    return out.str();
}

TabularMDP build_environment(const EnvironmentSpec& spec) {
    if (spec.name == "riverswim")
        return make_riverswim(param_uint(spec, "n", 6), spec.reward_kind, spec.r_max);
    if (spec.name == "two-state-cycle") return make_two_state_cycle();
    if (spec.name == "random-communicating") {
        const std::size_t S = param_uint(spec, "S");
        const std::size_t A = param_uint(spec, "A");
        const std::size_t gamma = param_uint(spec, "gamma", S);
        if (S < 1 || A < 1) throw std::invalid_argument("random-communicating: S and A must be positive");
        if (gamma < 1 || gamma > S) throw std::invalid_argument("random-communicating: need 1 <= gamma <= S");
        return make_random_communicating(S, A, gamma, spec.seed, spec.reward_kind, spec.r_max);
    }
    if (spec.name == "bandit") {
        std::vector<double> means;
        if (const auto it = spec.params.find("means"); it != spec.params.end()) {
            for (const auto& item : split_list(it->second)) means.push_back(std::stod(item));
            if (spec.params.count("A") && param_uint(spec, "A") != means.size())
                throw std::invalid_argument("bandit: A disagrees with the number of means");
        } else {
            const std::size_t A = param_uint(spec, "A");
            if (A < 1) throw std::invalid_argument("bandit: A must be positive");
            for (std::size_t a = 0; a < A; ++a)
                means.push_back(spec.r_max * static_cast<double>(a + 1) / static_cast<double>(A + 1));
        }
        return make_bandit(std::move(means), spec.reward_kind, spec.r_max);
    }
    throw std::invalid_argument("unknown environment '" + spec.name + "'");
}

} // namespace ucrlb
