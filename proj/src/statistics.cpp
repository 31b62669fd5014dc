#include "ucrlb/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace ucrlb {

RunningStats::RunningStats(std::size_t num_states, std::size_t num_actions, double r_max)
    : num_states_(num_states),
      num_actions_(num_actions),
      r_max_(r_max),
      visits_(num_states * num_actions, 0),
      episode_visits_(num_states * num_actions, 0),
      transition_count_(num_states * num_actions * num_states, 0),
      reward_sum_(num_states * num_actions, 0.0),
      reward_sq_sum_(num_states * num_actions, 0.0),
      episode_reward_sq_sum_(num_states * num_actions, 0.0),
      p_hat_(num_states * num_actions * num_states, 0.0),
      r_hat_(num_states * num_actions, 0.0),
      var_r_(num_states * num_actions, 0.0) {
    if (num_states == 0 || num_actions == 0)
        throw std::invalid_argument("statistics need at least one state and one action");
}

void RunningStats::record_step(State s, Action a, double reward, State next) {
    if (s >= num_states_ || next >= num_states_ || a >= num_actions_)
        throw std::out_of_range("record_step: index out of range");
    if (!(reward >= 0.0 && reward <= r_max_))
        throw std::invalid_argument("record_step: reward " + std::to_string(reward) +
                                    " outside [0, r_max]");
    const auto i = index(s, a);
    ++episode_visits_[i];
    ++transition_count_[i * num_states_ + next];
    reward_sum_[i] += reward;
    reward_sq_sum_[i] += reward * reward;
    episode_reward_sq_sum_[i] += reward * reward;
    ++t_;
}

void RunningStats::finalize_episode() {
    for (std::size_t i = 0; i < visits_.size(); ++i) {
        const std::uint64_t nu = episode_visits_[i];
        if (nu == 0) continue;
        const std::uint64_t old_n = visits_[i];
        const std::uint64_t new_n = old_n + nu;
        const double old_mean = r_hat_[i];
        const double new_mean = reward_sum_[i] / static_cast<double>(new_n);

        // sigma2_{k+1} = S_k / N+_{k+1} + N_k / N+_{k+1} (sigma2_k + rhat_k^2) - rhat_{k+1}^2
        // where S_k is the sum of squared rewards collected during episode k.
        const double n_plus = static_cast<double>(std::max<std::uint64_t>(1, new_n));
        const double second_moment = episode_reward_sq_sum_[i] / n_plus +
                                     static_cast<double>(old_n) / n_plus *
                                         (var_r_[i] + old_mean * old_mean);
        var_r_[i] = std::max(0.0, second_moment - new_mean * new_mean);
        r_hat_[i] = new_mean;

        for (State next = 0; next < num_states_; ++next)
            p_hat_[i * num_states_ + next] =
                static_cast<double>(transition_count_[i * num_states_ + next]) /
                static_cast<double>(new_n);

        visits_[i] = new_n;
        episode_visits_[i] = 0;
        episode_reward_sq_sum_[i] = 0.0;
    }
    ++k_;
    t_k_ = t_;
}

// ---------------------------------------------------------------------------
// Radii

namespace {

void check_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
}

} // namespace

double bernstein_radius(double variance, std::uint64_t n, std::size_t num_states,
                        std::size_t num_actions, double delta, double scale) {
    check_delta(delta);
    const double n_plus = static_cast<double>(std::max<std::uint64_t>(1, n));
    const double log_term =
        std::log(6.0 * static_cast<double>(num_states * num_actions) * n_plus / delta);
    return 2.0 * std::sqrt(variance * log_term / n_plus) + 6.0 * scale * log_term / n_plus;
}

double bernstein_radius_p(const RunningStats& stats, State s, Action a, State next, double delta) {
    return bernstein_radius(stats.var_p(s, a, next), stats.visits(s, a), stats.num_states(),
                            stats.num_actions(), delta, 1.0);
}

double bernstein_radius_r(const RunningStats& stats, State s, Action a, double delta) {
    return bernstein_radius(stats.var_r(s, a), stats.visits(s, a), stats.num_states(),
                            stats.num_actions(), delta, stats.r_max());
}

double hoeffding_radius_r(std::uint64_t n, std::size_t num_states, std::size_t num_actions,
                          std::uint64_t t_k, double delta, double r_max) {
    check_delta(delta);
    const double n_plus = static_cast<double>(std::max<std::uint64_t>(1, n));
    const double log_term = std::log(2.0 * static_cast<double>(num_states * num_actions) *
                                     static_cast<double>(t_k) / delta);
    return r_max * std::sqrt(7.0 * log_term / (2.0 * n_plus));
}

double hoeffding_radius_l1(std::uint64_t n, std::size_t num_states, std::size_t num_actions,
                           std::uint64_t t_k, double delta) {
    check_delta(delta);
    const double n_plus = static_cast<double>(std::max<std::uint64_t>(1, n));
    const double log_term =
        std::log(2.0 * static_cast<double>(num_actions) * static_cast<double>(t_k) / delta);
    return std::sqrt(14.0 * static_cast<double>(num_states) * log_term / n_plus);
}

std::string to_string(SetOverride value) {
    switch (value) {
    case SetOverride::zero_width: return "zero-width";
    case SetOverride::vacuous: return "vacuous";
    default: return "none";
    }
}

SetOverride parse_set_override(const std::string& text) {
    if (text == "none") return SetOverride::none;
    if (text == "zero-width") return SetOverride::zero_width;
    if (text == "vacuous") return SetOverride::vacuous;
    throw std::invalid_argument("unknown set override '" + text + "'");
}

// ---------------------------------------------------------------------------
// Sets

namespace {

ConfidenceSets empty_sets(std::size_t S, std::size_t A, double r_max, ConfidenceSets::Shape shape) {
    ConfidenceSets sets;
    sets.num_states = S;
    sets.num_actions = A;
    sets.r_max = r_max;
    sets.shape = shape;
    sets.r_low.assign(S * A, 0.0);
    sets.r_high.assign(S * A, r_max);
    sets.beta_r.assign(S * A, 0.0);
    if (shape == ConfidenceSets::Shape::box) {
        sets.p_low.assign(S * A * S, 0.0);
        sets.p_high.assign(S * A * S, 1.0);
        sets.beta_p.assign(S * A * S, 0.0);
    } else {
        sets.p_center.assign(S * A * S, 0.0);
        sets.l1_radius.assign(S * A, 2.0);
    }
    return sets;
}

constexpr double unbounded = std::numeric_limits<double>::infinity();

} // namespace

ConfidenceSets ConfidenceSets::point(const TabularMDP& mdp) {
    const std::size_t S = mdp.num_states();
    const std::size_t A = mdp.num_actions();
    ConfidenceSets sets = empty_sets(S, A, mdp.r_max(), Shape::box);
    sets.r_low = mdp.reward_matrix();
    sets.r_high = mdp.reward_matrix();
    sets.p_low = mdp.transition_tensor();
    sets.p_high = mdp.transition_tensor();
    return sets;
}

ConfidenceSets ConfidenceSets::vacuous(std::size_t num_states, std::size_t num_actions, double r_max) {
    return empty_sets(num_states, num_actions, r_max, Shape::box);
}

bool ConfidenceSets::contains(const TabularMDP& mdp) const {
    if (mdp.num_states() != num_states || mdp.num_actions() != num_actions) return false;
    for (State s = 0; s < num_states; ++s) {
        for (Action a = 0; a < num_actions; ++a) {
            const double r = mdp.reward_mean(s, a);
            if (r < r_low[sa(s, a)] || r > r_high[sa(s, a)]) return false;
            if (shape == Shape::box) {
                for (State next = 0; next < num_states; ++next) {
                    const double p = mdp.transition(s, a, next);
                    if (p < p_low[sas(s, a, next)] || p > p_high[sas(s, a, next)]) return false;
                }
            } else {
                double distance = 0.0;
                for (State next = 0; next < num_states; ++next)
                    distance += std::abs(mdp.transition(s, a, next) - p_center[sas(s, a, next)]);
                if (distance > l1_radius[sa(s, a)]) return false;
            }
        }
    }
    return true;
}

ConfidenceSets build_confidence_sets(const RunningStats& stats, double delta, SetOverride override) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
    const std::size_t S = stats.num_states();
    const std::size_t A = stats.num_actions();
    const double r_max = stats.r_max();
    ConfidenceSets sets = empty_sets(S, A, r_max, ConfidenceSets::Shape::box);
    sets.delta = delta;
    if (override == SetOverride::vacuous) return sets;

    for (State s = 0; s < S; ++s) {
        for (Action a = 0; a < A; ++a) {
            const std::size_t i = sets.sa(s, a);
            const bool visited = stats.visits(s, a) > 0;
            double beta_r = bernstein_radius_r(stats, s, a, delta);
            if (override == SetOverride::zero_width) beta_r = visited ? 0.0 : unbounded;
            const double r_hat = stats.r_hat(s, a);
            sets.beta_r[i] = beta_r;
            sets.r_low[i] = std::clamp(r_hat - beta_r, 0.0, r_max);
            sets.r_high[i] = std::clamp(r_hat + beta_r, 0.0, r_max);

            for (State next = 0; next < S; ++next) {
                const std::size_t j = sets.sas(s, a, next);
                double beta_p = bernstein_radius_p(stats, s, a, next, delta);
                if (override == SetOverride::zero_width) beta_p = visited ? 0.0 : unbounded;
                const double p_hat = stats.p_hat(s, a, next);
                sets.beta_p[j] = beta_p;
                sets.p_low[j] = std::clamp(p_hat - beta_p, 0.0, 1.0);
                sets.p_high[j] = std::clamp(p_hat + beta_p, 0.0, 1.0);
            }
        }
    }
    return sets;
}

ConfidenceSets build_hoeffding_sets(const RunningStats& stats, double delta, SetOverride override) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
    const std::size_t S = stats.num_states();
    const std::size_t A = stats.num_actions();
    const double r_max = stats.r_max();
    if (override == SetOverride::vacuous) {
        ConfidenceSets sets = ConfidenceSets::vacuous(S, A, r_max);
        sets.delta = delta;
        return sets;
    }
    ConfidenceSets sets = empty_sets(S, A, r_max, ConfidenceSets::Shape::l1_ball);
    sets.delta = delta;
    const std::uint64_t t_k = stats.episode_start();

    for (State s = 0; s < S; ++s) {
        for (Action a = 0; a < A; ++a) {
            const std::size_t i = sets.sa(s, a);
            const std::uint64_t n = stats.visits(s, a);
            double beta_r = hoeffding_radius_r(n, S, A, t_k, delta, r_max);
            double radius = hoeffding_radius_l1(n, S, A, t_k, delta);
            if (override == SetOverride::zero_width) {
                beta_r = n > 0 ? 0.0 : unbounded;
                radius = n > 0 ? 0.0 : 2.0;
            }
            // An unvisited row has p_hat = 0, so only a radius of at least 2
            // makes every distribution plausible.
            if (n == 0) radius = std::max(radius, 2.0);
            const double r_hat = stats.r_hat(s, a);
            sets.beta_r[i] = beta_r;
            sets.r_low[i] = std::clamp(r_hat - beta_r, 0.0, r_max);
            sets.r_high[i] = std::clamp(r_hat + beta_r, 0.0, r_max);
            sets.l1_radius[i] = radius;
            for (State next = 0; next < S; ++next)
                sets.p_center[sets.sas(s, a, next)] = stats.p_hat(s, a, next);
        }
    }
    return sets;
}

void write_debug_dump_header(std::ostream& out) {
    out << "episode s a s_next N p_hat beta_p r_hat beta_r\n";
}

void write_debug_dump(std::ostream& out, const RunningStats& stats, const ConfidenceSets& sets) {
    const auto precision = out.precision(17);
    for (State s = 0; s < sets.num_states; ++s) {
        for (Action a = 0; a < sets.num_actions; ++a) {
            for (State next = 0; next < sets.num_states; ++next) {
                const double beta_p = sets.shape == ConfidenceSets::Shape::box
                                          ? sets.beta_p[sets.sas(s, a, next)]
                                          : sets.l1_radius[sets.sa(s, a)];
                out << stats.episode() << ' ' << s << ' ' << a << ' ' << next << ' '
                    << stats.visits(s, a) << ' ' << stats.p_hat(s, a, next) << ' ' << beta_p << ' '
                    << stats.r_hat(s, a) << ' ' << sets.beta_r[sets.sa(s, a)] << '\n';
            }
        }
    }
    out.precision(precision);
}

} // namespace ucrlb
