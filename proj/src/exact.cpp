#include "ucrlb/exact.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace ucrlb {

double span(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("span of an empty vector");
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
}

namespace {

double expected_value(std::span<const double> row, std::span<const double> v) {
    double total = 0.0;
    for (std::size_t x = 0; x < row.size(); ++x) total += row[x] * v[x];
    return total;
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
}

} // namespace

GainBias solve_gain_bias(const TabularMDP& mdp, double tol, double alpha, std::uint64_t max_iterations) {
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    check_alpha(alpha);
    const std::size_t S = mdp.num_states();
    const std::size_t A = mdp.num_actions();

    std::vector<double> v(S, 0.0);
    std::vector<double> next(S);
    std::vector<double> increment(S);
    std::vector<Action> greedy(S, 0);

    for (std::uint64_t iteration = 1;; ++iteration) {
        for (State s = 0; s < S; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            for (Action a = 0; a < A; ++a) {
                const double q = mdp.reward_mean(s, a) + alpha * expected_value(mdp.row(s, a), v);
                if (q > best) {
                    best = q;
                    greedy[s] = a;
                }
            }
            next[s] = best + (1.0 - alpha) * v[s];
            increment[s] = next[s] - v[s];
        }
        if (span(increment) <= tol) {
            const auto [lo, hi] = std::minmax_element(increment.begin(), increment.end());
            GainBias result;
            result.gain = 0.5 * (*lo + *hi);
            result.bias.resize(S);
            for (State s = 0; s < S; ++s) result.bias[s] = alpha * (v[s] - v[0]);
            result.policy = Policy::deterministic(greedy);
            result.iterations = iteration;
            return result;
        }
        if (iteration >= max_iterations)
            throw ConvergenceError("relative value iteration did not converge");
        for (State s = 0; s < S; ++s) v[s] = next[s] - next[0];
    }
}

std::vector<double> hitting_times(const TabularMDP& mdp, State target, double tol, double alpha,
                                  std::uint64_t max_iterations) {
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    check_alpha(alpha);
    const std::size_t S = mdp.num_states();
    if (target >= S) throw std::out_of_range("target state out of range");
    if (!is_communicating(mdp))
        throw ConvergenceError("hitting times diverge: MDP is not communicating");

    std::vector<double> h(S, 0.0);
    std::vector<double> backup(S, 0.0);
    for (std::uint64_t iteration = 1;; ++iteration) {
        double residual = 0.0;
        for (State s = 0; s < S; ++s) {
            if (s == target) {
                backup[s] = 0.0;
                continue;
            }
            double best = std::numeric_limits<double>::infinity();
            for (Action a = 0; a < mdp.num_actions(); ++a)
                best = std::min(best, expected_value(mdp.row(s, a), h));
            backup[s] = 1.0 + best;
            residual = std::max(residual, std::abs(backup[s] - h[s]));
        }
        for (State s = 0; s < S; ++s) h[s] = alpha * backup[s] + (1.0 - alpha) * h[s];

        // Iterates increase monotonically from 0; the remaining error is at
        // most the residual times the expected number of steps to the target.
        const double horizon = *std::max_element(h.begin(), h.end()) + 1.0;
        if (residual * 2.0 * horizon <= tol) return h;
        if (iteration >= max_iterations || !std::isfinite(horizon))
            throw ConvergenceError("hitting-time iteration did not converge");
    }
}

double diameter(const TabularMDP& mdp, double tol, double alpha, std::uint64_t max_iterations) {
    const std::size_t S = mdp.num_states();
    if (S == 1) return 0.0;
    double result = 0.0;
    for (State target = 0; target < S; ++target) {
        const auto h = hitting_times(mdp, target, tol, alpha, max_iterations);
        for (State s = 0; s < S; ++s)
            if (s != target) result = std::max(result, h[s]);
    }
    return result;
}

double policy_gain(const TabularMDP& mdp, const Policy& policy, double tol, double alpha,
                   std::uint64_t max_iterations) {
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    check_alpha(alpha);
    const std::size_t S = mdp.num_states();
    const std::size_t A = mdp.num_actions();
    validate_policy(policy, S, A);

    std::vector<double> v(S, 0.0);
    std::vector<double> increment(S);
    std::vector<double> next(S);
    double previous_gap = std::numeric_limits<double>::infinity();
    int stalled = 0;

    for (std::uint64_t iteration = 1;; ++iteration) {
        for (State s = 0; s < S; ++s) {
            double value = 0.0;
            for (Action a = 0; a < A; ++a) {
                const double w = policy.probability(s, a);
                if (w == 0.0) continue;
                value += w * (mdp.reward_mean(s, a) + alpha * expected_value(mdp.row(s, a), v));
            }
            next[s] = value + (1.0 - alpha) * v[s];
            increment[s] = next[s] - v[s];
        }
        const double gap = span(increment);
        if (gap <= tol) {
            const auto [lo, hi] = std::minmax_element(increment.begin(), increment.end());
            return 0.5 * (*lo + *hi);
        }
        // A multichain policy has state-dependent gain: the increments settle
        // at a nonconstant vector and the span stops shrinking.
        stalled = std::abs(gap - previous_gap) <= 1e-15 * std::max(1.0, gap) ? stalled + 1 : 0;
        if (stalled >= 100)
            throw ConvergenceError("policy gain is not constant across states (multichain policy)");
        if (iteration >= max_iterations) throw ConvergenceError("policy evaluation did not converge");
        previous_gap = gap;
        for (State s = 0; s < S; ++s) v[s] = next[s] - next[0];
    }
}

GroundTruth compute_ground_truth(const TabularMDP& mdp, double tol) {
    GroundTruth truth;
    const GainBias solution = solve_gain_bias(mdp, tol);
    truth.g_star = solution.gain;
    truth.h_star = solution.bias;
    truth.span_h = span(solution.bias);
    truth.diameter = diameter(mdp, tol);
    truth.gamma_profile = support_profile(mdp);
    truth.optimal_policy = solution.policy;
    return truth;
}

std::string to_json(const GroundTruth& truth) {
    nlohmann::ordered_json out;
    out["g_star"] = truth.g_star;
    out["h_star"] = truth.h_star;
    out["span_h"] = truth.span_h;
    out["diameter"] = truth.diameter;
    out["gamma"] = truth.gamma_profile.gamma;
    out["gamma_max"] = truth.gamma_profile.gamma_max;
    out["optimal_policy"] = truth.optimal_policy.actions();
    return out.dump(2) + "\n";
}

GroundTruth ground_truth_from_json(const std::string& text) {
    const auto in = nlohmann::json::parse(text);
    GroundTruth truth;
    truth.g_star = in.at("g_star").get<double>();
    truth.h_star = in.at("h_star").get<std::vector<double>>();
    truth.span_h = in.at("span_h").get<double>();
    truth.diameter = in.at("diameter").get<double>();
    truth.gamma_profile.gamma = in.at("gamma").get<std::vector<std::size_t>>();
    truth.gamma_profile.gamma_max = in.at("gamma_max").get<std::size_t>();
    truth.optimal_policy = Policy::deterministic(in.at("optimal_policy").get<std::vector<Action>>());
    return truth;
}

} // namespace ucrlb
