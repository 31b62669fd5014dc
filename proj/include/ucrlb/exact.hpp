#pragma once

#include "ucrlb/mdp.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ucrlb {

/// An iterative solver hit its iteration cap or detected a structure it
/// cannot handle (non-communicating MDP, multichain policy).
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// max(v) - min(v). Throws std::invalid_argument on an empty vector.
double span(std::span<const double> v);

struct GainBias {
    double gain = 0.0;
    std::vector<double> bias; // h(0) = 0
    Policy policy;
    std::uint64_t iterations = 0;
};

/// Optimal gain and bias of a known MDP by relative value iteration on the
/// aperiodic transform alpha * L + (1 - alpha) * I. The gain is within tol/2
/// of g*. The bias is rescaled back to the untransformed optimality equation
/// and normalized at state 0.
GainBias solve_gain_bias(const TabularMDP& mdp, double tol, double alpha = 0.9,
                         std::uint64_t max_iterations = 10'000'000);

/// Largest minimal expected hitting time over ordered pairs of distinct
/// states. Each target is solved by (optionally damped) value iteration on
///   h(s) = 1 + min_a sum_x p(x|s,a) h(x),  h(target) = 0.
/// A single-state MDP has diameter 0.
double diameter(const TabularMDP& mdp, double tol, double alpha = 1.0,
                std::uint64_t max_iterations = 10'000'000);

/// Minimal expected hitting times into `target` from every state.
std::vector<double> hitting_times(const TabularMDP& mdp, State target, double tol, double alpha = 1.0,
                                  std::uint64_t max_iterations = 10'000'000);

/// Gain of a (deterministic or stochastic) stationary policy, assuming the
/// induced chain is unichain. Throws ConvergenceError when it is not.
double policy_gain(const TabularMDP& mdp, const Policy& policy, double tol, double alpha = 0.9,
                   std::uint64_t max_iterations = 10'000'000);

struct GroundTruth {
    double g_star = 0.0;
    std::vector<double> h_star;
    double span_h = 0.0;
    double diameter = 0.0;
    SupportProfile gamma_profile;
    Policy optimal_policy;
};

GroundTruth compute_ground_truth(const TabularMDP& mdp, double tol = 1e-10);

std::string to_json(const GroundTruth& truth);
GroundTruth ground_truth_from_json(const std::string& text);

} // namespace ucrlb
