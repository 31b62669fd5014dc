#pragma once

#include "ucrlb/mdp.hpp"
#include "ucrlb/statistics.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

namespace ucrlb {

/// The box [p_low, p_high] has no point on the simplex.
class InfeasibleSetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Span stopping below this value is not resolvable in double precision.
inline constexpr double min_evi_epsilon = 1e-12;

struct EviConfig {
    double alpha = 0.9;
    double epsilon = 1e-6;
    State reference_state = 0;
    std::uint64_t max_iterations = 1'000'000;
    /// Optional per-iteration trace: one `iteration span` line per sweep.
    std::ostream* trace = nullptr;
};

struct PlanResult {
    double gain = 0.0;
    std::vector<double> bias;
    Policy policy;
    std::uint64_t iterations = 0;
    double final_span = 0.0;
    /// False when max_iterations was hit; the other fields hold the last iterate.
    bool converged = true;
};

/// States sorted by nonincreasing value, ties by lowest index.
std::vector<State> descending_order(std::span<const double> v);

/// argmax p.v over {p in simplex : p_low <= p <= p_high}. Starts from p_low
/// and pours the remaining mass into states in nonincreasing order of v.
std::vector<double> inner_max_transition(std::span<const double> p_low, std::span<const double> p_high,
                                         std::span<const double> v);

/// Same, with the state order precomputed; writes into `out`.
void inner_max_transition(std::span<const double> p_low, std::span<const double> p_high,
                          std::span<const State> order, std::span<double> out);

/// argmax p.v over the L1 ball ||p - center||_1 <= radius intersected with the
/// simplex: move up to radius/2 mass onto the best state, then remove the
/// excess from the worst states.
void inner_max_l1(std::span<const double> center, double radius, std::span<const State> order,
                  std::span<double> out);

struct OperatorResult {
    std::vector<double> values;
    Policy greedy;
};

/// One sweep of the optimistic aperiodic Bellman operator
///   v'(s) = max_a { r_high(s,a) + alpha * max_p p.v } + (1 - alpha) v(s)
/// with ties between actions broken by lowest index.
OperatorResult apply_extended_operator(const ConfidenceSets& sets, std::span<const double> v,
                                       double alpha);

/// Relative value iteration on the extended operator from v = 0, shifting by
/// v(reference_state) each sweep and stopping once sp(v_{n+1} - v_n) <= epsilon.
/// The gain is the midpoint of the last increment's range.
PlanResult extended_value_iteration(const ConfidenceSets& sets, const EviConfig& config);

} // namespace ucrlb
