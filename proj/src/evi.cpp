#include "ucrlb/evi.hpp"

#include "ucrlb/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace ucrlb {

namespace {

constexpr double feasibility_slack = 1e-10;

} // namespace

std::vector<State> descending_order(std::span<const double> v) {
    std::vector<State> order(v.size());
    std::iota(order.begin(), order.end(), State{0});
    std::stable_sort(order.begin(), order.end(), [&](State x, State y) { return v[x] > v[y]; });
    return order;
}

void inner_max_transition(std::span<const double> p_low, std::span<const double> p_high,
                          std::span<const State> order, std::span<double> out) {
    const std::size_t n = p_low.size();
    double low_total = 0.0;
    double high_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(p_low[i] <= p_high[i] + feasibility_slack))
            throw InfeasibleSetError("transition box has p_low > p_high");
        low_total += p_low[i];
        high_total += p_high[i];
        out[i] = p_low[i];
    }
    if (low_total > 1.0 + feasibility_slack || high_total < 1.0 - feasibility_slack)
        throw InfeasibleSetError("transition box does not intersect the simplex");

    double remaining = 1.0 - low_total;
    for (const State x : order) {
        if (remaining <= 0.0) break;
        const double add = std::min(remaining, p_high[x] - p_low[x]);
        if (add <= 0.0) continue;
        // Land exactly on the upper bound when the interval is filled.
        out[x] = add == p_high[x] - p_low[x] ? p_high[x] : out[x] + add;
        remaining -= add;
    }
}

std::vector<double> inner_max_transition(std::span<const double> p_low, std::span<const double> p_high,
                                         std::span<const double> v) {
    if (p_low.size() != p_high.size() || p_low.size() != v.size())
        throw std::invalid_argument("inner_max_transition: size mismatch");
    std::vector<double> out(v.size());
    const auto order = descending_order(v);
    inner_max_transition(p_low, p_high, order, out);
    return out;
}

void inner_max_l1(std::span<const double> center, double radius, std::span<const State> order,
                  std::span<double> out) {
    std::copy(center.begin(), center.end(), out.begin());
    if (order.empty()) return;
    const State best = order.front();
    out[best] = std::min(1.0, center[best] + radius / 2.0);

    double total = std::accumulate(out.begin(), out.end(), 0.0);
    for (std::size_t k = order.size(); k-- > 1 && total > 1.0;) {
        const State worst = order[k];
        const double others = total - out[worst];
        const double kept = std::max(0.0, 1.0 - others);
        total = others + kept;
        out[worst] = kept;
    }
}

OperatorResult apply_extended_operator(const ConfidenceSets& sets, std::span<const double> v,
                                       double alpha) {
    const std::size_t S = sets.num_states;
    const std::size_t A = sets.num_actions;
    if (v.size() != S) throw std::invalid_argument("value vector has wrong size");

    const auto order = descending_order(v);
    std::vector<double> row(S);
    std::vector<double> values(S);
    std::vector<Action> greedy(S, 0);

    for (State s = 0; s < S; ++s) {
        double best = -std::numeric_limits<double>::infinity();
        for (Action a = 0; a < A; ++a) {
            const std::size_t base = sets.sas(s, a, 0);
            if (sets.shape == ConfidenceSets::Shape::box) {
                inner_max_transition(std::span<const double>(sets.p_low).subspan(base, S),
                                     std::span<const double>(sets.p_high).subspan(base, S), order,
                                     row);
            } else {
                inner_max_l1(std::span<const double>(sets.p_center).subspan(base, S),
                             sets.l1_radius[sets.sa(s, a)], order, row);
            }
            double expected = 0.0;
            for (State x = 0; x < S; ++x) expected += row[x] * v[x];
            const double q = sets.r_high[sets.sa(s, a)] + alpha * expected;
            if (q > best) {
                best = q;
                greedy[s] = a;
            }
        }
        values[s] = best + (1.0 - alpha) * v[s];
    }
    return {std::move(values), Policy::deterministic(std::move(greedy))};
}

PlanResult extended_value_iteration(const ConfidenceSets& sets, const EviConfig& config) {
    if (!(config.alpha > 0.0 && config.alpha <= 1.0))
        throw std::invalid_argument("EVI alpha must lie in (0, 1]");
    if (!(config.epsilon > 0.0)) throw std::invalid_argument("EVI epsilon must be positive");
    if (config.reference_state >= sets.num_states)
        throw std::invalid_argument("EVI reference state out of range");

    const double epsilon = std::max(config.epsilon, min_evi_epsilon);
    const std::size_t S = sets.num_states;

    std::vector<double> current(S, 0.0);
    OperatorResult next = apply_extended_operator(sets, current, config.alpha);
    std::vector<double> increment(S);

    auto measure = [&] {
        for (State s = 0; s < S; ++s) increment[s] = next.values[s] - current[s];
        return ucrlb::span(increment);
    };

    PlanResult result;
    result.iterations = 1;
    double gap = measure();
    if (config.trace) *config.trace << result.iterations << ' ' << gap << '\n';
    while (gap > epsilon) {
        if (result.iterations >= config.max_iterations) {
            result.converged = false;
            break;
        }
        current = std::move(next.values);
        const double reference = current[config.reference_state];
        for (double& x : current) x -= reference;
        next = apply_extended_operator(sets, current, config.alpha);
        ++result.iterations;
        gap = measure();
        if (config.trace) *config.trace << result.iterations << ' ' << gap << '\n';
    }

    const auto [lo, hi] = std::minmax_element(increment.begin(), increment.end());
    result.gain = 0.5 * (*lo + *hi);
    result.bias = std::move(current);
    result.policy = std::move(next.greedy);
    result.final_span = gap;
    return result;
}

} // namespace ucrlb
