#include "oracles.hpp"
#include "ucrlb/evi.hpp"
#include "ucrlb/exact.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

using namespace ucrlb;

namespace {

double dot(const std::vector<double>& p, const std::vector<double>& v) {
    return std::inner_product(p.begin(), p.end(), v.begin(), 0.0);
}

// Random feasible box: a distribution q plus independent slack on each side.
void random_box(RandomStream& rng, std::size_t n, std::vector<double>& low, std::vector<double>& high) {
    std::vector<double> q(n);
    double total = 0.0;
    for (auto& x : q) total += (x = -std::log(1.0 - rng.uniform()));
    low.assign(n, 0.0);
    high.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        q[i] /= total;
        low[i] = std::max(0.0, q[i] - 0.5 * rng.uniform());
        high[i] = std::min(1.0, q[i] + 0.5 * rng.uniform());
        if (rng.uniform() < 0.2) low[i] = high[i] = q[i];
    }
}

} // namespace

TEST_CASE("inner max over a box") {
    SUBCASE("worked example") {
        const std::vector<double> low{0.1, 0.2, 0.1}, high{0.7, 0.6, 0.5}, v{3, 1, 0};
        const auto p = inner_max_transition(low, high, v);
        CHECK(p[0] == doctest::Approx(0.7));
        CHECK(p[1] == doctest::Approx(0.2));
        CHECK(p[2] == doctest::Approx(0.1));
        CHECK(dot(p, v) == doctest::Approx(2.3));
        CHECK(*oracle::box_simplex_lp(low, high, v) == doctest::Approx(2.3));
    }
    SUBCASE("point box") {
        const std::vector<double> q{0.25, 0.5, 0.25};
        CHECK(inner_max_transition(q, q, std::vector<double>{1, 5, 2}) == q);
    }
    SUBCASE("vacuous box puts all mass on the argmax") {
        const auto p = inner_max_transition(std::vector<double>(4, 0.0), std::vector<double>(4, 1.0),
                                            std::vector<double>{0.1, 2.0, -1.0, 1.9});
        CHECK(p == std::vector<double>{0.0, 1.0, 0.0, 0.0});
    }
    SUBCASE("ties go to the lowest index") {
        const auto p = inner_max_transition(std::vector<double>(3, 0.0), std::vector<double>(3, 1.0),
                                            std::vector<double>{1.0, 2.0, 2.0});
        CHECK(p == std::vector<double>{0.0, 1.0, 0.0});
    }
    SUBCASE("infeasible boxes throw") {
        CHECK_THROWS_AS(inner_max_transition(std::vector<double>{0.6, 0.6}, std::vector<double>{1, 1},
                                             std::vector<double>{0, 1}),
                        InfeasibleSetError);
        CHECK_THROWS_AS(inner_max_transition(std::vector<double>{0.1, 0.1}, std::vector<double>{0.3, 0.3},
                                             std::vector<double>{0, 1}),
                        InfeasibleSetError);
        CHECK_THROWS_AS(inner_max_transition(std::vector<double>{0.5, 0.5}, std::vector<double>{0.4, 0.6},
                                             std::vector<double>{0, 1}),
                        InfeasibleSetError);
    }
}

TEST_CASE("inner max agrees with the vertex-enumeration LP on random boxes") {
    RandomStream rng(2024);
    for (int instance = 0; instance < 300; ++instance) {
        const std::size_t n = 2 + rng.below(5);
        std::vector<double> low, high, v(n);
        random_box(rng, n, low, high);
        for (auto& x : v) x = 10.0 * rng.uniform() - 5.0;
        const auto p = inner_max_transition(low, high, v);
        const auto reference = oracle::box_simplex_lp(low, high, v);
        REQUIRE(reference);
        CHECK(std::abs(dot(p, v) - *reference) <= 1e-10);
        CHECK(std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0) <= 1e-12);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(p[i] >= low[i]);
            CHECK(p[i] <= high[i]);
        }
    }
}

TEST_CASE("inner max over an L1 ball") {
    const std::vector<double> center{0.5, 0.5, 0.0}, v{0.0, 1.0, 2.0};
    const auto order = descending_order(v);
    std::vector<double> p(3);
    inner_max_l1(center, 0.4, order, p);
    CHECK(p[0] == doctest::Approx(0.3));
    CHECK(p[1] == doctest::Approx(0.5));
    CHECK(p[2] == doctest::Approx(0.2));

    // Grid search over the simplex at resolution 1/200.
    RandomStream rng(5);
    for (int instance = 0; instance < 30; ++instance) {
        std::vector<double> c(3), w(3);
        double total = 0.0;
        for (auto& x : c) total += (x = rng.uniform());
        for (auto& x : c) x /= total;
        for (auto& x : w) x = rng.uniform();
        const double radius = 1.5 * rng.uniform();
        std::vector<double> q(3);
        inner_max_l1(c, radius, descending_order(w), q);
        double l1 = 0.0;
        for (int i = 0; i < 3; ++i) l1 += std::abs(q[i] - c[i]);
        CHECK(l1 <= radius + 1e-12);
        double best = -1.0;
        for (int i = 0; i <= 200; ++i)
            for (int j = 0; i + j <= 200; ++j) {
                const std::vector<double> g{i / 200.0, j / 200.0, (200 - i - j) / 200.0};
                double d = 0.0;
                for (int k = 0; k < 3; ++k) d += std::abs(g[k] - c[k]);
                if (d <= radius) best = std::max(best, dot(g, w));
            }
        CHECK(dot(q, w) >= best - 1e-12);
        CHECK(dot(q, w) <= best + 0.02);
    }
}

TEST_CASE("extended operator") {
    const auto cycle = make_two_state_cycle();
    const auto point = ConfidenceSets::point(cycle);
    const std::vector<double> zero{0.0, 0.0};
    SUBCASE("one-step lookahead on a known MDP") {
        for (double alpha : {1.0, 0.9}) {
            const auto result = apply_extended_operator(point, zero, alpha);
            CHECK(result.values == std::vector<double>{0.0, 1.0});
            CHECK(result.greedy.actions() == std::vector<Action>{0, 0});
        }
        const auto result = apply_extended_operator(point, std::vector<double>{0.0, 1.0}, 0.9);
        CHECK(result.values[0] == doctest::Approx(0.9));
        CHECK(result.values[1] == doctest::Approx(1.1));
    }
    SUBCASE("vacuous sets saturate") {
        const auto sets = ConfidenceSets::vacuous(3, 2, 2.0);
        const auto result = apply_extended_operator(sets, std::vector<double>(3, 0.0), 0.9);
        CHECK(result.values == std::vector<double>(3, 2.0));
    }
    SUBCASE("monotone and shift invariant") {
        const auto mdp = make_random_communicating(5, 3, 3, 12);
        RunningStats stats(5, 3, 1.0);
        RandomStream rng(1);
        State s = 0;
        for (int i = 0; i < 300; ++i) {
            const Action a = rng.below(3);
            const auto r = step(mdp, s, a, rng);
            stats.record_step(s, a, r.reward, r.next_state);
            s = r.next_state;
        }
        stats.finalize_episode();
        const auto sets = build_confidence_sets(stats, 0.1);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<double> v(5), w(5), shifted(5);
            const double c = 4.0 * rng.uniform() - 2.0;
            for (int i = 0; i < 5; ++i) {
                v[i] = 3.0 * rng.uniform();
                w[i] = v[i] + rng.uniform();
                shifted[i] = v[i] + c;
            }
            const auto lv = apply_extended_operator(sets, v, 0.9).values;
            const auto lw = apply_extended_operator(sets, w, 0.9).values;
            const auto ls = apply_extended_operator(sets, shifted, 0.9).values;
            for (int i = 0; i < 5; ++i) {
                CHECK(lv[i] <= lw[i] + 1e-12);
                CHECK(ls[i] == doctest::Approx(lv[i] + c).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("extended value iteration") {
    EviConfig cfg;
    cfg.epsilon = 1e-8;
    SUBCASE("two-state cycle") {
        const auto plan = extended_value_iteration(ConfidenceSets::point(make_two_state_cycle()), cfg);
        CHECK(plan.converged);
        CHECK(plan.gain == doctest::Approx(0.5).epsilon(1e-8));
        CHECK(plan.final_span <= cfg.epsilon);
    }
    SUBCASE("vacuous sets give unit gain") {
        const auto plan = extended_value_iteration(ConfidenceSets::vacuous(4, 2, 1.0), cfg);
        CHECK(plan.gain == doctest::Approx(1.0).epsilon(1e-8));
    }
    SUBCASE("agrees with the exact solver and policy enumeration") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto mdp = make_random_communicating(2 + seed % 4, 2, 2, seed);
            const auto plan = extended_value_iteration(ConfidenceSets::point(mdp), cfg);
            const auto exact = solve_gain_bias(mdp, 1e-8);
            CHECK(std::abs(plan.gain - exact.gain) <= 2e-8);
            CHECK(std::abs(plan.gain - oracle::optimal_gain_by_enumeration(mdp)) <= 1e-7);
        }
    }
    SUBCASE("enlarging the sets never lowers the gain") {
        const auto mdp = make_random_communicating(4, 2, 3, 99);
        auto sets = ConfidenceSets::point(mdp);
        double previous = extended_value_iteration(sets, cfg).gain;
        for (double width : {0.01, 0.05, 0.1, 0.3}) {
            auto wider = sets;
            for (std::size_t i = 0; i < wider.p_low.size(); ++i) {
                wider.p_low[i] = std::max(0.0, sets.p_low[i] - width);
                wider.p_high[i] = std::min(1.0, sets.p_high[i] + width);
            }
            for (std::size_t i = 0; i < wider.r_high.size(); ++i)
                wider.r_high[i] = std::min(1.0, sets.r_high[i] + width);
            const double gain = extended_value_iteration(wider, cfg).gain;
            CHECK(gain >= previous - 2 * cfg.epsilon);
            previous = gain;
        }
    }
    SUBCASE("periodic chain without aperiodicity hits the cap") {
        EviConfig periodic = cfg;
        periodic.alpha = 1.0;
        periodic.max_iterations = 50;
        const auto plan = extended_value_iteration(ConfidenceSets::point(make_two_state_cycle()), periodic);
        CHECK_FALSE(plan.converged);
        CHECK(plan.iterations == 50);
    }
    SUBCASE("trace and bad configs") {
        std::ostringstream trace;
        EviConfig traced = cfg;
        traced.trace = &trace;
        const auto plan = extended_value_iteration(ConfidenceSets::point(make_riverswim(4)), traced);
        std::istringstream in(trace.str());
        std::string line;
        std::uint64_t lines = 0;
        while (std::getline(in, line)) ++lines;
        CHECK(lines == plan.iterations);

        EviConfig bad = cfg;
        bad.alpha = 0.0;
        CHECK_THROWS_AS(extended_value_iteration(ConfidenceSets::point(make_two_state_cycle()), bad),
                        std::invalid_argument);
        bad = cfg;
        bad.epsilon = 0.0;
        CHECK_THROWS_AS(extended_value_iteration(ConfidenceSets::point(make_two_state_cycle()), bad),
                        std::invalid_argument);
    }
}
