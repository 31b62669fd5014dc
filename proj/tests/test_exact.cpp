#include "oracles.hpp"
#include "ucrlb/exact.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace ucrlb;

TEST_CASE("span") {
    CHECK(span(std::vector<double>{1, 1, 1}) == 0.0);
    CHECK(span(std::vector<double>{0, 0.5}) == 0.5);
    RandomStream rng(4);
    std::vector<double> v(17);
    for (auto& x : v) x = rng.uniform() * 20 - 10;
    CHECK(span(v) == *std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end()));
    CHECK_THROWS_AS(span(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("optimal gain and bias") {
    SUBCASE("two-state cycle") {
        const auto r = solve_gain_bias(make_two_state_cycle(), 1e-10);
        CHECK(r.gain == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(r.bias[0] == 0.0);
        CHECK(r.bias[1] == doctest::Approx(0.5).epsilon(1e-8));
    }
    SUBCASE("bandit") {
        const auto r = solve_gain_bias(make_bandit({0.2, 0.8}), 1e-10);
        CHECK(r.gain == doctest::Approx(0.8));
        CHECK(r.bias == std::vector<double>{0.0});
        CHECK(r.policy.action(0) == 1);
    }
    SUBCASE("optimality equation holds for the returned bias") {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto mdp = make_random_communicating(5, 3, 3, seed);
            const auto r = solve_gain_bias(mdp, 1e-10);
            for (State s = 0; s < 5; ++s) {
                double best = -1e300;
                for (Action a = 0; a < 3; ++a) {
                    double q = mdp.reward_mean(s, a);
                    for (State x = 0; x < 5; ++x) q += mdp.transition(s, a, x) * r.bias[x];
                    best = std::max(best, q);
                }
                CHECK(std::abs(r.gain + r.bias[s] - best) <= 1e-7);
            }
            CHECK(std::abs(r.gain - oracle::optimal_gain_by_enumeration(mdp)) <= 1e-9);
        }
    }
    SUBCASE("riverswim against a long Monte-Carlo run of the greedy policy") {
        const auto mdp = make_riverswim(6);
        const auto r = solve_gain_bias(mdp, 1e-8);
        RandomStream rng(31);
        State s = 0;
        double total = 0.0;
        const std::uint64_t steps = 10'000'000;
        for (std::uint64_t i = 0; i < steps; ++i) {
            const auto out = step(mdp, s, r.policy.action(s), rng);
            total += out.reward;
            s = out.next_state;
        }
        CHECK(std::abs(total / steps - r.gain) <= 1e-3);
        CHECK(std::abs(r.gain - oracle::policy_gain_by_stationary(mdp, r.policy.actions())) <= 1e-8);
    }
}

TEST_CASE("diameter") {
    CHECK(diameter(make_two_state_cycle(), 1e-10) == 1.0);
    CHECK(diameter(make_bandit({0.5}), 1e-10) == 0.0);

    const auto river = make_riverswim(6);
    const double d = diameter(river, 1e-10);
    CHECK(std::abs(d - oracle::diameter_by_enumeration(river)) <= 1e-6);
    CHECK(std::abs(diameter(river, 1e-10, 0.7) - d) <= 1e-6);

    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto mdp = make_random_communicating(4, 2, 2, seed);
        CHECK(std::abs(diameter(mdp, 1e-10) - oracle::diameter_by_enumeration(mdp)) <= 1e-6);
    }

    TabularMDP split(2, 1, {1.0, 0.0, 0.0, 1.0}, {0.0, 0.0});
    CHECK_THROWS_AS(diameter(split, 1e-8), ConvergenceError);
}

TEST_CASE("policy gain") {
    CHECK(policy_gain(make_two_state_cycle(), Policy::deterministic({0, 0}), 1e-10) ==
          doctest::Approx(0.5).epsilon(1e-10));
    CHECK(policy_gain(make_bandit({0.2, 0.8}), Policy::deterministic({0}), 1e-10) == doctest::Approx(0.2));
    CHECK(policy_gain(make_bandit({0.2, 0.8}), Policy::deterministic({1}), 1e-10) == doctest::Approx(0.8));

    const auto river = make_riverswim(6);
    const auto left = Policy::deterministic(std::vector<Action>(6, 0));
    const double g_left = policy_gain(river, left, 1e-10);
    CHECK(g_left == doctest::Approx(0.005).epsilon(1e-8));
    RandomStream rng(17);
    State s = 3;
    double total = 0.0;
    for (int i = 0; i < 1'000'000; ++i) {
        const auto out = step(river, s, 0, rng);
        total += out.reward;
        s = out.next_state;
    }
    CHECK(std::abs(total / 1e6 - g_left) <= 1e-3);

    // Two disconnected absorbing states under the policy: multichain.
    TabularMDP split(2, 1, {1.0, 0.0, 0.0, 1.0}, {0.0, 1.0});
    CHECK_THROWS_AS(policy_gain(split, Policy::deterministic({0, 0}), 1e-8), ConvergenceError);
}

TEST_CASE("ground truth") {
    for (const auto& mdp : {make_riverswim(6), make_two_state_cycle(), make_random_communicating(5, 2, 3, 1)}) {
        const auto truth = compute_ground_truth(mdp);
        CHECK(truth.span_h <= mdp.r_max() * truth.diameter + 1e-6);
        CHECK(truth.span_h == doctest::Approx(span(truth.h_star)));
        const auto back = ground_truth_from_json(to_json(truth));
        CHECK(back.g_star == truth.g_star);
        CHECK(back.h_star == truth.h_star);
        CHECK(back.diameter == truth.diameter);
        CHECK(back.gamma_profile.gamma == truth.gamma_profile.gamma);
        CHECK(back.optimal_policy == truth.optimal_policy);
    }
    const auto river = compute_ground_truth(make_riverswim(6));
    CHECK(river.optimal_policy.actions() == std::vector<Action>(6, 1));
    CHECK(river.gamma_profile.gamma_max == 3);
}
