import math

import pytest

import ucrlb


def test_environments_and_ground_truth():
    river = ucrlb.build_environment("riverswim", {"n": "6"})
    assert river.num_states == 6 and river.num_actions == 2
    assert ucrlb.validate_mdp(river)["ok"]
    assert ucrlb.support_profile(river)[1] == 3

    truth = ucrlb.ground_truth(river)
    assert truth["optimal_policy"] == [1] * 6
    assert truth["span_h"] <= truth["diameter"] * river.r_max + 1e-6

    cycle = ucrlb.build_environment("two-state-cycle")
    assert ucrlb.diameter(cycle) == 1.0
    assert ucrlb.solve_gain_bias(cycle)["gain"] == pytest.approx(0.5, abs=1e-8)
    assert ucrlb.policy_gain(cycle, [0, 0]) == pytest.approx(0.5, abs=1e-8)


def test_planning_matches_exact_solver():
    river = ucrlb.build_environment("riverswim", {"n": "6"})
    plan = ucrlb.plan(river, "point", epsilon=1e-8)
    assert plan["converged"]
    assert plan["gain"] == pytest.approx(ucrlb.solve_gain_bias(river, 1e-8)["gain"], abs=2e-8)
    assert ucrlb.plan(river, "vacuous")["gain"] == pytest.approx(1.0, abs=1e-6)


def test_inner_max_and_radius():
    p = ucrlb.inner_max_transition([0.1, 0.2, 0.1], [0.7, 0.6, 0.5], [3, 1, 0])
    assert p == pytest.approx([0.7, 0.2, 0.1])
    assert ucrlb.bernstein_radius(0.25, 100, 6, 2, 0.05) == pytest.approx(1.0572926003554453, rel=1e-12)
    with pytest.raises(ucrlb.InfeasibleSetError):
        ucrlb.inner_max_transition([0.6, 0.6], [1, 1], [0, 1])


def test_learners_are_deterministic():
    river = ucrlb.build_environment("riverswim", {"n": "6"})
    a = ucrlb.run_ucrl2b(river, 2000, seed=3)
    b = ucrlb.run_ucrl2b(river, 2000, seed=3)
    assert len(a) == 2000
    assert a.steps == b.steps
    h = ucrlb.run_ucrl2_hoeffding(river, 10, seed=3)
    assert len(h) == 10

    g_star = ucrlb.ground_truth(river)["g_star"]
    grid = ucrlb.regret_grid(2000)
    t, regret, episodes = ucrlb.compute_regret(a, g_star, grid)
    assert t[-1] == 2000
    assert regret[-1] == pytest.approx(sum(g_star - r for r in a.rewards), abs=1e-9)


def test_fixed_policy_and_sampling():
    bandit = ucrlb.build_environment("bandit", {"means": "0.2,0.8"})
    log = ucrlb.run_fixed_policy(bandit, [0], 20000, seed=1)
    assert sum(log.rewards) / len(log) == pytest.approx(0.2, abs=0.01)
    assert math.isnan(log.episodes[0][2])
    samples = ucrlb.sample_trajectory(bandit, [(0, 1)] * 5, 4)
    assert all(r in (0.0, 1.0) and s == 0 for r, s in samples)


def test_config_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("env.name = riverswim\nrun.horizon = 0\n")
    with pytest.raises(ucrlb.ConfigError):
        ucrlb.run_suite(str(bad))


def test_suite(tmp_path):
    cfg = tmp_path / "suite.cfg"
    cfg.write_text(
        "env.name = two-state-cycle\nrun.algorithms = ucrl2b\nrun.horizon = 64\n"
        f"run.seeds = 1\nrun.output_dir = {tmp_path / 'out'}\n"
    )
    result = ucrlb.run_suite(str(cfg))
    assert "aggregate.csv" in result["files"]
    assert result["truth"]["g_star"] == pytest.approx(0.5)
