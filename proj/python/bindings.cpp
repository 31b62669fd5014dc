#include "ucrlb/harness.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace ucrlb;

namespace {

py::dict plan_to_dict(const PlanResult& plan) {
    py::dict out;
    out["gain"] = plan.gain;
    out["bias"] = plan.bias;
    out["policy"] = plan.policy.actions();
    out["iterations"] = plan.iterations;
    out["final_span"] = plan.final_span;
    out["converged"] = plan.converged;
    return out;
}

py::dict truth_to_dict(const GroundTruth& truth) {
    py::dict out;
    out["g_star"] = truth.g_star;
    out["h_star"] = truth.h_star;
    out["span_h"] = truth.span_h;
    out["diameter"] = truth.diameter;
    out["gamma"] = truth.gamma_profile.gamma;
    out["gamma_max"] = truth.gamma_profile.gamma_max;
    out["optimal_policy"] = truth.optimal_policy.actions();
    return out;
}

LearnerConfig learner_config(std::uint64_t horizon, double delta, double alpha, std::uint64_t seed,
                             const std::string& set_override, State initial_state) {
    LearnerConfig cfg;
    cfg.horizon = horizon;
    cfg.delta = delta;
    cfg.alpha = alpha;
    cfg.seed = seed;
    cfg.set_override = parse_set_override(set_override);
    cfg.initial_state = initial_state;
    return cfg;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "UCRL2B average-reward reinforcement learning: planning, learning and benchmarks";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<InfeasibleSetError>(m, "InfeasibleSetError", PyExc_ValueError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

    py::class_<TabularMDP>(m, "TabularMDP")
        .def(py::init([](std::size_t S, std::size_t A, std::vector<double> transition,
                         std::vector<double> reward, const std::string& kind, double r_max) {
                 return TabularMDP(S, A, std::move(transition), std::move(reward),
                                   parse_reward_kind(kind), r_max);
             }),
             py::arg("num_states"), py::arg("num_actions"), py::arg("transition"), py::arg("reward_mean"),
             py::arg("reward_kind") = "bernoulli", py::arg("r_max") = 1.0)
        .def_property_readonly("num_states", &TabularMDP::num_states)
        .def_property_readonly("num_actions", &TabularMDP::num_actions)
        .def_property_readonly("r_max", &TabularMDP::r_max)
        .def_property_readonly("transition", &TabularMDP::transition_tensor)
        .def_property_readonly("reward_mean", &TabularMDP::reward_matrix)
        .def("row", [](const TabularMDP& mdp, State s, Action a) {
            const auto row = mdp.row(s, a);
            return std::vector<double>(row.begin(), row.end());
        });

    m.def("build_environment",
          [](const std::string& name, std::map<std::string, std::string> params, std::uint64_t seed,
             const std::string& reward_kind, double r_max) {
              EnvironmentSpec spec;
              spec.name = name;
              spec.params = std::move(params);
              spec.seed = seed;
              spec.reward_kind = parse_reward_kind(reward_kind);
              spec.r_max = r_max;
              return build_environment(spec);
          },
          py::arg("name"), py::arg("params") = std::map<std::string, std::string>{}, py::arg("seed") = 0,
          py::arg("reward_kind") = "bernoulli", py::arg("r_max") = 1.0);

    m.def("validate_mdp", [](const TabularMDP& mdp) {
        const auto report = validate_mdp(mdp);
        py::list violations;
        for (const auto& v : report.violations) {
            const char* kind = v.kind == Violation::Kind::row_sum          ? "row_sum"
                               : v.kind == Violation::Kind::reward_range ? "reward_range"
                                                                          : "transition_range";
            violations.append(py::make_tuple(kind, v.s, v.a, v.value));
        }
        py::dict out;
        out["ok"] = report.ok;
        out["violations"] = violations;
        return out;
    });

    m.def("support_profile", [](const TabularMDP& mdp) {
        const auto profile = support_profile(mdp);
        return py::make_tuple(profile.gamma, profile.gamma_max);
    });

    m.def("sample_trajectory",
          [](const TabularMDP& mdp, std::vector<std::pair<State, Action>> pairs, std::uint64_t seed) {
              RandomStream rng(seed);
              std::vector<std::pair<double, State>> out;
              for (const auto& [s, a] : pairs) {
                  const auto r = step(mdp, s, a, rng);
                  out.emplace_back(r.reward, r.next_state);
              }
              return out;
          },
          "Samples step(s, a) for each pair with one seeded stream.");

    m.def("span", [](std::vector<double> v) { return span(v); });
    m.def("bernstein_radius", &bernstein_radius, py::arg("variance"), py::arg("n"),
          py::arg("num_states"), py::arg("num_actions"), py::arg("delta"), py::arg("scale") = 1.0);
    m.def("inner_max_transition",
          [](std::vector<double> low, std::vector<double> high, std::vector<double> v) {
              return inner_max_transition(low, high, v);
          });

    m.def("plan",
          [](const TabularMDP& mdp, const std::string& sets, double alpha, double epsilon) {
              const ConfidenceSets cs = sets == "vacuous"
                                            ? ConfidenceSets::vacuous(mdp.num_states(), mdp.num_actions(), mdp.r_max())
                                            : ConfidenceSets::point(mdp);
              EviConfig cfg;
              cfg.alpha = alpha;
              cfg.epsilon = epsilon;
              return plan_to_dict(extended_value_iteration(cs, cfg));
          },
          py::arg("mdp"), py::arg("sets") = "point", py::arg("alpha") = 0.9, py::arg("epsilon") = 1e-8,
          "Extended value iteration on zero-width ('point') or full-range ('vacuous') sets.");

    m.def("solve_gain_bias",
          [](const TabularMDP& mdp, double tol, double alpha) {
              const auto r = solve_gain_bias(mdp, tol, alpha);
              py::dict out;
              out["gain"] = r.gain;
              out["bias"] = r.bias;
              out["policy"] = r.policy.actions();
              return out;
          },
          py::arg("mdp"), py::arg("tol") = 1e-8, py::arg("alpha") = 0.9);
    m.def("diameter", [](const TabularMDP& mdp, double tol) { return diameter(mdp, tol); },
          py::arg("mdp"), py::arg("tol") = 1e-8);
    m.def("policy_gain",
          [](const TabularMDP& mdp, std::vector<Action> actions, double tol) {
              return policy_gain(mdp, Policy::deterministic(std::move(actions)), tol);
          },
          py::arg("mdp"), py::arg("actions"), py::arg("tol") = 1e-8);
    m.def("ground_truth", [](const TabularMDP& mdp, double tol) { return truth_to_dict(compute_ground_truth(mdp, tol)); },
          py::arg("mdp"), py::arg("tol") = 1e-10);

    py::class_<RunLog>(m, "RunLog")
        .def_readonly("seed", &RunLog::seed)
        .def_readonly("config", &RunLog::config)
        .def("__len__", [](const RunLog& log) { return log.steps.size(); })
        .def_property_readonly("rewards", [](const RunLog& log) {
            std::vector<double> out;
            for (const auto& s : log.steps) out.push_back(s.reward);
            return out;
        })
        .def_property_readonly("steps", [](const RunLog& log) {
            std::vector<std::tuple<std::uint64_t, State, Action, double, State, std::uint64_t>> out;
            for (const auto& s : log.steps) out.emplace_back(s.t, s.s, s.a, s.reward, s.next, s.k);
            return out;
        })
        .def_property_readonly("episodes", [](const RunLog& log) {
            std::vector<std::tuple<std::uint64_t, std::uint64_t, double, std::uint64_t>> out;
            for (const auto& e : log.episodes) out.emplace_back(e.k, e.t_k, e.gain, e.evi_iterations);
            return out;
        });

    m.def("run_ucrl2b",
          [](const TabularMDP& env, std::uint64_t horizon, double delta, double alpha, std::uint64_t seed,
             const std::string& set_override, State initial_state) {
              return run_ucrl2b(env, learner_config(horizon, delta, alpha, seed, set_override, initial_state));
          },
          py::arg("env"), py::arg("horizon"), py::arg("delta") = 0.1, py::arg("alpha") = 0.9,
          py::arg("seed") = 0, py::arg("set_override") = "none", py::arg("initial_state") = 0);
    m.def("run_ucrl2_hoeffding",
          [](const TabularMDP& env, std::uint64_t horizon, double delta, double alpha, std::uint64_t seed,
             const std::string& set_override, State initial_state) {
              return run_ucrl2_hoeffding(env, learner_config(horizon, delta, alpha, seed, set_override, initial_state));
          },
          py::arg("env"), py::arg("horizon"), py::arg("delta") = 0.1, py::arg("alpha") = 0.9,
          py::arg("seed") = 0, py::arg("set_override") = "none", py::arg("initial_state") = 0);
    m.def("run_fixed_policy",
          [](const TabularMDP& env, std::vector<Action> actions, std::uint64_t horizon, std::uint64_t seed) {
              return run_fixed_policy(env, Policy::deterministic(std::move(actions)), horizon, seed);
          },
          py::arg("env"), py::arg("actions"), py::arg("horizon"), py::arg("seed") = 0);

    m.def("compute_regret",
          [](const RunLog& log, double g_star, std::vector<std::uint64_t> grid) {
              GroundTruth truth;
              truth.g_star = g_star;
              const auto series = compute_regret(log, truth, grid);
              return py::make_tuple(series.t, series.regret, series.episodes);
          },
          py::arg("log"), py::arg("g_star"), py::arg("grid"));
    m.def("regret_grid", &regret_grid);

    m.def("coverage_experiment", [](const std::string& config_path) {
        const auto report = coverage_experiment(ExperimentConfig::load(config_path));
        py::dict out;
        out["num_runs"] = report.num_runs;
        out["runs_with_violation"] = report.runs_with_violation;
        out["violation_fraction"] = report.violation_fraction;
        out["violations_by_episode"] = report.violations_by_episode;
        return out;
    });
    m.def("run_suite", [](const std::string& config_path) {
        const auto result = run_suite(ExperimentConfig::load(config_path));
        py::dict out;
        out["truth"] = truth_to_dict(result.truth);
        out["files"] = result.files;
        return out;
    });
}
