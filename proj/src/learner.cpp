#include "ucrlb/learner.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ucrlb {

std::string to_string(Algorithm algorithm) {
    switch (algorithm) {
    case Algorithm::ucrl2b: return "ucrl2b";
    case Algorithm::ucrl2_hoeffding: return "ucrl2-hoeffding";
    case Algorithm::fixed_policy: return "fixed-policy";
    }
    return "unknown";
}

Algorithm parse_algorithm(const std::string& text) {
    if (text == "ucrl2b") return Algorithm::ucrl2b;
    if (text == "ucrl2-hoeffding") return Algorithm::ucrl2_hoeffding;
    if (text == "fixed-policy") return Algorithm::fixed_policy;
    throw std::invalid_argument("unknown algorithm '" + text + "'");
}

std::string LearnerConfig::describe() const {
    std::ostringstream out;
    out.precision(17);
    out << "algorithm=" << to_string(algorithm) << ";horizon=" << horizon << ";delta=" << delta
        << ";alpha=" << alpha << ";seed=" << seed << ";initial_state=" << initial_state
        << ";set_override=" << to_string(set_override);
    return out.str();
}

namespace {

void check_config(const TabularMDP& env, const LearnerConfig& config) {
    if (config.horizon < 1) throw std::invalid_argument("horizon must be at least 1");
    if (!(config.delta > 0.0 && config.delta < 1.0))
        throw std::invalid_argument("delta must lie in (0, 1)");
    if (!(config.alpha > 0.0 && config.alpha <= 1.0))
        throw std::invalid_argument("alpha must lie in (0, 1]");
    if (config.initial_state >= env.num_states())
        throw std::invalid_argument("initial state out of range");
}

template <typename BuildSets>
RunLog run_optimistic(const TabularMDP& env, const LearnerConfig& config, BuildSets build_sets,
                      const EpisodeObserver& observer) {
    check_config(env, config);
    RandomStream rng(config.seed);
    RunningStats stats(env.num_states(), env.num_actions(), env.r_max());

    RunLog log;
    log.seed = config.seed;
    log.config = config.describe();
    log.steps.reserve(config.horizon);
    if (config.debug_dump) write_debug_dump_header(*config.debug_dump);

    State s = config.initial_state;
    while (stats.t() <= config.horizon) {
        const std::uint64_t t_k = stats.episode_start();
        const ConfidenceSets sets = build_sets(stats);
        if (config.debug_dump) write_debug_dump(*config.debug_dump, stats, sets);

        EviConfig evi;
        evi.alpha = config.alpha;
        evi.epsilon = std::max(env.r_max() / static_cast<double>(t_k), min_evi_epsilon);
        evi.max_iterations = config.evi_max_iterations;
        const PlanResult plan = extended_value_iteration(sets, evi);
        log.episodes.push_back(
            {stats.episode(), t_k, plan.gain, plan.iterations, evi.epsilon, plan.converged});
        if (observer) observer(stats, sets, plan);

        while (stats.t() <= config.horizon) {
            const Action a = plan.policy.action(s);
            const StepResult outcome = step(env, s, a, rng);
            log.steps.push_back({stats.t(), s, a, outcome.reward, outcome.next_state, stats.episode()});
            stats.record_step(s, a, outcome.reward, outcome.next_state);
            const bool done = stats.episode_should_end(s, a);
            s = outcome.next_state;
            if (done) break;
        }
        stats.finalize_episode();
    }
    return log;
}

} // namespace

RunLog run_ucrl2b(const TabularMDP& env, const LearnerConfig& config, const EpisodeObserver& observer) {
    return run_optimistic(
        env, config,
        [&](const RunningStats& stats) {
            return build_confidence_sets(stats, config.delta, config.set_override);
        },
        observer);
}

RunLog run_ucrl2_hoeffding(const TabularMDP& env, const LearnerConfig& config,
                           const EpisodeObserver& observer) {
    return run_optimistic(
        env, config,
        [&](const RunningStats& stats) {
            return build_hoeffding_sets(stats, config.delta, config.set_override);
        },
        observer);
}

RunLog run_fixed_policy(const TabularMDP& env, const Policy& policy, std::uint64_t horizon,
                        std::uint64_t seed, State initial_state) {
    validate_policy(policy, env.num_states(), env.num_actions());
    if (initial_state >= env.num_states()) throw std::invalid_argument("initial state out of range");
    RunLog log;
    log.seed = seed;
    log.config = "algorithm=fixed-policy;horizon=" + std::to_string(horizon) +
                 ";seed=" + std::to_string(seed) + ";initial_state=" + std::to_string(initial_state);
    if (horizon == 0) return log;

    RandomStream rng(seed);
    log.steps.reserve(horizon);
    log.episodes.push_back({1, 1, std::numeric_limits<double>::quiet_NaN(), 0, 0.0, true});
    State s = initial_state;
    for (std::uint64_t t = 1; t <= horizon; ++t) {
        const Action a = policy.select(s, rng);
        const StepResult outcome = step(env, s, a, rng);
        log.steps.push_back({t, s, a, outcome.reward, outcome.next_state, 1});
        s = outcome.next_state;
    }
    return log;
}

RunLog run_learner(const TabularMDP& env, const LearnerConfig& config, const Policy* policy) {
    switch (config.algorithm) {
    case Algorithm::ucrl2b: return run_ucrl2b(env, config);
    case Algorithm::ucrl2_hoeffding: return run_ucrl2_hoeffding(env, config);
    case Algorithm::fixed_policy:
        if (!policy) throw std::invalid_argument("fixed-policy run needs a policy");
        return run_fixed_policy(env, *policy, config.horizon, config.seed, config.initial_state);
    }
    throw std::invalid_argument("unknown algorithm");
}

std::vector<std::uint64_t> replay_episode_indices(const RunLog& log, std::size_t num_states,
                                                  std::size_t num_actions) {
    std::vector<std::uint64_t> visits(num_states * num_actions, 0);
    std::vector<std::uint64_t> episode_visits(num_states * num_actions, 0);
    std::vector<std::uint64_t> indices;
    indices.reserve(log.steps.size());
    std::uint64_t k = 1;
    bool boundary = false;
    for (const StepRecord& record : log.steps) {
        if (boundary) {
            for (std::size_t i = 0; i < visits.size(); ++i) {
                visits[i] += episode_visits[i];
                episode_visits[i] = 0;
            }
            ++k;
            boundary = false;
        }
        indices.push_back(k);
        const std::size_t i = record.s * num_actions + record.a;
        ++episode_visits[i];
        boundary = episode_visits[i] >= std::max<std::uint64_t>(1, visits[i]);
    }
    return indices;
}

// ---------------------------------------------------------------------------
// Serialization

void write_steps_csv(std::ostream& out, const RunLog& log) {
    const auto precision = out.precision(17);
    out << "t,s,a,r,s_next,k\n";
    for (const StepRecord& r : log.steps)
        out << r.t << ',' << r.s << ',' << r.a << ',' << r.reward << ',' << r.next << ',' << r.k << '\n';
    out.precision(precision);
}

void write_episodes_csv(std::ostream& out, const RunLog& log) {
    const auto precision = out.precision(17);
    out << "k,t_k,gain,evi_iterations,epsilon,converged\n";
    for (const EpisodeRecord& e : log.episodes)
        out << e.k << ',' << e.t_k << ',' << e.gain << ',' << e.evi_iterations << ',' << e.epsilon
            << ',' << (e.converged ? 1 : 0) << '\n';
    out.precision(precision);
}

namespace {

std::vector<std::string> read_row(std::istream& in, std::size_t expected_fields) {
    std::string line;
    if (!std::getline(in, line) || line.empty()) return {};
    std::vector<std::string> fields;
    std::istringstream row(line);
    std::string field;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != expected_fields)
        throw std::runtime_error("run log row has " + std::to_string(fields.size()) +
                                 " fields, expected " + std::to_string(expected_fields));
    return fields;
}

} // namespace

RunLog read_run_log(std::istream& steps, std::istream& episodes) {
    RunLog log;
    std::string header;
    std::getline(steps, header);
    if (header != "t,s,a,r,s_next,k") throw std::runtime_error("unexpected steps header: " + header);
    for (auto row = read_row(steps, 6); !row.empty(); row = read_row(steps, 6))
        log.steps.push_back({std::stoull(row[0]), std::stoull(row[1]), std::stoull(row[2]),
                             std::stod(row[3]), std::stoull(row[4]), std::stoull(row[5])});

    std::getline(episodes, header);
    if (header != "k,t_k,gain,evi_iterations,epsilon,converged")
        throw std::runtime_error("unexpected episodes header: " + header);
    for (auto row = read_row(episodes, 6); !row.empty(); row = read_row(episodes, 6))
        log.episodes.push_back({std::stoull(row[0]), std::stoull(row[1]), std::stod(row[2]),
                                std::stoull(row[3]), std::stod(row[4]), row[5] == "1"});
    return log;
}

} // namespace ucrlb
