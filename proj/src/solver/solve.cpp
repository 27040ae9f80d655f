#include "hvrp/solver/solve.hpp"

#include <chrono>

#include "hvrp/core/cost.hpp"
#include "hvrp/core/errors.hpp"
#include "hvrp/nn/checkpoint.hpp"
#include "hvrp/nn/policy.hpp"
#include "hvrp/solver/initial.hpp"

namespace hvrp::solver {

std::string to_string(SolveMode mode) {
    switch (mode) {
        case SolveMode::neural: return "neural";
        case SolveMode::neural_ls: return "neural+ls";
        case SolveMode::greedy_ls: return "greedy+ls";
        case SolveMode::random_ls: return "random+ls";
    }
    return "?";
}

SolveMode parse_solve_mode(std::string_view text) {
    for (SolveMode m : {SolveMode::neural, SolveMode::neural_ls, SolveMode::greedy_ls, SolveMode::random_ls})
        if (text == to_string(m)) return m;
    throw InvalidInput("unknown solve mode '" + std::string(text) + "'");
}

void SolveConfig::validate() const {
    if (is_neural(mode) && checkpoint.empty()) throw InvalidInput(to_string(mode) + " needs a checkpoint");
    if (max_starts < 1) throw InvalidInput("max_starts must be at least 1");
    if (time_budget_ms < 0.0) throw InvalidInput("time budget must be non-negative");
    ls.validate();
}

Solution neural_construct(const Instance& instance, const nn::PolicyParams& params, bool augment, int max_starts,
                          std::uint64_t seed) {
    nn::RolloutOptions opts;
    opts.max_starts = max_starts;
    opts.mode = nn::DecodeMode::greedy;
    opts.seed = seed;
    const std::vector<nn::Trajectory> trajs =
        augment ? nn::rollout_augmented(params, instance, opts) : nn::rollout(params, instance, opts);
    return trajs[nn::best_trajectory(trajs)].solution;
}

SolveResult solve(const Instance& instance, const SolveConfig& config) {
    if (!is_neural(config.mode)) return solve(instance, config, nullptr);
    config.validate();
    const nn::PolicyParams params = nn::load_checkpoint(config.checkpoint);
    return solve(instance, config, &params);
}

SolveResult solve(const Instance& instance, const SolveConfig& config, const nn::PolicyParams* params) {
    if (!is_neural(config.mode) || !config.checkpoint.empty()) config.validate();
    else config.ls.validate();
    using Clock = std::chrono::steady_clock;
    const auto ms = [](Clock::time_point a, Clock::time_point b) {
        return std::chrono::duration<double, std::milli>(b - a).count();
    };
    const auto t0 = Clock::now();

    Solution init;
    switch (config.mode) {
        case SolveMode::neural:
        case SolveMode::neural_ls:
            if (!params) throw InvalidInput("neural modes need policy parameters");
            if (params->config.tsp != instance.variant().tsp_mode)
                throw CheckpointError(params->config.tsp ? "checkpoint is TSP-adapted but the instance is not"
                                                         : "checkpoint is not TSP-adapted but the instance is a TSP");
            init = neural_construct(instance, *params, config.augment, config.max_starts, config.seed);
            break;
        case SolveMode::greedy_ls:
            init = greedy_initial(instance);
            break;
        case SolveMode::random_ls: {
            ls::Rng rng(config.seed);
            init = ls::make_random(instance, rng);
            break;
        }
    }
    const auto t1 = Clock::now();

    SolveResult res;
    res.stats.construction_cost = evaluate_solution(init, instance, {}).distance;
    res.stats.construction_feasible = check_feasibility(init, instance).feasible;
    res.stats.construction_ms = ms(t0, t1);

    if (uses_ls(config.mode)) {
        ls::LSConfig lc = config.ls;
        lc.seed = config.seed;
        if (config.time_budget_ms > 0.0) lc.time_budget_ms = config.time_budget_ms;
        ls::LSResult lr = ls::run_local_search(init, instance, lc);
        res.solution = std::move(lr.best);
        res.stats.final_cost = lr.cost;
        res.stats.trace = std::move(lr.trace);
        res.stats.ls_iterations = lr.iterations_completed;
    } else {
        res.solution = std::move(init);
        res.stats.final_cost = res.stats.construction_cost;
    }
    const auto t2 = Clock::now();
    res.stats.ls_ms = ms(t1, t2);
    res.stats.total_ms = ms(t0, t2);
    return res;
}

}  // namespace hvrp::solver
