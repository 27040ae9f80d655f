#include "hvrp/ls/local_search.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>

#include "hvrp/core/cost.hpp"
#include "hvrp/core/errors.hpp"
#include "hvrp/ls/crossover.hpp"

namespace hvrp::ls {

LSResult run_local_search(const Solution& initial, const Instance& instance, const LSConfig& config) {
    config.validate();
    return run_local_search(initial, instance, build_granular_neighbors(instance, config.granularity), config);
}

LSResult run_local_search(const Solution& initial, const Instance& inst, const NeighborLists& nl,
                          const LSConfig& config) {
    config.validate();
    check_structure(initial, inst);
    using Clock = std::chrono::steady_clock;
    const auto t0 = Clock::now();
    const auto elapsed_ms = [&] { return std::chrono::duration<double, std::milli>(Clock::now() - t0).count(); };
    Rng rng(config.seed);

    LSResult res;
    res.best = initial;
    res.best.normalize();
    res.initial_feasible = is_feasible(res.best, inst);
    double bd = res.initial_feasible ? evaluate_solution(res.best, inst, {}).distance
                                     : std::numeric_limits<double>::infinity();

    const auto refine = [&](const Solution& start) {
        Solution t = search(start, inst, nl, config.search_weights, rng, config.max_exchange);
        if (!is_feasible(t, inst)) t = fix(t, inst, nl, config, rng);
        const double c = evaluate_solution(t, inst, {}).distance;
        if (c < bd) {
            bd = c;
            res.best = std::move(t);
        }
    };

    refine(res.best);
    res.trace.push_back({0, bd, elapsed_ms()});
    for (int it = 1; it <= config.iterations; ++it) {
        if (config.time_budget_ms > 0.0 && elapsed_ms() >= config.time_budget_ms) break;
        const Solution other = make_random(inst, rng);
        const Solution offspring = inst.variant().tsp_mode
                                       ? ox_crossover(res.best, other, rng)
                                       : srex_crossover(res.best, other, inst, config.search_weights, rng);
        refine(offspring);
        res.iterations_completed = it;
        res.trace.push_back({it, bd, elapsed_ms()});
    }
    res.cost = bd;
    return res;
}

void write_trace_csv(std::ostream& out, const std::vector<TracePoint>& trace) {
    out << "iteration,best_cost,wall_clock_ms\n";
    out << std::setprecision(12);
    for (const TracePoint& p : trace) out << p.iteration << ',' << p.best_cost << ',' << p.wall_ms << '\n';
}

void write_trace_csv(const std::string& path, const std::vector<TracePoint>& trace) {
    std::ofstream f(path);
    if (!f) throw InvalidInput("cannot open " + path + " for writing");
    write_trace_csv(f, trace);
}

}  // namespace hvrp::ls
