#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hvrp/core/instance.hpp"
#include "hvrp/core/solution.hpp"
#include "hvrp/ls/neighbors.hpp"
#include "hvrp/ls/search.hpp"

namespace hvrp::ls {

struct TracePoint {
    int iteration = 0;  // 0 = after the initial search
    double best_cost = 0.0;
    double wall_ms = 0.0;
};

struct LSResult {
    Solution best;
    double cost = 0.0;  // travelled distance of `best`, which is feasible
    std::vector<TracePoint> trace;
    int iterations_completed = 0;
    bool initial_feasible = false;
};

/// Search the initial solution, then repeatedly cross the incumbent with a
/// random solution, search and repair the offspring, and keep it on strict
/// improvement. Order crossover replaces SREX in tsp_mode.
LSResult run_local_search(const Solution& initial, const Instance& instance, const LSConfig& config);
LSResult run_local_search(const Solution& initial, const Instance& instance, const NeighborLists& neighbors,
                          const LSConfig& config);

/// CSV with header `iteration,best_cost,wall_clock_ms`.
void write_trace_csv(std::ostream& out, const std::vector<TracePoint>& trace);
void write_trace_csv(const std::string& path, const std::vector<TracePoint>& trace);

}  // namespace hvrp::ls
