#pragma once

#include <span>
#include <string>
#include <vector>

#include "hvrp/core/instance.hpp"
#include "hvrp/core/solution.hpp"

namespace hvrp {

/// Penalty per unit of violation. Leading-backhaul violations are charged
/// at the capacity rate.
struct PenaltyWeights {
    double capacity = 0.0;
    double time_window = 0.0;
    double duration = 0.0;

    static PenaltyWeights uniform(double w) { return {w, w, w}; }
};

/// Violations below this relative slack are treated as zero so that
/// rescaled or reordered sums do not flip feasibility.
inline constexpr double kFeasibilityTolerance = 1e-9;

struct RouteCost {
    double distance = 0.0;
    double excess_load = 0.0;
    double tw_violation = 0.0;
    double duration_excess = 0.0;
    /// Demand of the first customer when it is a backhaul (routes must open
    /// with a linehaul customer), else 0.
    double backhaul_start = 0.0;

    double violation(const PenaltyWeights& w) const {
        return w.capacity * (excess_load + backhaul_start) + w.time_window * tw_violation +
               w.duration * duration_excess;
    }
    double penalized(const PenaltyWeights& w) const { return distance + violation(w); }
    bool feasible() const {
        return excess_load == 0.0 && tw_violation == 0.0 && duration_excess == 0.0 &&
               backhaul_start == 0.0;
    }
};

struct CostBreakdown {
    double distance = 0.0;
    double excess_load = 0.0;
    double tw_violation = 0.0;
    double duration_excess = 0.0;
    double backhaul_start = 0.0;
    double penalized = 0.0;

    bool violation_free() const {
        return excess_load == 0.0 && tw_violation == 0.0 && duration_excess == 0.0 &&
               backhaul_start == 0.0;
    }
};

/// Traversed distance of a route: depot -> c1 -> ... -> ck (-> depot unless
/// open_routes). Empty routes cost 0.
double route_distance(const Route& route, const Instance& instance);
double route_distance(int depot, std::span<const int> customers, const Instance& instance);

/// Distance plus violation magnitudes for one route. Indices are not checked.
RouteCost evaluate_route(int depot, std::span<const int> customers, const Instance& instance);
inline RouteCost evaluate_route(const Route& route, const Instance& instance) {
    return evaluate_route(route.depot, route.customers, instance);
}

/// Throws StructureError when the solution does not serve every customer
/// exactly once with valid depot/customer indices.
void check_structure(const Solution& solution, const Instance& instance);

CostBreakdown evaluate_solution(const Solution& solution, const Instance& instance,
                                const PenaltyWeights& penalties);

struct RouteReport {
    int depot = 0;
    RouteCost cost;
    std::vector<double> loads;           // departing load, then load after each visit
    std::vector<double> service_starts;  // per customer (empty without time windows)
    double length = 0.0;
    double duration = 0.0;
};

struct FeasibilityReport {
    bool feasible = false;
    bool structurally_valid = false;
    std::string structure_error;
    std::vector<RouteReport> routes;
};

/// Never throws on infeasibility; structural problems are reported in the
/// verdict.
FeasibilityReport check_feasibility(const Solution& solution, const Instance& instance);

}  // namespace hvrp
