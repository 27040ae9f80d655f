#include "hvrp/core/cost.hpp"

#include <algorithm>
#include <cmath>

#include "hvrp/core/errors.hpp"

namespace hvrp {

void Solution::normalize() {
    std::erase_if(routes, [](const Route& r) { return r.customers.empty(); });
}

int Solution::num_customers() const {
    int count = 0;
    for (const auto& r : routes) count += static_cast<int>(r.customers.size());
    return count;
}

namespace {

double excess(double value, double limit) {
    const double over = value - limit;
    return over > kFeasibilityTolerance * std::max(1.0, std::abs(limit)) ? over : 0.0;
}

template <bool WithReport>
RouteCost evaluate_impl(int depot, std::span<const int> customers, const Instance& inst,
                        RouteReport* report) {
    RouteCost cost;
    if (customers.empty()) return cost;
    const VariantFlags& v = inst.variant();
    const bool closed = !v.open_routes;

    double length = 0.0;
    int prev = depot;
    for (int c : customers) {
        length += inst.dist(prev, c);
        prev = c;
    }
    if (closed) length += inst.dist(prev, depot);
    cost.distance = length;

    if (v.tsp_mode) {
        if constexpr (WithReport) {
            report->length = length;
            report->duration = length;
        }
        return cost;
    }

    // Departing load carries every linehaul demand of the route; deliveries
    // decrease it and backhaul pickups increase it.
    double load = 0.0;
    for (int c : customers)
        if (!inst.node(c).is_backhaul) load += inst.node(c).demand;
    double peak = load;
    if constexpr (WithReport) report->loads.push_back(load);
    for (int c : customers) {
        const Node& n = inst.node(c);
        load += n.is_backhaul ? n.demand : -n.demand;
        peak = std::max(peak, load);
        if constexpr (WithReport) report->loads.push_back(load);
    }
    cost.excess_load = excess(peak, inst.capacity());
    if (v.backhaul && inst.node(customers.front()).is_backhaul)
        cost.backhaul_start = inst.node(customers.front()).demand;

    double service_total = 0.0;
    for (int c : customers) service_total += inst.node(c).service_time;

    if (v.time_windows) {
        double t = inst.node(depot).tw_early;
        prev = depot;
        double late = 0.0;
        for (int c : customers) {
            const Node& n = inst.node(c);
            const double start = std::max(t + inst.dist(prev, c), n.tw_early);
            late += excess(start, n.tw_late);
            if constexpr (WithReport) report->service_starts.push_back(start);
            t = start + n.service_time;
            prev = c;
        }
        if (closed) late += excess(t + inst.dist(prev, depot), inst.node(depot).tw_late);
        cost.tw_violation = late;
    }

    const double duration = length + service_total;
    if (v.duration_limit) cost.duration_excess = excess(duration, inst.route_limit());
    if constexpr (WithReport) {
        report->length = length;
        report->duration = duration;
    }
    return cost;
}

}  // namespace

double route_distance(int depot, std::span<const int> customers, const Instance& instance) {
    if (customers.empty()) return 0.0;
    double length = 0.0;
    int prev = depot;
    for (int c : customers) {
        length += instance.dist(prev, c);
        prev = c;
    }
    if (!instance.variant().open_routes) length += instance.dist(prev, depot);
    return length;
}

double route_distance(const Route& route, const Instance& instance) {
    return route_distance(route.depot, route.customers, instance);
}

RouteCost evaluate_route(int depot, std::span<const int> customers, const Instance& instance) {
    return evaluate_impl<false>(depot, customers, instance, nullptr);
}

void check_structure(const Solution& solution, const Instance& instance) {
    std::vector<char> seen(static_cast<std::size_t>(instance.size()), 0);
    for (std::size_t r = 0; r < solution.routes.size(); ++r) {
        const Route& route = solution.routes[r];
        if (!instance.is_depot(route.depot))
            throw StructureError("route " + std::to_string(r) + " has invalid depot " +
                                 std::to_string(route.depot));
        for (int c : route.customers) {
            if (!instance.is_customer(c))
                throw StructureError("route " + std::to_string(r) + " visits invalid customer " +
                                     std::to_string(c));
            if (seen[static_cast<std::size_t>(c)]++)
                throw StructureError("customer " + std::to_string(c) + " visited more than once");
        }
    }
    for (int c = instance.num_depots(); c < instance.size(); ++c)
        if (!seen[static_cast<std::size_t>(c)])
            throw StructureError("customer " + std::to_string(c) + " is not served");
    if (instance.variant().tsp_mode) {
        int non_empty = 0;
        for (const auto& r : solution.routes) non_empty += r.customers.empty() ? 0 : 1;
        if (non_empty != 1) throw StructureError("a TSP solution must be a single tour");
    }
}

CostBreakdown evaluate_solution(const Solution& solution, const Instance& instance,
                                const PenaltyWeights& penalties) {
    check_structure(solution, instance);
    CostBreakdown out;
    for (const Route& r : solution.routes) {
        const RouteCost rc = evaluate_route(r, instance);
        out.distance += rc.distance;
        out.excess_load += rc.excess_load;
        out.tw_violation += rc.tw_violation;
        out.duration_excess += rc.duration_excess;
        out.backhaul_start += rc.backhaul_start;
    }
    out.penalized = out.distance +
                    penalties.capacity * (out.excess_load + out.backhaul_start) +
                    penalties.time_window * out.tw_violation + penalties.duration * out.duration_excess;
    return out;
}

FeasibilityReport check_feasibility(const Solution& solution, const Instance& instance) {
    FeasibilityReport report;
    try {
        check_structure(solution, instance);
        report.structurally_valid = true;
    } catch (const StructureError& e) {
        report.structure_error = e.what();
    }
    bool ok = report.structurally_valid;
    for (const Route& r : solution.routes) {
        RouteReport rr;
        rr.depot = r.depot;
        if (report.structurally_valid || instance.is_depot(r.depot)) {
            bool indices_ok = instance.is_depot(r.depot);
            for (int c : r.customers) indices_ok = indices_ok && instance.is_customer(c);
            if (indices_ok) {
                rr.cost = evaluate_impl<true>(r.depot, r.customers, instance, &rr);
                ok = ok && rr.cost.feasible();
            }
        }
        report.routes.push_back(std::move(rr));
    }
    report.feasible = ok;
    return report;
}

}  // namespace hvrp
