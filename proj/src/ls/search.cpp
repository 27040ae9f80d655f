#include "hvrp/ls/search.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "hvrp/core/errors.hpp"
#include "hvrp/ls/operators.hpp"
#include "hvrp/ls/search_state.hpp"

namespace hvrp::ls {

void LSConfig::validate() const {
    if (iterations < 0) throw InvalidInput("iterations must be non-negative");
    if (max_exchange < 1) throw InvalidInput("max_exchange must be at least 1");
    if (granularity < 1) throw InvalidInput("granularity must be at least 1");
    if (time_budget_ms < 0.0) throw InvalidInput("time budget must be non-negative");
    const auto below = [](double fix, double srch) { return !(fix > srch); };
    if (below(fix_weights.capacity, search_weights.capacity) ||
        below(fix_weights.time_window, search_weights.time_window) ||
        below(fix_weights.duration, search_weights.duration))
        throw InvalidInput("fix penalty weights must exceed search weights");
}

bool is_feasible(const Solution& solution, const Instance& instance) {
    return check_feasibility(solution, instance).feasible;
}

namespace {

using NodeOp = std::function<bool(SearchState&, int, int)>;
using RouteOp = std::function<bool(SearchState&, int, int)>;

void run_sweep(SearchState& s, const NeighborLists& nl, Rng& rng, int max_exchange) {
    const Instance& inst = s.instance();
    std::vector<NodeOp> node_ops;
    for (int x = 1; x <= max_exchange; ++x)
        for (int m = 0; m <= x; ++m)
            node_ops.push_back([x, m](SearchState& st, int a, int b) { return op_exchange(st, a, b, x, m).applied; });
    node_ops.push_back([](SearchState& st, int a, int b) { return op_move_two_reversed(st, a, b).applied; });
    node_ops.push_back([](SearchState& st, int a, int b) { return op_two_opt(st, a, b).applied; });
    std::vector<RouteOp> route_ops{
        [](SearchState& st, int i, int j) { return op_relocate_star(st, i, j).applied; },
        [](SearchState& st, int i, int j) { return op_swap_star(st, i, j).applied; },
    };
    std::shuffle(node_ops.begin(), node_ops.end(), rng);
    std::shuffle(route_ops.begin(), route_ops.end(), rng);

    std::vector<int> order;
    for (int c = inst.num_depots(); c < inst.size(); ++c) order.push_back(c);
    std::shuffle(order.begin(), order.end(), rng);

    // Node phase and route phase alternate until the route phase finds nothing.
    for (bool route_improved = true; route_improved;) {
        for (bool improved = true; improved;) {
            improved = false;
            for (int a : order)
                for (int b : nl.of(a))
                    for (const NodeOp& op : node_ops)
                        if (op(s, a, b)) improved = true;
        }
        route_improved = false;
        for (bool improved = true; improved;) {
            improved = false;
            for (int i = 0; i < s.num_routes(); ++i)
                for (int j = i + 1; j < s.num_routes(); ++j)
                    for (const RouteOp& op : route_ops)
                        if (op(s, i, j)) improved = true;
            route_improved = route_improved || improved;
        }
    }
}

}  // namespace

Solution search(const Solution& solution, const Instance& instance, const NeighborLists& neighbors,
                const PenaltyWeights& weights, Rng& rng, int max_exchange) {
    SearchState state(instance, solution, weights);
    run_sweep(state, neighbors, rng, max_exchange);
    return state.solution();
}

namespace {

// Cheapest feasible placement of c: existing route/position or a new route.
void reinsert_feasible(Solution& sol, int c, const Instance& inst) {
    double best = std::numeric_limits<double>::infinity();
    int best_route = -1;
    std::size_t best_pos = 0;
    int best_depot = -1;
    std::vector<int> work;
    for (std::size_t r = 0; r < sol.routes.size(); ++r) {
        const Route& route = sol.routes[r];
        const double old = route_distance(route, inst);
        for (std::size_t p = 0; p <= route.customers.size(); ++p) {
            work = route.customers;
            work.insert(work.begin() + static_cast<std::ptrdiff_t>(p), c);
            const RouteCost rc = evaluate_route(route.depot, work, inst);
            if (!rc.feasible()) continue;
            if (rc.distance - old < best) {
                best = rc.distance - old;
                best_route = static_cast<int>(r);
                best_pos = p;
            }
        }
    }
    if (!inst.variant().tsp_mode) {
        for (int d = 0; d < inst.num_depots(); ++d) {
            const int one[1] = {c};
            const RouteCost rc = evaluate_route(d, one, inst);
            if (rc.feasible() && rc.distance < best) {
                best = rc.distance;
                best_route = -1;
                best_depot = d;
            }
        }
    }
    if (best_route >= 0) {
        auto& cs = sol.routes[static_cast<std::size_t>(best_route)].customers;
        cs.insert(cs.begin() + static_cast<std::ptrdiff_t>(best_pos), c);
    } else if (best_depot >= 0) {
        sol.routes.push_back(Route{best_depot, {c}});
    } else {
        throw InfeasibleError("customer " + std::to_string(c) + " has no feasible placement");
    }
}

}  // namespace

Solution fix(const Solution& solution, const Instance& instance, const NeighborLists& neighbors,
             const LSConfig& config, Rng& rng) {
    Solution out = search(solution, instance, neighbors, config.fix_weights, rng, config.max_exchange);
    if (is_feasible(out, instance)) return out;

    // Eject customers from violating routes, each time removing the one whose
    // removal reduces the violation most, until the route is feasible.
    std::vector<int> ejected;
    for (Route& r : out.routes) {
        while (!r.customers.empty() && !evaluate_route(r, instance).feasible()) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t pick = 0;
            std::vector<int> work;
            for (std::size_t k = 0; k < r.customers.size(); ++k) {
                work = r.customers;
                work.erase(work.begin() + static_cast<std::ptrdiff_t>(k));
                const RouteCost rc = evaluate_route(r.depot, work, instance);
                const double v = rc.violation(config.fix_weights) + rc.distance * 1e-9;
                if (v < best) {
                    best = v;
                    pick = k;
                }
            }
            ejected.push_back(r.customers[pick]);
            r.customers.erase(r.customers.begin() + static_cast<std::ptrdiff_t>(pick));
        }
    }
    out.normalize();
    // Linehaul customers first so backhauls find routes to join.
    std::stable_sort(ejected.begin(), ejected.end(), [&](int a, int b) {
        return !instance.node(a).is_backhaul && instance.node(b).is_backhaul;
    });
    for (int c : ejected) reinsert_feasible(out, c, instance);
    if (!is_feasible(out, instance)) throw InfeasibleError("repair failed to reach a feasible solution");
    return out;
}

Solution make_random(const Instance& inst, Rng& rng) {
    const int m = inst.num_depots();
    std::vector<int> pending;
    for (int c = m; c < inst.size(); ++c) {
        if (!inst.variant().tsp_mode && std::abs(inst.node(c).demand) > inst.capacity())
            throw InfeasibleError("customer " + std::to_string(c) + " demand exceeds capacity");
        pending.push_back(c);
    }
    Solution sol;
    if (inst.variant().tsp_mode) {
        std::shuffle(pending.begin(), pending.end(), rng);
        sol.routes.push_back(Route{0, pending});
        return sol;
    }
    std::uniform_int_distribution<int> pick_depot(0, m - 1);
    Route current{pick_depot(rng), {}};
    std::vector<int> work;
    while (!pending.empty()) {
        std::shuffle(pending.begin(), pending.end(), rng);
        auto it = pending.begin();
        for (; it != pending.end(); ++it) {
            work = current.customers;
            work.push_back(*it);
            if (evaluate_route(current.depot, work, inst).excess_load == 0.0) break;
        }
        if (it == pending.end()) {
            sol.routes.push_back(std::move(current));
            current = Route{pick_depot(rng), {}};
            continue;
        }
        current.customers.push_back(*it);
        pending.erase(it);
    }
    if (!current.customers.empty()) sol.routes.push_back(std::move(current));
    return sol;
}

}  // namespace hvrp::ls
