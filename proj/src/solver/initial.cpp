#include "hvrp/solver/initial.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hvrp/core/cost.hpp"
#include "hvrp/core/errors.hpp"

namespace hvrp::solver {

Solution greedy_initial(const Instance& inst) {
    const int m = inst.num_depots();
    const int g = inst.size();
    const bool tsp = inst.variant().tsp_mode;
    const bool vrpb = inst.variant().backhaul;
    std::vector<char> visited(static_cast<std::size_t>(g), 0);
    int remaining = inst.num_customers();
    int linehauls_left = 0;
    for (int c = m; c < g; ++c) {
        if (!tsp && std::abs(inst.node(c).demand) > inst.capacity())
            throw InfeasibleError("customer " + std::to_string(c) + " demand exceeds capacity");
        if (!inst.node(c).is_backhaul) ++linehauls_left;
    }

    Solution sol;
    std::vector<int> work;
    const auto fits = [&](const Route& r, bool has_backhaul, int c) {
        if (tsp) return true;
        if (vrpb) {
            const bool back = inst.node(c).is_backhaul;
            if (back && r.customers.empty() && linehauls_left > 0) return false;
            if (!back && has_backhaul) return false;
        }
        work = r.customers;
        work.push_back(c);
        return evaluate_route(r.depot, work, inst).excess_load == 0.0;
    };

    while (remaining > 0) {
        // Depot closest to any eligible unvisited customer.
        int depot = 0;
        double best = std::numeric_limits<double>::infinity();
        for (int c = m; c < g; ++c) {
            if (visited[static_cast<std::size_t>(c)]) continue;
            if (vrpb && inst.node(c).is_backhaul && linehauls_left > 0) continue;
            for (int d = 0; d < m; ++d)
                if (inst.dist(d, c) < best) {
                    best = inst.dist(d, c);
                    depot = d;
                }
        }
        Route route{depot, {}};
        bool has_backhaul = false;
        int cur = depot;
        for (;;) {
            int next = -1;
            double nd = std::numeric_limits<double>::infinity();
            for (int c = m; c < g; ++c) {
                if (visited[static_cast<std::size_t>(c)] || inst.dist(cur, c) >= nd) continue;
                if (!fits(route, has_backhaul, c)) continue;
                nd = inst.dist(cur, c);
                next = c;
            }
            if (next < 0) break;
            route.customers.push_back(next);
            visited[static_cast<std::size_t>(next)] = 1;
            --remaining;
            if (inst.node(next).is_backhaul) has_backhaul = true;
            else --linehauls_left;
            cur = next;
        }
        if (route.customers.empty()) throw InfeasibleError("no customer fits an empty route");
        sol.routes.push_back(std::move(route));
    }
    return sol;
}

}  // namespace hvrp::solver
