#include "hvrp/ls/crossover.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "hvrp/core/errors.hpp"

namespace hvrp::ls {

namespace {

std::vector<int> random_subset(int count, Rng& rng) {
    std::vector<int> idx(static_cast<std::size_t>(count));
    std::iota(idx.begin(), idx.end(), 0);
    if (count == 0) return idx;
    std::uniform_int_distribution<int> size_dist(1, (count + 1) / 2);
    const int k = size_dist(rng);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(static_cast<std::size_t>(k));
    std::sort(idx.begin(), idx.end());
    return idx;
}

void insert_least_cost(Solution& sol, int c, const Instance& inst, const PenaltyWeights& w) {
    double best = std::numeric_limits<double>::infinity();
    int best_route = -1;
    std::size_t best_pos = 0;
    std::vector<int> work;
    for (std::size_t r = 0; r < sol.routes.size(); ++r) {
        const Route& route = sol.routes[r];
        const double old = evaluate_route(route, inst).penalized(w);
        for (std::size_t p = 0; p <= route.customers.size(); ++p) {
            work = route.customers;
            work.insert(work.begin() + static_cast<std::ptrdiff_t>(p), c);
            const double d = evaluate_route(route.depot, work, inst).penalized(w) - old;
            if (d < best) {
                best = d;
                best_route = static_cast<int>(r);
                best_pos = p;
            }
        }
    }
    if (!inst.variant().tsp_mode) {
        int depot = 0;
        for (int d = 1; d < inst.num_depots(); ++d)
            if (inst.dist(d, c) < inst.dist(depot, c)) depot = d;
        const int one[1] = {c};
        if (evaluate_route(depot, one, inst).penalized(w) < best) {
            sol.routes.push_back(Route{depot, {c}});
            return;
        }
    }
    if (best_route < 0) throw InvalidInput("no insertion point for customer");
    auto& cs = sol.routes[static_cast<std::size_t>(best_route)].customers;
    cs.insert(cs.begin() + static_cast<std::ptrdiff_t>(best_pos), c);
}

}  // namespace

SrexOutcome srex_with_subsets(const Solution& pa, const Solution& pb, const std::vector<int>& subset_a,
                              const std::vector<int>& subset_b, const Instance& inst, const PenaltyWeights& w,
                              Rng& rng) {
    check_structure(pa, inst);
    check_structure(pb, inst);
    const auto n = static_cast<std::size_t>(inst.size());
    std::vector<char> in_sa(n, 0), in_sb(n, 0), route_in_sa(pa.routes.size(), 0);
    for (int r : subset_a) {
        if (r < 0 || r >= static_cast<int>(pa.routes.size())) throw InvalidInput("route subset index out of range");
        route_in_sa[static_cast<std::size_t>(r)] = 1;
        for (int c : pa.routes[static_cast<std::size_t>(r)].customers) in_sa[static_cast<std::size_t>(c)] = 1;
    }
    for (int r : subset_b) {
        if (r < 0 || r >= static_cast<int>(pb.routes.size())) throw InvalidInput("route subset index out of range");
        for (int c : pb.routes[static_cast<std::size_t>(r)].customers) in_sb[static_cast<std::size_t>(c)] = 1;
    }

    Solution os1, os2;
    for (std::size_t r = 0; r < pa.routes.size(); ++r) {
        if (route_in_sa[r]) continue;
        const Route& route = pa.routes[r];
        os2.routes.push_back(route);
        Route trimmed{route.depot, {}};
        for (int c : route.customers)
            if (!in_sb[static_cast<std::size_t>(c)]) trimmed.customers.push_back(c);
        os1.routes.push_back(std::move(trimmed));
    }
    for (int r : subset_b) {
        const Route& route = pb.routes[static_cast<std::size_t>(r)];
        os1.routes.push_back(route);
        Route trimmed{route.depot, {}};
        for (int c : route.customers)
            if (in_sa[static_cast<std::size_t>(c)]) trimmed.customers.push_back(c);
        os2.routes.push_back(std::move(trimmed));
    }
    os1.normalize();
    os2.normalize();

    // Customers of S_A that S_B does not cover are unserved in both offspring.
    std::vector<int> unserved;
    for (int c = inst.num_depots(); c < inst.size(); ++c)
        if (in_sa[static_cast<std::size_t>(c)] && !in_sb[static_cast<std::size_t>(c)]) unserved.push_back(c);
    std::shuffle(unserved.begin(), unserved.end(), rng);
    for (int c : unserved) {
        insert_least_cost(os1, c, inst, w);
        insert_least_cost(os2, c, inst, w);
    }

    const double c1 = evaluate_solution(os1, inst, w).penalized;
    const double c2 = evaluate_solution(os2, inst, w).penalized;
    if (c2 < c1) return {std::move(os2), c2, std::move(os1), c1};
    return {std::move(os1), c1, std::move(os2), c2};
}

SrexOutcome srex_detailed(const Solution& pa, const Solution& pb, const Instance& inst, const PenaltyWeights& w,
                          Rng& rng) {
    Solution a = pa, b = pb;
    a.normalize();
    b.normalize();
    const std::vector<int> sa = random_subset(static_cast<int>(a.routes.size()), rng);
    const std::vector<int> sb = random_subset(static_cast<int>(b.routes.size()), rng);
    return srex_with_subsets(a, b, sa, sb, inst, w, rng);
}

Solution srex_crossover(const Solution& pa, const Solution& pb, const Instance& inst, const PenaltyWeights& w,
                        Rng& rng) {
    return srex_detailed(pa, pb, inst, w, rng).offspring;
}

std::vector<int> ox_crossover(const std::vector<int>& pa, const std::vector<int>& pb, int start, int length) {
    const int n = static_cast<int>(pa.size());
    {
        std::vector<int> sa = pa, sb = pb;
        std::sort(sa.begin(), sa.end());
        std::sort(sb.begin(), sb.end());
        if (sa != sb || std::adjacent_find(sa.begin(), sa.end()) != sa.end())
            throw InvalidInput("order crossover parents must be permutations of the same nodes");
    }
    if (n == 0) return {};
    if (start < 0 || start >= n || length < 0 || length > n) throw InvalidInput("order crossover segment out of range");

    std::vector<int> child(static_cast<std::size_t>(n), -1);
    std::vector<int> taken;
    for (int k = 0; k < length; ++k) {
        const int pos = (start + k) % n;
        child[static_cast<std::size_t>(pos)] = pa[static_cast<std::size_t>(pos)];
        taken.push_back(pa[static_cast<std::size_t>(pos)]);
    }
    std::sort(taken.begin(), taken.end());
    const int end = (start + length) % n;
    int write = end;
    for (int k = 0; k < n; ++k) {
        const int v = pb[static_cast<std::size_t>((end + k) % n)];
        if (std::binary_search(taken.begin(), taken.end(), v)) continue;
        while (child[static_cast<std::size_t>(write)] != -1) write = (write + 1) % n;
        child[static_cast<std::size_t>(write)] = v;
    }
    return child;
}

Solution ox_crossover(const Solution& pa, const Solution& pb, Rng& rng) {
    if (pa.routes.size() != 1 || pb.routes.size() != 1)
        throw InvalidInput("order crossover needs single-route tours");
    const auto& a = pa.routes.front().customers;
    const auto& b = pb.routes.front().customers;
    const int n = static_cast<int>(a.size());
    if (n < 2) return pa;
    std::uniform_int_distribution<int> start_dist(0, n - 1), len_dist(1, n - 1);
    const int start = start_dist(rng);
    const int length = len_dist(rng);
    Solution child;
    child.routes.push_back(Route{pa.routes.front().depot, ox_crossover(a, b, start, length)});
    return child;
}

}  // namespace hvrp::ls
