#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "hvrp/core/cost.hpp"
#include "hvrp/core/errors.hpp"
#include "hvrp/ls/crossover.hpp"
#include "hvrp/ls/local_search.hpp"
#include "hvrp/ls/neighbors.hpp"
#include "hvrp/ls/operators.hpp"
#include "hvrp/ls/search.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace hvrp;
using namespace hvrp::ls;
using support::Customer;

namespace {

const PenaltyWeights kW = PenaltyWeights::uniform(0.1);

Solution solution_of(std::vector<Route> routes) { return Solution{std::move(routes)}; }

// Penalized cost of the current state, recomputed by the oracle.
double oracle_cost(const Instance& inst, const SearchState& s) { return oracle::penalized(inst, s.solution(), 0.1); }

}  // namespace

TEST_CASE("granular neighbours") {
    SUBCASE("two customers list each other") {
        const Instance inst = support::make_instance({{0, 0}}, {{1, 0}, {0, 1}});
        const NeighborLists nl = build_granular_neighbors(inst, 20);
        CHECK(nl.of(1) == std::vector<int>{2});
        CHECK(nl.of(2) == std::vector<int>{1});
        CHECK(nl.of(0).empty());
    }
    SUBCASE("gamma at least n-1 gives the full sorted list, gamma below 1 is rejected") {
        const Instance inst = support::make_instance({{0, 0}}, {{0, 0}, {3, 0}, {1, 0}, {2, 0}});
        CHECK(build_granular_neighbors(inst, 3).of(1) == std::vector<int>{3, 4, 2});
        CHECK(build_granular_neighbors(inst, 50).of(1) == std::vector<int>{3, 4, 2});
        CHECK_THROWS_AS(build_granular_neighbors(inst, 0), InvalidInput);
    }
    SUBCASE("random n=100 matches a sort-all oracle") {
        const Instance inst = support::generated("mdvrp", 100, 11, 3);
        const NeighborLists nl = build_granular_neighbors(inst, 20);
        const int m = inst.num_depots();
        for (int a = m; a < inst.size(); ++a) {
            std::vector<std::pair<double, int>> all;
            for (int b = m; b < inst.size(); ++b)
                if (b != a) all.push_back({oracle::euclid(inst, a, b), b});
            std::sort(all.begin(), all.end());
            std::vector<int> expect;
            for (int k = 0; k < 20; ++k) expect.push_back(all[static_cast<std::size_t>(k)].second);
            REQUIRE(nl.of(a) == expect);
        }
    }
}

TEST_CASE("node operators: examples") {
    SUBCASE("(1,1) swap of mirror-image neighbours has zero delta and is not applied") {
        const Instance inst = support::make_instance({{0, 0}}, {{1, 1}, {1, -1}});
        SearchState s(inst, solution_of({{0, {1, 2}}}), kW);
        const MoveResult r = op_exchange(s, 1, 2, 1, 1);
        CHECK(r.applicable);
        CHECK(r.delta == doctest::Approx(0.0).epsilon(1e-12));
        CHECK_FALSE(r.applied);
    }
    SUBCASE("overlapping segments are inapplicable") {
        const Instance inst = support::make_instance({{0, 0}}, {{1, 0}, {2, 0}, {3, 0}, {4, 0}});
        SearchState s(inst, solution_of({{0, {1, 2, 3, 4}}}), kW);
        CHECK_FALSE(op_exchange(s, 1, 2, 2, 1).applicable);
        CHECK_FALSE(op_exchange(s, 2, 1, 1, 2).applicable);
        CHECK_FALSE(op_exchange(s, 1, 2, 2, 0).applicable);
        CHECK(op_exchange(s, 1, 3, 2, 2).applicable);
    }
    SUBCASE("segments running past the route end are inapplicable") {
        const Instance inst = support::make_instance({{0, 0}}, {{1, 0}, {2, 0}, {3, 0}});
        SearchState s(inst, solution_of({{0, {1, 2}}, {0, {3}}}), kW);
        CHECK_FALSE(op_exchange(s, 2, 3, 2, 1).applicable);
        CHECK_FALSE(op_exchange(s, 1, 3, 1, 2).applicable);
    }
    SUBCASE("reversed pair put back in place on a symmetric pair has zero delta") {
        const Instance inst = support::make_instance({{0, 0}}, {{0, 0}, {1, 1}, {1, -1}});
        SearchState s(inst, solution_of({{0, {1, 2, 3}}}), kW);
        const MoveResult r = op_move_two_reversed(s, 2, 1, ApplyMode::never);
        CHECK(r.applicable);
        CHECK(r.delta == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("pair move needs a successor") {
        const Instance inst = support::make_instance({{0, 0}}, {{1, 0}, {2, 0}, {3, 0}});
        SearchState s(inst, solution_of({{0, {1, 2, 3}}}), kW);
        CHECK_FALSE(op_move_two_reversed(s, 3, 1).applicable);
    }
    SUBCASE("2-opt on a two-customer closed route changes nothing") {
        const Instance inst = support::make_instance({{0, 0}}, {{1, 0}, {0, 2}});
        SearchState s(inst, solution_of({{0, {1, 2}}}), kW);
        const MoveResult r = op_two_opt(s, 1, 2);
        CHECK(r.delta == doctest::Approx(0.0).epsilon(1e-12));
        CHECK_FALSE(r.applied);
    }
    SUBCASE("2-opt on different routes is inapplicable") {
        const Instance inst = support::make_instance({{0, 0}}, {{1, 0}, {0, 2}});
        SearchState s(inst, solution_of({{0, {1}}, {0, {2}}}), kW);
        CHECK_FALSE(op_two_opt(s, 1, 2).applicable);
    }
}

TEST_CASE("2-opt best move equals enumeration of all reversals") {
    const Instance inst = support::make_instance({{0, 0}}, {{1, 1}, {1, 0}, {0, 1}});
    const std::vector<int> seq{1, 2, 3};
    double oracle_best = std::numeric_limits<double>::infinity();
    const double base = oracle::route(inst, 0, seq).distance;
    for (std::size_t i = 0; i < seq.size(); ++i)
        for (std::size_t j = i + 1; j < seq.size(); ++j) {
            std::vector<int> rev = seq;
            std::reverse(rev.begin() + static_cast<std::ptrdiff_t>(i), rev.begin() + static_cast<std::ptrdiff_t>(j) + 1);
            oracle_best = std::min(oracle_best, oracle::route(inst, 0, rev).distance - base);
        }
    double op_best = std::numeric_limits<double>::infinity();
    SearchState s(inst, solution_of({{0, seq}}), kW);
    for (int a : seq)
        for (int b : seq) {
            const MoveResult r = op_two_opt(s, a, b, ApplyMode::never);
            if (r.applicable) op_best = std::min(op_best, r.delta);
        }
    CHECK(op_best == doctest::Approx(oracle_best).epsilon(1e-12));
    CHECK(op_best < 0.0);
    const double before = s.total_cost();
    bool applied = false;
    for (int a : seq)
        for (int b : seq) applied = op_two_opt(s, a, b).applied || applied;
    CHECK(applied);
    CHECK(s.total_cost() < before);
}

TEST_CASE("operator deltas equal full re-evaluation") {
    std::mt19937_64 rng(5);
    int checked[5] = {0, 0, 0, 0, 0};
    int instance_seed = 0;
    while (*std::min_element(checked, checked + 5) < 2000) {
        const std::string& v = support::variant_names()[static_cast<std::size_t>(instance_seed % 6)];
        const int n = instance_seed % 2 == 0 ? 10 : 30;
        const Instance inst = support::generated(v, n, 1000 + static_cast<std::uint64_t>(instance_seed++));
        Rng init_rng(static_cast<std::uint64_t>(instance_seed));
        SearchState s(inst, make_random(inst, init_rng), kW);
        const int m = inst.num_depots();
        std::uniform_int_distribution<int> pick(m, inst.size() - 1);
        for (int trial = 0; trial < 400; ++trial) {
            const int op = trial % 5;
            const double before = oracle_cost(inst, s);
            MoveResult r;
            if (op < 3) {
                const int a = pick(rng), b = pick(rng);
                if (op == 0) {
                    const int x = 1 + static_cast<int>(rng() % 3);
                    const int mm = static_cast<int>(rng() % static_cast<unsigned>(x + 1));
                    r = op_exchange(s, a, b, x, mm, ApplyMode::always);
                } else if (op == 1) {
                    r = op_move_two_reversed(s, a, b, ApplyMode::always);
                } else {
                    r = op_two_opt(s, a, b, ApplyMode::always);
                }
            } else {
                const int i = static_cast<int>(rng() % static_cast<unsigned>(s.num_routes()));
                const int j = static_cast<int>(rng() % static_cast<unsigned>(s.num_routes()));
                r = op == 3 ? op_relocate_star(s, i, j, ApplyMode::always) : op_swap_star(s, i, j, ApplyMode::always);
            }
            if (!r.applicable) continue;
            REQUIRE(r.applied);
            const double after = oracle_cost(inst, s);
            REQUIRE(std::abs((after - before) - r.delta) <= 1e-9);
            REQUIRE(oracle::is_partition(inst, s.solution()));
            ++checked[op];
        }
    }
}

TEST_CASE("RELOCATE* and SWAP*") {
    SUBCASE("equal singleton routes have no improving relocation") {
        const Instance inst = support::make_instance({{0, 0}}, {{1, 0}, {-1, 0}}, 1.0);
        SearchState s(inst, solution_of({{0, {1}}, {0, {2}}}), kW);
        const MoveResult r = op_relocate_star(s, 0, 1);
        CHECK(r.applicable);
        CHECK(r.delta >= 0.0);
        CHECK_FALSE(r.applied);
        const MoveResult w = op_swap_star(s, 0, 1);
        CHECK(w.delta >= -1e-12);
        CHECK_FALSE(w.applied);
    }
    SUBCASE("best moves equal exhaustive enumeration") {
        std::mt19937_64 rng(17);
        for (int trial = 0; trial < 60; ++trial) {
            std::vector<Customer> cs;
            std::uniform_real_distribution<double> u(0.0, 1.0);
            const int n1 = 1 + static_cast<int>(rng() % 6), n2 = 1 + static_cast<int>(rng() % 6);
            for (int k = 0; k < n1 + n2; ++k) cs.push_back({u(rng), u(rng), 1.0 + static_cast<double>(rng() % 5)});
            const Instance inst = support::make_instance({{0.5, 0.5}}, cs, 12.0);
            std::vector<int> r1, r2;
            for (int k = 0; k < n1; ++k) r1.push_back(1 + k);
            for (int k = 0; k < n2; ++k) r2.push_back(1 + n1 + k);
            const auto cost = [&](const std::vector<int>& a, const std::vector<int>& b) {
                return oracle::penalized(inst, solution_of({{0, a}, {0, b}}), 0.1);
            };
            const double base = cost(r1, r2);
            double reloc = std::numeric_limits<double>::infinity();
            for (int dir = 0; dir < 2; ++dir) {
                const auto& src = dir == 0 ? r1 : r2;
                const auto& dst = dir == 0 ? r2 : r1;
                for (std::size_t k = 0; k < src.size(); ++k)
                    for (std::size_t p = 0; p <= dst.size(); ++p) {
                        std::vector<int> a = src, b = dst;
                        a.erase(a.begin() + static_cast<std::ptrdiff_t>(k));
                        b.insert(b.begin() + static_cast<std::ptrdiff_t>(p), src[k]);
                        reloc = std::min(reloc, cost(a, b) - base);
                    }
            }
            double swap = std::numeric_limits<double>::infinity();
            double in_place_best = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < r1.size(); ++k)
                for (std::size_t l = 0; l < r2.size(); ++l) {
                    std::vector<int> a = r1, b = r2;
                    a.erase(a.begin() + static_cast<std::ptrdiff_t>(k));
                    b.erase(b.begin() + static_cast<std::ptrdiff_t>(l));
                    for (std::size_t pu = 0; pu <= b.size(); ++pu)
                        for (std::size_t pv = 0; pv <= a.size(); ++pv) {
                            std::vector<int> aa = a, bb = b;
                            bb.insert(bb.begin() + static_cast<std::ptrdiff_t>(pu), r1[k]);
                            aa.insert(aa.begin() + static_cast<std::ptrdiff_t>(pv), r2[l]);
                            swap = std::min(swap, cost(aa, bb) - base);
                        }
                    std::vector<int> aa = r1, bb = r2;
                    std::swap(aa[k], bb[l]);
                    in_place_best = std::min(in_place_best, cost(aa, bb) - base);
                }
            SearchState s(inst, solution_of({{0, r1}, {0, r2}}), kW);
            const MoveResult rr = op_relocate_star(s, 0, 1, ApplyMode::never);
            const MoveResult sw = op_swap_star(s, 0, 1, ApplyMode::never);
            REQUIRE(rr.delta == doctest::Approx(reloc).epsilon(1e-9));
            REQUIRE(sw.delta == doctest::Approx(swap).epsilon(1e-9));
            REQUIRE(sw.delta <= in_place_best + 1e-12);
            const MoveResult applied = op_relocate_star(s, 0, 1);
            if (applied.applied) CHECK(oracle::is_partition(inst, s.solution()));
        }
    }
    SUBCASE("relocation into a spare route opens a new route") {
        // Two far-apart customers on one route; splitting them is cheaper only
        // if the capacity penalty counts, which it does here.
        const Instance inst = support::make_instance({{0, 0}}, {{1, 0}, {-1, 0}}, 1.0);
        SearchState s(inst, solution_of({{0, {1, 2}}}), PenaltyWeights::uniform(10.0));
        CHECK(s.num_routes() == 2);
        CHECK(op_relocate_star(s, 0, 1).applied);
        CHECK(s.solution().routes.size() == 2);
        CHECK(s.num_routes() == 3);
    }
}

TEST_CASE("search") {
    for (const std::string& v : support::variant_names()) {
        CAPTURE(v);
        const Instance inst = support::generated(v, 20, 77);
        const NeighborLists nl = build_granular_neighbors(inst);
        Rng rng(3);
        const Solution start = make_random(inst, rng);
        const Solution out = search(start, inst, nl, kW, rng);
        CHECK(oracle::is_partition(inst, out));
        CHECK(oracle::penalized(inst, out, 0.1) <= oracle::penalized(inst, start, 0.1) + 1e-9);
        Rng again(99);
        const Solution twice = search(out, inst, nl, kW, again);
        CHECK(twice == out);
    }
}

TEST_CASE("search is no worse than the best single move on small single routes") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 3 + trial % 5;
        std::vector<Customer> cs;
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int k = 0; k < n; ++k) cs.push_back({u(rng), u(rng), 1.0});
        const Instance inst = support::make_instance({{0.5, 0.5}}, cs, 100.0);
        std::vector<int> seq;
        for (int k = 1; k <= n; ++k) seq.push_back(k);
        std::shuffle(seq.begin(), seq.end(), rng);
        const Solution start = solution_of({{0, seq}});
        SearchState probe(inst, start, kW);
        double best_single = 0.0;
        for (int a = 1; a <= n; ++a)
            for (int b = 1; b <= n; ++b) {
                for (int x = 1; x <= 3; ++x)
                    for (int m = 0; m <= x; ++m) best_single = std::min(best_single, op_exchange(probe, a, b, x, m, ApplyMode::never).delta);
                best_single = std::min(best_single, op_move_two_reversed(probe, a, b, ApplyMode::never).delta);
                best_single = std::min(best_single, op_two_opt(probe, a, b, ApplyMode::never).delta);
            }
        for (int i = 0; i < probe.num_routes(); ++i)
            for (int j = i + 1; j < probe.num_routes(); ++j) {
                best_single = std::min(best_single, op_relocate_star(probe, i, j, ApplyMode::never).delta);
                best_single = std::min(best_single, op_swap_star(probe, i, j, ApplyMode::never).delta);
            }
        Rng srng(static_cast<std::uint64_t>(trial));
        const Solution out = search(start, inst, build_granular_neighbors(inst), kW, srng);
        const double start_cost = oracle::penalized(inst, start, 0.1);
        CHECK(oracle::penalized(inst, out, 0.1) <= start_cost + best_single + 1e-9);
    }
}

TEST_CASE("fix") {
    LSConfig cfg;
    SUBCASE("feasible input stays feasible and does not get worse") {
        const Instance inst = support::generated("cvrp", 20, 5);
        Rng rng(1);
        const Solution start = make_random(inst, rng);
        REQUIRE(is_feasible(start, inst));
        const Solution out = fix(start, inst, build_granular_neighbors(inst), cfg, rng);
        CHECK(is_feasible(out, inst));
        CHECK(oracle::distance(inst, out) <= oracle::distance(inst, start) + 1e-9);
    }
    SUBCASE("an overloaded route is repaired") {
        // Route 1 carries Q+1; moving customer 3 to route 2 is feasible.
        const Instance inst =
            support::make_instance({{0, 0}}, {{1, 0, 5}, {1, 0.1, 5}, {0.5, 0.5, 1}, {-1, 0, 2}}, 10.0);
        const Solution start = solution_of({{0, {1, 2, 3}}, {0, {4}}});
        REQUIRE_FALSE(oracle::feasible(inst, start));
        Rng rng(2);
        const Solution out = fix(start, inst, build_granular_neighbors(inst), cfg, rng);
        CHECK(oracle::feasible(inst, out));
    }
    SUBCASE("a demand above capacity is a hard infeasibility") {
        const Instance inst = support::make_instance({{0, 0}}, {{1, 0, 11}, {0, 1, 1}}, 10.0);
        Rng rng(3);
        const Solution start = solution_of({{0, {1}}, {0, {2}}});
        CHECK_THROWS_AS(fix(start, inst, build_granular_neighbors(inst), cfg, rng), InfeasibleError);
        CHECK_THROWS_AS(make_random(inst, rng), InfeasibleError);
    }
    SUBCASE("time-window and duration violations are repaired") {
        for (const char* v : {"vrptw", "vrpl", "vrpb"}) {
            CAPTURE(v);
            const Instance inst = support::generated(v, 20, 8);
            Solution one;
            Route all{0, {}};
            for (int c = inst.num_depots(); c < inst.size(); ++c) all.customers.push_back(c);
            one.routes.push_back(all);
            Rng rng(4);
            const Solution out = fix(one, inst, build_granular_neighbors(inst), cfg, rng);
            CHECK(is_feasible(out, inst));
            CHECK(oracle::feasible(inst, out));
        }
    }
}

TEST_CASE("make_random") {
    SUBCASE("single customer") {
        const Instance inst = support::make_instance({{0, 0}}, {{1, 1, 3}}, 10.0);
        Rng rng(1);
        const Solution s = make_random(inst, rng);
        REQUIRE(s.routes.size() == 1);
        CHECK(s.routes[0].customers == std::vector<int>{1});
    }
    SUBCASE("capacity is always respected") {
        for (std::uint64_t seed = 0; seed < 60; ++seed) {
            const Instance inst = support::generated(support::variant_names()[seed % 7], 30, seed, 3);
            Rng rng(seed);
            const Solution s = make_random(inst, rng);
            REQUIRE(oracle::is_partition(inst, s));
            for (const Route& r : s.routes) REQUIRE(oracle::route(inst, r.depot, r.customers).excess_load == 0.0);
        }
    }
    SUBCASE("every customer gets to open a route") {
        const Instance inst = support::make_instance({{0, 0}}, {{1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}}, 100.0);
        std::set<int> firsts;
        for (std::uint64_t seed = 0; seed < 1000; ++seed) {
            Rng rng(seed);
            firsts.insert(make_random(inst, rng).routes.front().customers.front());
        }
        CHECK(firsts.size() == 5);
    }
}

TEST_CASE("SREX") {
    SUBCASE("identical parents with matching subsets reproduce the parent") {
        const Instance inst = support::generated("mdvrp", 30, 4, 3);
        Rng rng(8);
        const Solution p = make_random(inst, rng);
        const std::vector<int> subset{0, static_cast<int>(p.routes.size()) - 1};
        const SrexOutcome out = srex_with_subsets(p, p, subset, subset, inst, kW, rng);
        CHECK(out.offspring_cost == doctest::Approx(evaluate_solution(p, inst, kW).penalized).epsilon(1e-12));
    }
    SUBCASE("offspring construction on a hand example") {
        // P_A = {[1,2],[3,4]}, P_B = {[1,3],[2,4]}, S_A = {0}, S_B = {0}.
        const Instance inst = support::make_instance({{0, 0}}, {{1, 0}, {1, 1}, {0, 1}, {-1, 0}}, 100.0);
        const Solution pa = solution_of({{0, {1, 2}}, {0, {3, 4}}});
        const Solution pb = solution_of({{0, {1, 3}}, {0, {2, 4}}});
        Rng rng(1);
        const SrexOutcome out = srex_with_subsets(pa, pb, {0}, {0}, inst, kW, rng);
        const auto without2 = [](Solution s) {
            for (Route& r : s.routes) std::erase(r.customers, 2);
            s.normalize();
            std::set<std::vector<int>> routes;
            for (const Route& r : s.routes) routes.insert(r.customers);
            return routes;
        };
        const std::set<std::vector<int>> os1{{4}, {1, 3}}, os2{{3, 4}, {1}};
        const auto a = without2(out.offspring), b = without2(out.discarded);
        CHECK(((a == os1 && b == os2) || (a == os2 && b == os1)));
        CHECK(out.offspring_cost <= out.discarded_cost);
    }
    SUBCASE("fuzz: partition and step-8 ordering") {
        for (int trial = 0; trial < 2000; ++trial) {
            const std::string& v = support::variant_names()[static_cast<std::size_t>(trial % 6)];
            const Instance inst = support::generated(v, 10 + trial % 21, static_cast<std::uint64_t>(trial), 3);
            Rng rng(static_cast<std::uint64_t>(trial));
            const Solution pa = make_random(inst, rng), pb = make_random(inst, rng);
            const SrexOutcome out = srex_detailed(pa, pb, inst, kW, rng);
            REQUIRE(oracle::is_partition(inst, out.offspring));
            REQUIRE(oracle::is_partition(inst, out.discarded));
            REQUIRE(out.offspring_cost <= out.discarded_cost);
            REQUIRE(out.offspring_cost == doctest::Approx(oracle::penalized(inst, out.offspring, 0.1)).epsilon(1e-9));
        }
    }
}

namespace {

// Direct simulation of the order-crossover fill rule.
std::vector<int> ox_oracle(const std::vector<int>& a, const std::vector<int>& b, int start, int len) {
    const int n = static_cast<int>(a.size());
    std::vector<int> child(static_cast<std::size_t>(n), -1);
    std::set<int> used;
    for (int k = 0; k < len; ++k) {
        const int p = (start + k) % n;
        child[static_cast<std::size_t>(p)] = a[static_cast<std::size_t>(p)];
        used.insert(a[static_cast<std::size_t>(p)]);
    }
    std::vector<int> donors;
    for (int k = 0; k < n; ++k) {
        const int v = b[static_cast<std::size_t>((start + len + k) % n)];
        if (!used.count(v)) donors.push_back(v);
    }
    std::size_t next = 0;
    for (int k = 0; k < n; ++k) {
        const int p = (start + len + k) % n;
        if (child[static_cast<std::size_t>(p)] == -1) child[static_cast<std::size_t>(p)] = donors[next++];
    }
    return child;
}

}  // namespace

TEST_CASE("order crossover") {
    const std::vector<int> a{1, 2, 3, 4, 5, 6, 7}, b{4, 6, 1, 7, 2, 5, 3};
    CHECK(ox_crossover(a, b, 0, 7) == a);
    CHECK(ox_crossover(a, b, 3, 7) == a);
    CHECK(ox_crossover(a, b, 2, 0) == ox_oracle(a, b, 2, 0));
    CHECK(ox_crossover(a, b, 2, 0) == b);
    std::mt19937_64 rng(4);
    for (int t = 0; t < 500; ++t) {
        std::vector<int> pa(12), pb;
        std::iota(pa.begin(), pa.end(), 1);
        std::shuffle(pa.begin(), pa.end(), rng);
        pb = pa;
        std::shuffle(pb.begin(), pb.end(), rng);
        const int start = static_cast<int>(rng() % 12), len = static_cast<int>(rng() % 13);
        const std::vector<int> child = ox_crossover(pa, pb, start, len);
        REQUIRE(child == ox_oracle(pa, pb, start, len));
        std::vector<int> sorted = child;
        std::sort(sorted.begin(), sorted.end());
        std::vector<int> expect(12);
        std::iota(expect.begin(), expect.end(), 1);
        REQUIRE(sorted == expect);
    }
    CHECK_THROWS_AS(ox_crossover(std::vector<int>{1, 2, 3}, std::vector<int>{1, 2, 4}, 0, 1), InvalidInput);
    const Instance tsp = support::generated("tsp", 15, 2);
    Rng r(5);
    const Solution t1 = make_random(tsp, r), t2 = make_random(tsp, r);
    for (int k = 0; k < 50; ++k) CHECK(oracle::is_partition(tsp, ox_crossover(t1, t2, r)));
}

TEST_CASE("run_local_search") {
    SUBCASE("zero iterations keep the better of the start and its refinement") {
        for (const std::string& v : support::variant_names()) {
            CAPTURE(v);
            const Instance inst = support::generated(v, 20, 31);
            Rng rng(9);
            const Solution init = make_random(inst, rng);
            LSConfig cfg;
            cfg.iterations = 0;
            cfg.seed = 42;
            const LSResult res = run_local_search(init, inst, cfg);
            Rng replay(42);
            const NeighborLists nl = build_granular_neighbors(inst);
            Solution t = search(init, inst, nl, cfg.search_weights, replay);
            if (!is_feasible(t, inst)) t = fix(t, inst, nl, cfg, replay);
            double expect = oracle::distance(inst, t);
            if (is_feasible(init, inst)) expect = std::min(expect, oracle::distance(inst, init));
            CHECK(res.cost == doctest::Approx(expect).epsilon(1e-12));
            CHECK(res.trace.size() == 1);
        }
    }
    SUBCASE("trace is non-increasing and the result feasible and no worse than a feasible start") {
        for (int seed = 0; seed < 14; ++seed) {
            const Instance inst = support::generated(support::variant_names()[static_cast<std::size_t>(seed % 7)], 20,
                                                     static_cast<std::uint64_t>(seed));
            Rng rng(static_cast<std::uint64_t>(seed));
            const Solution init = make_random(inst, rng);
            LSConfig cfg;
            cfg.iterations = 10;
            cfg.seed = static_cast<std::uint64_t>(seed);
            const LSResult res = run_local_search(init, inst, cfg);
            CHECK(res.trace.size() == 11);
            for (std::size_t k = 1; k < res.trace.size(); ++k)
                CHECK(res.trace[k].best_cost <= res.trace[k - 1].best_cost);
            CHECK(oracle::feasible(inst, res.best));
            CHECK(res.cost == doctest::Approx(oracle::distance(inst, res.best)).epsilon(1e-12));
            if (oracle::feasible(inst, init)) CHECK(res.cost <= oracle::distance(inst, init) + 1e-9);
        }
    }
    SUBCASE("tiny CVRPs reach the exhaustive optimum") {
        int hits = 0;
        const int total = 30;
        for (int seed = 0; seed < total; ++seed) {
            hvrp::GenConfig g;
            g.n = 5 + seed % 4;
            g.seed = 500 + static_cast<std::uint64_t>(seed);
            g.capacity = 15;
            const Instance inst = generate_instance(g);
            Rng rng(static_cast<std::uint64_t>(seed));
            LSConfig cfg;
            cfg.seed = static_cast<std::uint64_t>(seed);
            const LSResult res = run_local_search(make_random(inst, rng), inst, cfg);
            if (res.cost <= oracle::brute_force_cvrp(inst) + 1e-9) ++hits;
        }
        CHECK(hits >= total * 9 / 10);
    }
    SUBCASE("a time budget stops the loop early") {
        const Instance inst = support::generated("cvrp", 50, 3);
        Rng rng(1);
        LSConfig cfg;
        cfg.iterations = 100000;
        cfg.time_budget_ms = 50;
        const LSResult res = run_local_search(make_random(inst, rng), inst, cfg);
        CHECK(res.iterations_completed < cfg.iterations);
        CHECK(oracle::feasible(inst, res.best));
    }
    SUBCASE("trace CSV") {
        std::ostringstream out;
        write_trace_csv(out, {{0, 3.5, 1.0}, {1, 3.25, 2.0}});
        CHECK(out.str() == "iteration,best_cost,wall_clock_ms\n0,3.5,1\n1,3.25,2\n");
    }
    SUBCASE("bad configs are rejected") {
        LSConfig cfg;
        cfg.iterations = -1;
        CHECK_THROWS_AS(cfg.validate(), InvalidInput);
        cfg = LSConfig{};
        cfg.fix_weights = PenaltyWeights::uniform(0.01);
        CHECK_THROWS_AS(cfg.validate(), InvalidInput);
    }
}
