#include "hvrp/nn/environment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hvrp/core/cost.hpp"
#include "hvrp/core/errors.hpp"

namespace hvrp::nn {

namespace {

bool within(double value, double limit) {
    return value - limit <= kFeasibilityTolerance * std::max(1.0, std::abs(limit));
}

}  // namespace

Environment::Environment(const Instance& instance, double length_scale)
    : inst_(&instance), length_scale_(length_scale > 0.0 ? length_scale : 1.0) {}

RolloutState Environment::initial_state() const {
    RolloutState s;
    s.visited.assign(static_cast<std::size_t>(inst_->size()), 0);
    s.unvisited = inst_->num_customers();
    return s;
}

bool Environment::can_append(const RolloutState& s, int c) const {
    const Instance& in = *inst_;
    if (s.visited[static_cast<std::size_t>(c)]) return false;
    const VariantFlags& v = in.variant();
    if (v.tsp_mode) return true;
    const Node& n = in.node(c);
    const double q = in.capacity();
    if (n.is_backhaul) {
        if (s.route_size == 0) return false;
        if (!within(s.backhaul_load + n.demand, q)) return false;
    } else if (!within(s.peak_load + n.demand, q)) {
        return false;
    }
    const bool closed = !v.open_routes;
    const int d = s.route_depot;
    const double leg = in.dist(s.current, c);
    if (v.duration_limit) {
        const double total = s.length + leg + s.service_total + n.service_time + (closed ? in.dist(c, d) : 0.0);
        if (!within(total, in.route_limit())) return false;
    }
    if (v.time_windows) {
        const double start = std::max(s.clock + leg, n.tw_early);
        if (!within(start, n.tw_late)) return false;
        if (closed && !within(start + n.service_time + in.dist(c, d), in.node(d).tw_late)) return false;
    }
    return true;
}

namespace {

void open_route(const Instance& in, RolloutState& s, int depot) {
    s.phase = Phase::extend_route;
    s.route_depot = depot;
    s.current = depot;
    s.linehaul_load = 0.0;
    s.backhaul_load = 0.0;
    s.peak_load = 0.0;
    s.clock = in.variant().time_windows ? in.node(depot).tw_early : 0.0;
    s.length = 0.0;
    s.service_total = 0.0;
    s.route_size = 0;
    s.partial.routes.push_back(Route{depot, {}});
}

void append(const Instance& in, RolloutState& s, int c) {
    const Node& n = in.node(c);
    const double leg = in.dist(s.current, c);
    s.length += leg;
    if (in.variant().time_windows)
        s.clock = std::max(s.clock + leg, n.tw_early) + n.service_time;
    else
        s.clock += leg + n.service_time;
    if (n.is_backhaul) {
        s.backhaul_load += n.demand;
        s.peak_load = std::max(s.peak_load, s.backhaul_load);
    } else {
        s.linehaul_load += n.demand;
        s.peak_load += n.demand;
    }
    s.service_total += n.service_time;
    s.visited[static_cast<std::size_t>(c)] = 1;
    --s.unvisited;
    ++s.route_size;
    s.current = c;
    s.partial.routes.back().customers.push_back(c);
}

}  // namespace

bool Environment::can_open(int depot, int c) const {
    RolloutState s = initial_state();
    open_route(*inst_, s, depot);
    return can_append(s, c);
}

namespace {

struct Reserve {
    int linehauls = 0;
    int backhauls = 0;
};

Reserve unvisited_counts(const Instance& in, const RolloutState& s) {
    Reserve r;
    for (int c = in.num_depots(); c < in.size(); ++c)
        if (!s.visited[static_cast<std::size_t>(c)]) (in.node(c).is_backhaul ? r.backhauls : r.linehauls)++;
    return r;
}

}  // namespace

// Routes must open with a linehaul customer, so once the last linehaul is
// served every remaining backhaul has to fit on the active route. A move that
// consumes the last linehaul is admitted only when a nearest-first witness
// order appends all remaining backhauls.
namespace {

bool backhauls_fit(const Environment& env, RolloutState s) {
    const Instance& in = env.instance();
    while (s.unvisited > 0) {
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int c = in.num_depots(); c < in.size(); ++c) {
            if (s.visited[static_cast<std::size_t>(c)]) continue;
            if (!in.node(c).is_backhaul) return true;  // a linehaul is still available
            if (!env.can_append(s, c)) continue;
            const double d = in.dist(s.current, c);
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        if (best < 0) return false;
        append(in, s, best);
    }
    return true;
}

}  // namespace

void Environment::mask(const RolloutState& s, std::span<std::uint8_t> out) const {
    const Instance& in = *inst_;
    if (out.size() != static_cast<std::size_t>(in.size())) throw ContractViolation("mask buffer has wrong size");
    std::fill(out.begin(), out.end(), std::uint8_t{0});
    const bool vrpb = in.variant().backhaul;
    const Reserve left = vrpb ? unvisited_counts(in, s) : Reserve{};

    auto admissible = [&](const RolloutState& st, int c) {
        if (!can_append(st, c)) return false;
        if (!vrpb || left.backhauls == 0) return true;
        const bool last_linehaul = !in.node(c).is_backhaul && left.linehauls == 1;
        const bool no_linehaul = left.linehauls == 0;
        if (!last_linehaul && !no_linehaul) return true;
        RolloutState next = st;
        append(in, next, c);
        return backhauls_fit(*this, std::move(next));
    };

    bool any = false;
    if (s.phase == Phase::select_depot) {
        if (s.unvisited == 0) throw ContractViolation("mask requested for a finished trajectory");
        for (int d = 0; d < in.num_depots(); ++d) {
            RolloutState fresh = s;
            fresh.partial.routes.clear();
            open_route(in, fresh, d);
            for (int c = in.num_depots(); c < in.size(); ++c)
                if (admissible(fresh, c)) {
                    out[static_cast<std::size_t>(d)] = 1;
                    any = true;
                    break;
                }
        }
        if (!any) throw InfeasibleError("no depot can open a route for the remaining customers");
        return;
    }

    for (int c = in.num_depots(); c < in.size(); ++c)
        if (admissible(s, c)) {
            out[static_cast<std::size_t>(c)] = 1;
            any = true;
        }
    bool close = s.route_size > 0;
    if (in.variant().tsp_mode) close = close && s.unvisited == 0;
    if (close && vrpb && left.backhauls > 0 && left.linehauls == 0) close = false;
    if (close) {
        out[static_cast<std::size_t>(s.route_depot)] = 1;
        any = true;
    }
    if (!any) throw InfeasibleError("route construction reached a state with no admissible action");
}

std::vector<std::uint8_t> Environment::mask(const RolloutState& s) const {
    std::vector<std::uint8_t> m(static_cast<std::size_t>(inst_->size()));
    mask(s, m);
    return m;
}

void Environment::advance(RolloutState& s, int action) const {
    const auto m = mask(s);
    advance(s, action, m);
}

void Environment::advance(RolloutState& s, int action, std::span<const std::uint8_t> m) const {
    const Instance& in = *inst_;
    if (action < 0 || action >= in.size() || m.size() != static_cast<std::size_t>(in.size()))
        throw ContractViolation("action index out of range");
    if (!m[static_cast<std::size_t>(action)])
        throw ContractViolation("action " + std::to_string(action) + " is masked");
    ++s.steps;
    if (s.phase == Phase::select_depot) {
        open_route(in, s, action);
    } else if (in.is_depot(action)) {
        s.phase = Phase::select_depot;
        s.current = action;
    } else {
        append(in, s, action);
    }
}

std::array<double, 4> Environment::dynamic_features(const RolloutState& s) const {
    const Instance& in = *inst_;
    const VariantFlags& v = in.variant();
    if (v.tsp_mode) return {0.0, 0.0, 0.0, 0.0};
    const bool active = s.phase == Phase::extend_route;
    const double remaining = active ? (in.capacity() - s.peak_load) / in.capacity() : 1.0;
    double clock = 0.0;
    if (v.time_windows && active) {
        const double h = in.node(s.route_depot).tw_late;
        clock = h > 0.0 ? s.clock / h : 0.0;
    }
    const double length = active ? s.length / length_scale_ : 0.0;
    return {remaining, clock, length, v.open_routes ? 1.0 : 0.0};
}

Solution trajectory_to_solution(std::span<const int> actions, const Instance& instance) {
    Solution sol;
    bool open = false;
    for (std::size_t i = 0; i < actions.size(); ++i) {
        const int a = actions[i];
        if (instance.is_depot(a)) {
            if (!open) {
                sol.routes.push_back(Route{a, {}});
                open = true;
            } else {
                if (a != sol.routes.back().depot)
                    throw StructureError("step " + std::to_string(i) + ": route closed at a different depot");
                open = false;
            }
        } else if (instance.is_customer(a)) {
            if (!open) throw StructureError("step " + std::to_string(i) + ": customer outside a route");
            sol.routes.back().customers.push_back(a);
        } else {
            throw StructureError("step " + std::to_string(i) + ": node index out of range");
        }
    }
    if (open) throw StructureError("trajectory ends with an open route");
    sol.normalize();
    check_structure(sol, instance);
    return sol;
}

}  // namespace hvrp::nn
