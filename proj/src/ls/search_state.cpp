#include "hvrp/ls/search_state.hpp"

#include "hvrp/core/errors.hpp"

namespace hvrp::ls {

SearchState::SearchState(const Instance& instance, Solution solution, const PenaltyWeights& weights)
    : inst_(&instance), w_(weights) {
    check_structure(solution, instance);
    route_of_.assign(static_cast<std::size_t>(instance.size()), -1);
    pos_of_.assign(static_cast<std::size_t>(instance.size()), -1);
    for (Route& r : solution.routes)
        if (!r.customers.empty()) routes_.push_back(std::move(r));
    cost_.resize(routes_.size());
    for (int r = 0; r < num_routes(); ++r) index_route(r);
    // TSP keeps its single tour; other variants get a spare route per depot.
    if (!instance.variant().tsp_mode)
        for (int d = 0; d < instance.num_depots(); ++d) ensure_spare(d);
}

double SearchState::total_cost() const {
    double s = 0.0;
    for (double c : cost_) s += c;
    return s;
}

double SearchState::evaluate(int depot, std::span<const int> customers) const {
    return evaluate_route(depot, customers, *inst_).penalized(w_);
}

void SearchState::index_route(int r) {
    const Route& route = routes_[static_cast<std::size_t>(r)];
    for (std::size_t i = 0; i < route.customers.size(); ++i) {
        route_of_[static_cast<std::size_t>(route.customers[i])] = r;
        pos_of_[static_cast<std::size_t>(route.customers[i])] = static_cast<int>(i);
    }
    cost_[static_cast<std::size_t>(r)] = evaluate(route.depot, route.customers);
}

void SearchState::ensure_spare(int depot) {
    for (const Route& r : routes_)
        if (r.depot == depot && r.customers.empty()) return;
    routes_.push_back(Route{depot, {}});
    cost_.push_back(0.0);
}

void SearchState::set_route(int r, std::vector<int> customers) {
    Route& route = routes_[static_cast<std::size_t>(r)];
    const bool was_empty = route.customers.empty();
    route.customers = std::move(customers);
    index_route(r);
    if (was_empty && !route.customers.empty() && !inst_->variant().tsp_mode) ensure_spare(route.depot);
}

Solution SearchState::solution() const {
    Solution s;
    for (const Route& r : routes_)
        if (!r.customers.empty()) s.routes.push_back(r);
    return s;
}

}  // namespace hvrp::ls
