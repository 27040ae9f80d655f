#pragma once

#include <span>
#include <vector>

#include "hvrp/core/cost.hpp"
#include "hvrp/core/instance.hpp"
#include "hvrp/core/solution.hpp"

namespace hvrp::ls {

/// Solution under modification with per-route penalized costs and customer
/// positions cached. Routes may be empty while searching; one empty route per
/// depot is kept available so moves can open new routes.
class SearchState {
public:
    SearchState(const Instance& instance, Solution solution, const PenaltyWeights& weights);

    const Instance& instance() const noexcept { return *inst_; }
    const PenaltyWeights& weights() const noexcept { return w_; }

    int num_routes() const noexcept { return static_cast<int>(routes_.size()); }
    const Route& route(int r) const { return routes_[static_cast<std::size_t>(r)]; }
    double route_cost(int r) const { return cost_[static_cast<std::size_t>(r)]; }
    double total_cost() const;

    int route_of(int customer) const { return route_of_[static_cast<std::size_t>(customer)]; }
    int pos_of(int customer) const { return pos_of_[static_cast<std::size_t>(customer)]; }

    /// Penalized cost of an arbitrary customer sequence at `depot`.
    double evaluate(int depot, std::span<const int> customers) const;

    /// Replaces a route's customers and refreshes caches. Adds a spare empty
    /// route when the last empty one at that depot gets filled.
    void set_route(int r, std::vector<int> customers);

    /// Copy without empty routes.
    Solution solution() const;

private:
    void index_route(int r);
    void ensure_spare(int depot);

    const Instance* inst_;
    PenaltyWeights w_;
    std::vector<Route> routes_;
    std::vector<double> cost_;
    std::vector<int> route_of_;
    std::vector<int> pos_of_;
};

}  // namespace hvrp::ls
