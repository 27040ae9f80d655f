#pragma once

#include <vector>

namespace hvrp {

struct Route {
    int depot = 0;
    std::vector<int> customers;

    friend bool operator==(const Route&, const Route&) = default;
};

struct Solution {
    std::vector<Route> routes;

    /// Drops empty routes.
    void normalize();
    int num_customers() const;

    friend bool operator==(const Solution&, const Solution&) = default;
};

}  // namespace hvrp
