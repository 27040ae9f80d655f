#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hvrp/core/instance.hpp"
#include "hvrp/io/generator.hpp"

namespace support {

struct Customer {
    double x = 0.0;
    double y = 0.0;
    double demand = 1.0;
    bool backhaul = false;
};

inline hvrp::Instance make_instance(const std::vector<std::pair<double, double>>& depots,
                                    const std::vector<Customer>& customers, double capacity = 100.0,
                                    hvrp::VariantFlags variant = {}, double route_limit = 0.0) {
    std::vector<hvrp::Node> nodes;
    for (const auto& [x, y] : depots) {
        hvrp::Node n;
        n.kind = hvrp::NodeKind::depot;
        n.x = x;
        n.y = y;
        n.tw_late = 1e9;
        nodes.push_back(n);
    }
    for (const Customer& c : customers) {
        hvrp::Node n;
        n.x = c.x;
        n.y = c.y;
        n.demand = c.demand;
        n.is_backhaul = c.backhaul;
        n.tw_late = 1e9;
        nodes.push_back(n);
    }
    if (depots.size() > 1) variant.multi_depot = true;
    return hvrp::Instance("fixture", std::move(nodes), static_cast<int>(depots.size()), capacity, variant,
                          route_limit);
}

inline const std::vector<std::string>& variant_names() {
    static const std::vector<std::string> names{"cvrp", "mdvrp", "vrpb", "vrpl", "ovrp", "vrptw", "tsp"};
    return names;
}

inline hvrp::Instance generated(const std::string& variant, int n, std::uint64_t seed, int m = 2) {
    hvrp::GenConfig g;
    g.variant = hvrp::VariantFlags::from_name(variant);
    g.n = n;
    g.m = g.variant.multi_depot ? m : 1;
    g.seed = seed;
    return hvrp::generate_instance(g);
}

}  // namespace support
