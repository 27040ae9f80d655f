#include "hvrp/nn/augment.hpp"

#include "hvrp/core/errors.hpp"

namespace hvrp::nn {

std::vector<Instance> augment_x8(const Instance& inst) {
    for (const Node& n : inst.nodes())
        if (n.x < 0.0 || n.x > 1.0 || n.y < 0.0 || n.y > 1.0)
            throw InvalidInput("augmentation needs coordinates inside the unit square");
    std::vector<Instance> out;
    out.reserve(8);
    for (int k = 0; k < 8; ++k) {
        std::vector<Node> nodes = inst.nodes();
        for (Node& n : nodes) {
            double x = n.x, y = n.y;
            if (k & 1) std::swap(x, y);
            if (k & 2) y = 1.0 - y;
            if (k & 4) x = 1.0 - x;
            n.x = x;
            n.y = y;
        }
        out.emplace_back(inst.name(), std::move(nodes), inst.num_depots(), inst.capacity(), inst.variant(),
                         inst.route_limit(), inst.rounded_distances());
    }
    return out;
}

}  // namespace hvrp::nn
