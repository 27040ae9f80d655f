#include "hvrp/ls/neighbors.hpp"

#include <algorithm>

#include "hvrp/core/errors.hpp"

namespace hvrp::ls {

NeighborLists build_granular_neighbors(const Instance& inst, int gamma) {
    if (gamma < 1) throw InvalidInput("neighbourhood size must be at least 1");
    NeighborLists nl;
    nl.lists.resize(static_cast<std::size_t>(inst.size()));
    const int m = inst.num_depots();
    std::vector<int> others;
    for (int a = m; a < inst.size(); ++a) {
        others.clear();
        for (int b = m; b < inst.size(); ++b)
            if (b != a) others.push_back(b);
        const auto closer = [&](int u, int v) {
            const double du = inst.dist(a, u), dv = inst.dist(a, v);
            return du < dv || (du == dv && u < v);
        };
        const std::size_t k = std::min(others.size(), static_cast<std::size_t>(gamma));
        std::partial_sort(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(k), others.end(), closer);
        nl.lists[static_cast<std::size_t>(a)].assign(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(k));
    }
    return nl;
}

}  // namespace hvrp::ls
