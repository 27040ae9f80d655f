#pragma once

#include <vector>

#include "hvrp/core/instance.hpp"

namespace hvrp::ls {

/// For every customer, its closest other customers in ascending distance
/// (ties by lower index). Depot entries are empty.
struct NeighborLists {
    std::vector<std::vector<int>> lists;

    const std::vector<int>& of(int customer) const { return lists[static_cast<std::size_t>(customer)]; }
};

/// Throws InvalidInput when gamma < 1.
NeighborLists build_granular_neighbors(const Instance& instance, int gamma = 20);

}  // namespace hvrp::ls
