#pragma once

#include "hvrp/core/instance.hpp"
#include "hvrp/core/solution.hpp"

namespace hvrp::solver {

/// Nearest-neighbour construction. Each route starts at the depot closest to
/// any unvisited customer and repeatedly visits the nearest unvisited customer
/// that keeps the load within capacity (and, with backhauls, opens with a
/// linehaul and never returns to linehauls after a backhaul). Time windows and
/// route limits are left to the repair step. Throws InfeasibleError when a
/// demand exceeds capacity.
Solution greedy_initial(const Instance& instance);

}  // namespace hvrp::solver
