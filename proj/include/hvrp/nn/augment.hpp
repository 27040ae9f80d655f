#pragma once

#include <vector>

#include "hvrp/core/instance.hpp"

namespace hvrp::nn {

/// The eight symmetries of the unit square, in this order:
/// (x,y) (y,x) (x,1-y) (y,1-x) (1-x,y) (1-y,x) (1-x,1-y) (1-y,1-x).
/// Only coordinates change. Throws InvalidInput when a coordinate lies
/// outside [0,1].
std::vector<Instance> augment_x8(const Instance& normalized);

}  // namespace hvrp::nn
