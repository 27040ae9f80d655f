#pragma once

#include <string>
#include <string_view>

#include "hvrp/core/instance.hpp"

namespace hvrp {

inline constexpr int kInstanceJsonVersion = 1;

/// Canonical, versioned JSON document mirroring the Instance fields. The
/// distance matrix is not stored; it is rebuilt from coordinates.
std::string instance_to_json(const Instance& instance);
Instance instance_from_json(std::string_view text);

}  // namespace hvrp
