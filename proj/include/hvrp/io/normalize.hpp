#pragma once

#include "hvrp/core/instance.hpp"

namespace hvrp {

/// Policy-input view of an instance. Coordinates are mapped into [0,1]^2
/// (aspect ratio kept), demands become fractions of capacity (capacity 1),
/// time quantities become fractions of the depot horizon and the route
/// limit is divided by `scale`.
///
/// Distances scale by exactly 1/scale, so route distances convert back with
/// `* scale`. Time windows use their own unit, so this copy is meant for
/// encoder features only; feasibility is always judged on the original.
struct NormalizedInstance {
    Instance instance;
    double scale = 1.0;       // original length = normalized length * scale
    double time_scale = 1.0;  // original time = normalized time * time_scale
};

/// Instances already inside the unit square are left unchanged (scale 1);
/// a degenerate bounding box also yields identity scaling.
NormalizedInstance normalize_for_policy(const Instance& instance);

}  // namespace hvrp
