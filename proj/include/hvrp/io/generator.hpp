#pragma once

#include <cstdint>
#include <vector>

#include "hvrp/core/instance.hpp"

namespace hvrp {

/// Time-window synthesis parameters, in the unit-square length unit.
/// Window centres are uniform in [d0, H - d0 - s] where d0 is the distance
/// to the nearest depot; widths are uniform in [width_min, width_max].
/// This approximates the Solomon-style generator; it is not a reproduction.
struct TimeWindowParams {
    double horizon = 4.6;
    double service_time = 0.2;
    double width_min = 0.2;
    double width_max = 0.6;
};

struct GenConfig {
    VariantFlags variant;
    /// Customer count. In tsp_mode this is the city count (node 0 included).
    int n = 20;
    /// Depot count; forced to 1 unless variant.multi_depot.
    int m = 1;
    std::uint64_t seed = 0;
    double capacity = 50.0;
    double backhaul_fraction = 0.20;
    double route_limit = 3.0;
    TimeWindowParams tw;
};

/// Random instance on the unit square. Pure function of the config.
Instance generate_instance(const GenConfig& config);

struct TimeWindow {
    double early = 0.0;
    double late = 0.0;
    double service = 0.0;
};

/// Per-node windows for an instance skeleton (depots first). Depots get
/// [0, H] with no service time.
std::vector<TimeWindow> generate_time_windows(std::span<const Point> coords, int num_depots,
                                              const TimeWindowParams& params, std::uint64_t seed);

}  // namespace hvrp
