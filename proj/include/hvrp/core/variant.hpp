#pragma once

#include <string>
#include <string_view>

namespace hvrp {

struct VariantFlags {
    bool multi_depot = false;
    bool backhaul = false;
    bool duration_limit = false;
    bool open_routes = false;
    bool time_windows = false;
    bool tsp_mode = false;

    /// Throws InvalidInput when tsp_mode is combined with another flag.
    void validate() const;

    /// Short lowercase name, e.g. "cvrp", "mdvrptw", "vrpb+l" style combos
    /// are rendered as "md" prefix + "vrp" + suffix letters.
    std::string name() const;

    /// Parses names such as cvrp, mdvrp, vrpb, vrpl, ovrp, vrptw, tsp and
    /// md-prefixed / multi-suffix combinations ("mdovrptw", "vrpbl").
    static VariantFlags from_name(std::string_view name);

    friend bool operator==(const VariantFlags&, const VariantFlags&) = default;
};

}  // namespace hvrp
