#include "hvrp/io/normalize.hpp"

#include <algorithm>
#include <limits>

namespace hvrp {

NormalizedInstance normalize_for_policy(const Instance& inst) {
    double minx = std::numeric_limits<double>::infinity();
    double miny = minx;
    double maxx = -minx;
    double maxy = -minx;
    for (const Node& n : inst.nodes()) {
        minx = std::min(minx, n.x);
        miny = std::min(miny, n.y);
        maxx = std::max(maxx, n.x);
        maxy = std::max(maxy, n.y);
    }
    const bool inside = minx >= 0.0 && miny >= 0.0 && maxx <= 1.0 && maxy <= 1.0;
    const double span = std::max(maxx - minx, maxy - miny);
    const bool identity = inside || !(span > 0.0);
    const double scale = identity ? 1.0 : span;
    const double ox = identity ? 0.0 : minx;
    const double oy = identity ? 0.0 : miny;

    const VariantFlags& v = inst.variant();
    double horizon = 1.0;
    if (v.time_windows) {
        double h = 0.0;
        for (int d = 0; d < inst.num_depots(); ++d) h = std::max(h, inst.node(d).tw_late);
        if (h > 0.0) horizon = h;
    }
    const double q = v.tsp_mode ? 1.0 : inst.capacity();

    std::vector<Node> nodes = inst.nodes();
    for (Node& n : nodes) {
        n.x = (n.x - ox) / scale;
        n.y = (n.y - oy) / scale;
        n.demand /= q;
        if (v.time_windows) {
            n.tw_early /= horizon;
            n.tw_late /= horizon;
            n.service_time /= horizon;
        }
    }
    NormalizedInstance out{Instance(inst.name(), std::move(nodes), inst.num_depots(), v.tsp_mode ? 0.0 : 1.0, v,
                                    inst.route_limit() / scale, false),
                           scale, horizon};
    return out;
}

}  // namespace hvrp
