#include "hvrp/io/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hvrp/core/errors.hpp"

namespace hvrp {

namespace {

// Distinct streams for the sub-generators so toggling one variant flag does
// not reshuffle the coordinates.
constexpr std::uint64_t kWindowStream = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kBackhaulStream = 0xbf58476d1ce4e5b9ULL;

}  // namespace

std::vector<TimeWindow> generate_time_windows(std::span<const Point> coords, int num_depots,
                                              const TimeWindowParams& p, std::uint64_t seed) {
    if (num_depots < 1 || static_cast<int>(coords.size()) < num_depots)
        throw InvalidInput("time-window generation needs depots first");
    if (!(p.width_min > 0.0) || p.width_max < p.width_min)
        throw InvalidInput("time-window widths must satisfy 0 < min <= max");

    std::mt19937_64 rng(seed ^ kWindowStream);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double H = p.horizon;
    const double s = p.service_time;

    std::vector<TimeWindow> out(coords.size());
    for (int d = 0; d < num_depots; ++d) out[static_cast<std::size_t>(d)] = {0.0, H, 0.0};

    for (std::size_t i = static_cast<std::size_t>(num_depots); i < coords.size(); ++i) {
        double d0 = std::numeric_limits<double>::infinity();
        for (int d = 0; d < num_depots; ++d)
            d0 = std::min(d0, std::hypot(coords[i].x - coords[static_cast<std::size_t>(d)].x,
                                         coords[i].y - coords[static_cast<std::size_t>(d)].y));
        const double hi = H - d0 - s;
        if (hi < d0)
            throw InvalidInput("time-window horizon too short for a customer at distance " +
                               std::to_string(d0));
        const double centre = d0 + unit(rng) * (hi - d0);
        const double width = p.width_min + unit(rng) * (p.width_max - p.width_min);
        const double early = std::max(0.0, centre - width / 2.0);
        const double late = std::min(hi, centre + width / 2.0);
        out[i] = {early, late, s};
    }
    return out;
}

Instance generate_instance(const GenConfig& cfg) {
    cfg.variant.validate();
    if (cfg.n < 1) throw InvalidInput("generator needs n >= 1");
    if (cfg.variant.tsp_mode && cfg.n < 2) throw InvalidInput("a TSP needs at least two cities");
    if (cfg.m < 1) throw InvalidInput("generator needs m >= 1");
    if (cfg.backhaul_fraction < 0.0 || cfg.backhaul_fraction > 1.0)
        throw InvalidInput("backhaul_fraction must lie in [0, 1]");

    const int m = cfg.variant.multi_depot ? cfg.m : 1;
    const int n = cfg.variant.tsp_mode ? cfg.n - 1 : cfg.n;
    const int g = m + n;

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> demand(1, 9);

    std::vector<Node> nodes(static_cast<std::size_t>(g));
    std::vector<Point> coords(static_cast<std::size_t>(g));
    for (int i = 0; i < g; ++i) {
        auto& node = nodes[static_cast<std::size_t>(i)];
        node.kind = i < m ? NodeKind::depot : NodeKind::customer;
        node.x = unit(rng);
        node.y = unit(rng);
        coords[static_cast<std::size_t>(i)] = {node.x, node.y};
    }
    if (!cfg.variant.tsp_mode)
        for (int i = m; i < g; ++i) nodes[static_cast<std::size_t>(i)].demand = demand(rng);

    if (cfg.variant.backhaul) {
        std::mt19937_64 brng(cfg.seed ^ kBackhaulStream);
        std::vector<int> ids(static_cast<std::size_t>(n));
        std::iota(ids.begin(), ids.end(), m);
        std::shuffle(ids.begin(), ids.end(), brng);
        const int count = static_cast<int>(std::floor(cfg.backhaul_fraction * n));
        for (int k = 0; k < count; ++k) nodes[static_cast<std::size_t>(ids[static_cast<std::size_t>(k)])].is_backhaul = true;
    }

    if (cfg.variant.time_windows) {
        const auto tws = generate_time_windows(coords, m, cfg.tw, cfg.seed);
        for (int i = 0; i < g; ++i) {
            auto& node = nodes[static_cast<std::size_t>(i)];
            node.tw_early = tws[static_cast<std::size_t>(i)].early;
            node.tw_late = tws[static_cast<std::size_t>(i)].late;
            node.service_time = tws[static_cast<std::size_t>(i)].service;
        }
    }

    const double capacity = cfg.variant.tsp_mode ? 0.0 : cfg.capacity;
    const double limit = cfg.variant.duration_limit ? cfg.route_limit : 0.0;
    return Instance(cfg.variant.name() + "-n" + std::to_string(cfg.n) + "-s" + std::to_string(cfg.seed),
                    std::move(nodes), m, capacity, cfg.variant, limit);
}

}  // namespace hvrp
