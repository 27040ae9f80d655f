#include "hvrp/core/instance.hpp"

#include <cmath>

#include "hvrp/core/errors.hpp"

namespace hvrp {

DistanceMatrix build_distance_matrix(std::span<const Point> coords, bool rounded) {
    if (coords.empty()) throw InvalidInput("distance matrix needs at least one coordinate");
    for (const auto& p : coords)
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw InvalidInput("non-finite coordinate");

    const std::size_t g = coords.size();
    DistanceMatrix dist(g);
    for (std::size_t i = 0; i < g; ++i) {
        for (std::size_t j = i + 1; j < g; ++j) {
            double d = std::hypot(coords[i].x - coords[j].x, coords[i].y - coords[j].y);
            if (rounded) d = std::floor(d + 0.5);  // TSPLIB nint
            dist(i, j) = d;
            dist(j, i) = d;
        }
    }
    return dist;
}

Instance::Instance(std::string name, std::vector<Node> nodes, int num_depots, double capacity,
                   VariantFlags variant, double route_limit, bool rounded_distances)
    : name_(std::move(name)),
      nodes_(std::move(nodes)),
      m_(num_depots),
      capacity_(capacity),
      route_limit_(route_limit),
      variant_(variant),
      rounded_(rounded_distances) {
    validate();
    std::vector<Point> coords;
    coords.reserve(nodes_.size());
    for (const auto& n : nodes_) coords.push_back({n.x, n.y});
    dist_ = build_distance_matrix(coords, rounded_);
}

void Instance::validate() const {
    variant_.validate();
    if (m_ < 1) throw InvalidInput("instance needs at least one depot");
    if (!variant_.multi_depot && m_ != 1)
        throw InvalidInput("single-depot instance with " + std::to_string(m_) + " depots");
    if (static_cast<int>(nodes_.size()) <= m_) throw InvalidInput("instance has no customers");
    if (!variant_.tsp_mode && !(capacity_ > 0.0)) throw InvalidInput("capacity must be positive");
    if (variant_.duration_limit && !(route_limit_ > 0.0))
        throw InvalidInput("duration-limited instance needs a positive route limit");

    for (int i = 0; i < size(); ++i) {
        const Node& n = nodes_[static_cast<std::size_t>(i)];
        const bool depot = i < m_;
        if (depot != (n.kind == NodeKind::depot))
            throw InvalidInput("depots must occupy the first " + std::to_string(m_) + " positions");
        if (depot && (n.demand != 0.0 || n.is_backhaul))
            throw InvalidInput("depot " + std::to_string(i) + " has demand or backhaul flag");
        if (!std::isfinite(n.demand) || n.demand < 0.0)
            throw InvalidInput("node " + std::to_string(i) + " has invalid demand");
        if (n.is_backhaul && !variant_.backhaul)
            throw InvalidInput("backhaul customer in an instance without the backhaul flag");
        if (variant_.time_windows && !(n.tw_early <= n.tw_late))
            throw InvalidInput("node " + std::to_string(i) + " has tw_early > tw_late");
        if (n.service_time < 0.0) throw InvalidInput("negative service time");
    }
}

bool operator==(const Instance& a, const Instance& b) {
    if (a.name_ != b.name_ || a.m_ != b.m_ || a.capacity_ != b.capacity_ ||
        a.route_limit_ != b.route_limit_ || !(a.variant_ == b.variant_) || a.rounded_ != b.rounded_ ||
        a.nodes_.size() != b.nodes_.size())
        return false;
    for (std::size_t i = 0; i < a.nodes_.size(); ++i) {
        const Node& x = a.nodes_[i];
        const Node& y = b.nodes_[i];
        if (x.kind != y.kind || x.x != y.x || x.y != y.y || x.demand != y.demand ||
            x.is_backhaul != y.is_backhaul || x.tw_early != y.tw_early || x.tw_late != y.tw_late ||
            x.service_time != y.service_time)
            return false;
    }
    return true;
}

}  // namespace hvrp
