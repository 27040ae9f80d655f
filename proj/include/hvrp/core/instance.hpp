#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hvrp/core/variant.hpp"

namespace hvrp {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

enum class NodeKind { depot, customer };

struct Node {
    NodeKind kind = NodeKind::customer;
    double x = 0.0;
    double y = 0.0;
    double demand = 0.0;
    bool is_backhaul = false;
    double tw_early = 0.0;
    double tw_late = 0.0;
    double service_time = 0.0;
};

/// Dense symmetric g x g matrix of travel distances (= travel times).
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t size) : size_(size), data_(size * size, 0.0) {}

    std::size_t size() const noexcept { return size_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * size_ + j]; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * size_ + j]; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * size_, size_}; }

private:
    std::size_t size_ = 0;
    std::vector<double> data_;
};

/// Euclidean distance matrix. With `rounded`, entries are rounded to the
/// nearest integer (TSPLIB nint convention). Throws InvalidInput on empty
/// input or non-finite coordinates.
DistanceMatrix build_distance_matrix(std::span<const Point> coords, bool rounded = false);

/// Immutable problem definition. Depots occupy indices [0, m), customers
/// [m, g). In tsp_mode node 0 is the tour anchor (stored as the single depot)
/// and every other node is a zero-demand customer.
class Instance {
public:
    Instance() = default;
    Instance(std::string name, std::vector<Node> nodes, int num_depots, double capacity,
             VariantFlags variant, double route_limit = 0.0, bool rounded_distances = false);

    const std::string& name() const noexcept { return name_; }
    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const Node& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
    int num_depots() const noexcept { return m_; }
    int num_customers() const noexcept { return static_cast<int>(nodes_.size()) - m_; }
    int size() const noexcept { return static_cast<int>(nodes_.size()); }
    double capacity() const noexcept { return capacity_; }
    double route_limit() const noexcept { return route_limit_; }
    const VariantFlags& variant() const noexcept { return variant_; }
    bool rounded_distances() const noexcept { return rounded_; }
    const DistanceMatrix& distances() const noexcept { return dist_; }
    double dist(int i, int j) const noexcept {
        return dist_(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }

    bool is_depot(int i) const noexcept { return i >= 0 && i < m_; }
    bool is_customer(int i) const noexcept { return i >= m_ && i < size(); }
    /// Latest return time at depot `d` (its tw_late).
    double horizon(int depot = 0) const { return node(depot).tw_late; }

    friend bool operator==(const Instance& a, const Instance& b);

private:
    void validate() const;

    std::string name_;
    std::vector<Node> nodes_;
    int m_ = 0;
    double capacity_ = 0.0;
    double route_limit_ = 0.0;
    VariantFlags variant_;
    bool rounded_ = false;
    DistanceMatrix dist_;
};

}  // namespace hvrp
