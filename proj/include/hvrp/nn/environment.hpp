#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "hvrp/core/instance.hpp"
#include "hvrp/core/solution.hpp"

namespace hvrp::nn {

enum class Phase { select_depot, extend_route };

/// Construction state of one trajectory.
struct RolloutState {
    Phase phase = Phase::select_depot;
    int current = 0;       // node the vehicle stands at (a depot between routes)
    int route_depot = 0;
    std::vector<char> visited;  // indexed by node
    int unvisited = 0;
    // Active route accumulators.
    double linehaul_load = 0.0;  // peak load so far (departing load is raised by linehauls)
    double backhaul_load = 0.0;  // pickups collected so far
    double peak_load = 0.0;
    double clock = 0.0;          // completion time of the last service
    double length = 0.0;
    double service_total = 0.0;
    int route_size = 0;
    int steps = 0;
    Solution partial;

    bool done() const { return unvisited == 0 && phase == Phase::select_depot; }
};

/// Construction rules of the decoder. Feasibility is judged on the instance
/// passed here (original units); `length_scale` only normalizes the length
/// feature handed to the policy.
class Environment {
public:
    explicit Environment(const Instance& instance, double length_scale = 1.0);

    const Instance& instance() const noexcept { return *inst_; }
    int size() const noexcept { return inst_->size(); }

    RolloutState initial_state() const;

    /// mask[i] = 1 when node i may be chosen next. Throws InfeasibleError
    /// when a state has no admissible action.
    void mask(const RolloutState& state, std::span<std::uint8_t> out) const;
    std::vector<std::uint8_t> mask(const RolloutState& state) const;

    /// Throws ContractViolation for a masked action.
    void advance(RolloutState& state, int action) const;
    /// Same, with the mask of `state` already computed by the caller.
    void advance(RolloutState& state, int action, std::span<const std::uint8_t> mask) const;

    /// (remaining load / Q, clock / horizon or 0, length / length_scale,
    /// open-route flag).
    std::array<double, 4> dynamic_features(const RolloutState& state) const;

    /// Whether customer c can be appended to the active route of `state`.
    bool can_append(const RolloutState& state, int c) const;
    /// Whether c could open a fresh route at depot d.
    bool can_open(int depot, int c) const;

private:
    const Instance* inst_;
    double length_scale_;
};

/// Independent decoding of an action list (depot selections, customers and
/// depot closings) into a Solution. Throws StructureError on malformed lists.
Solution trajectory_to_solution(std::span<const int> actions, const Instance& instance);

}  // namespace hvrp::nn
