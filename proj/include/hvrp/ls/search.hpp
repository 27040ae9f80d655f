#pragma once

#include <cstdint>
#include <random>

#include "hvrp/core/cost.hpp"
#include "hvrp/core/instance.hpp"
#include "hvrp/core/solution.hpp"
#include "hvrp/ls/neighbors.hpp"

namespace hvrp::ls {

using Rng = std::mt19937_64;

struct LSConfig {
    int iterations = 50;
    int max_exchange = 3;
    int granularity = 20;
    PenaltyWeights search_weights = PenaltyWeights::uniform(0.1);
    PenaltyWeights fix_weights = PenaltyWeights::uniform(1e4);
    std::uint64_t seed = 1;
    /// Wall-clock cap on the iteration loop in milliseconds; 0 disables it.
    double time_budget_ms = 0.0;

    /// Throws InvalidInput on negative iterations, max_exchange < 1,
    /// granularity < 1 or fix weights not above search weights.
    void validate() const;
};

/// Operator sweep: node phase over granular neighbours, then route phase over
/// all route pairs, repeated until no improving move remains. Operator order
/// is shuffled once per call.
Solution search(const Solution& solution, const Instance& instance, const NeighborLists& neighbors,
                const PenaltyWeights& weights, Rng& rng, int max_exchange = 3);

/// Returns a feasible solution or throws InfeasibleError when some customer
/// cannot be served on any route.
Solution fix(const Solution& solution, const Instance& instance, const NeighborLists& neighbors,
             const LSConfig& config, Rng& rng);

/// Sequential random construction respecting capacity only.
Solution make_random(const Instance& instance, Rng& rng);

bool is_feasible(const Solution& solution, const Instance& instance);

}  // namespace hvrp::ls
