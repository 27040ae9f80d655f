#pragma once

#include <vector>

#include "hvrp/core/cost.hpp"
#include "hvrp/core/instance.hpp"
#include "hvrp/core/solution.hpp"
#include "hvrp/ls/search.hpp"

namespace hvrp::ls {

struct SrexOutcome {
    Solution offspring;
    double offspring_cost = 0.0;  // penalized under the supplied weights
    Solution discarded;
    double discarded_cost = 0.0;
};

/// Selective route exchange. Route subsets are drawn uniformly with sizes in
/// {1, ..., ceil(routes/2)}; customers left unserved are reinserted at their
/// least-cost position (existing routes or a new route at the nearest depot).
Solution srex_crossover(const Solution& pa, const Solution& pb, const Instance& instance,
                        const PenaltyWeights& weights, Rng& rng);

SrexOutcome srex_detailed(const Solution& pa, const Solution& pb, const Instance& instance,
                          const PenaltyWeights& weights, Rng& rng);

/// Deterministic core with explicit route indices into pa and pb. The rng only
/// orders the reinsertion of unserved customers.
SrexOutcome srex_with_subsets(const Solution& pa, const Solution& pb, const std::vector<int>& subset_a,
                              const std::vector<int>& subset_b, const Instance& instance,
                              const PenaltyWeights& weights, Rng& rng);

/// Order crossover on permutations: positions [start, start+length) (cyclic)
/// come from pa, the rest is filled with pb's remaining nodes in pb order,
/// reading and writing from the segment end with wraparound. Throws
/// InvalidInput when the parents are not permutations of the same node set.
std::vector<int> ox_crossover(const std::vector<int>& pa, const std::vector<int>& pb, int start, int length);

/// Random segment variant on single-route tours.
Solution ox_crossover(const Solution& pa, const Solution& pb, Rng& rng);

}  // namespace hvrp::ls
