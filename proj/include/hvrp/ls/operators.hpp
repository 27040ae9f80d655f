#pragma once

#include <limits>

#include "hvrp/ls/search_state.hpp"

namespace hvrp::ls {

enum class ApplyMode {
    if_improving,  // normal search behaviour
    always,        // apply the best candidate regardless of sign (delta checks)
    never,         // evaluate only
};

struct MoveResult {
    bool applicable = false;
    double delta = std::numeric_limits<double>::infinity();
    bool applied = false;
};

/// Strict-improvement threshold for applying a move.
inline constexpr double kImprovement = 1e-9;

/// Swaps the X-customer segment starting at a with the M-customer segment
/// starting at b. M = 0 relocates a's segment after b (or in front of b when b
/// opens its route). Inapplicable when a segment runs past its route end or
/// the two segments overlap.
MoveResult op_exchange(SearchState& s, int a, int b, int x, int m, ApplyMode mode = ApplyMode::if_improving);

/// Moves (a, succ(a)) after b as (succ(a), a), or in front of b when b opens
/// its route.
MoveResult op_move_two_reversed(SearchState& s, int a, int b, ApplyMode mode = ApplyMode::if_improving);

/// Intra-route 2-opt for customers of the same route: best of reversing
/// the stretch strictly after a up to b, or a through b inclusive.
MoveResult op_two_opt(SearchState& s, int a, int b, ApplyMode mode = ApplyMode::if_improving);

/// Best single-customer relocation between two routes, both directions.
MoveResult op_relocate_star(SearchState& s, int ri, int rj, ApplyMode mode = ApplyMode::if_improving);

/// Best exchange of u in ri and v in rj, each reinserted at its best position
/// in the other route.
MoveResult op_swap_star(SearchState& s, int ri, int rj, ApplyMode mode = ApplyMode::if_improving);

}  // namespace hvrp::ls
