#pragma once

namespace hvrp::solver {

/// Relative percentage deviation 100 * (z - best) / best. Throws InvalidInput
/// when best <= 0 or either value is not finite.
double compute_rpd(double objective, double best_known);

}  // namespace hvrp::solver
