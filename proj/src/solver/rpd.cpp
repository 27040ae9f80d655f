#include "hvrp/solver/rpd.hpp"

#include <cmath>

#include "hvrp/core/errors.hpp"

namespace hvrp::solver {

double compute_rpd(double objective, double best_known) {
    if (!std::isfinite(objective) || !std::isfinite(best_known)) throw InvalidInput("RPD inputs must be finite");
    if (best_known <= 0.0) throw InvalidInput("reference objective must be positive");
    return 100.0 * (objective - best_known) / best_known;
}

}  // namespace hvrp::solver
