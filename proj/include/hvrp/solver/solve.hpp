#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hvrp/core/instance.hpp"
#include "hvrp/core/solution.hpp"
#include "hvrp/ls/local_search.hpp"
#include "hvrp/nn/params.hpp"

namespace hvrp::solver {

enum class SolveMode { neural, neural_ls, greedy_ls, random_ls };

/// "neural", "neural+ls", "greedy+ls", "random+ls".
std::string to_string(SolveMode mode);
SolveMode parse_solve_mode(std::string_view text);

inline bool is_neural(SolveMode m) { return m == SolveMode::neural || m == SolveMode::neural_ls; }
inline bool uses_ls(SolveMode m) { return m != SolveMode::neural; }

struct SolveConfig {
    SolveMode mode = SolveMode::greedy_ls;
    std::string checkpoint;
    bool augment = true;
    /// Cap on greedy multi-start trajectories per image.
    int max_starts = 200;
    ls::LSConfig ls;
    /// Overrides ls.time_budget_ms when positive.
    double time_budget_ms = 0.0;
    std::uint64_t seed = 1;

    /// Throws InvalidInput on a neural mode without a checkpoint or bad
    /// numeric settings.
    void validate() const;
};

struct SolveStats {
    double construction_cost = 0.0;
    bool construction_feasible = false;
    double final_cost = 0.0;
    std::vector<ls::TracePoint> trace;
    int ls_iterations = 0;
    double construction_ms = 0.0;
    double ls_ms = 0.0;
    double total_ms = 0.0;
};

struct SolveResult {
    Solution solution;
    SolveStats stats;
};

/// Loads the checkpoint named in the config when the mode is neural.
SolveResult solve(const Instance& instance, const SolveConfig& config);

/// Uses already loaded parameters (required for neural modes). Throws
/// CheckpointError when the parameters were adapted for a different problem
/// layout (TSP vs routing) than the instance.
SolveResult solve(const Instance& instance, const SolveConfig& config, const nn::PolicyParams* params);

/// Best-of-N greedy decode, over the 8 augmented images when `augment`.
Solution neural_construct(const Instance& instance, const nn::PolicyParams& params, bool augment, int max_starts,
                          std::uint64_t seed = 0);

}  // namespace hvrp::solver
