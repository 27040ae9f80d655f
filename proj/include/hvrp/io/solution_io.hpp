#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "hvrp/core/instance.hpp"
#include "hvrp/core/solution.hpp"

namespace hvrp {

/// Text layout, one route per line then the objective:
///   Route #1 (depot 0): 4 7 5
///   Route #2 (depot 1): 6 8
///   Cost 12.345678
void write_solution(std::ostream& out, const Solution& solution, double cost);
void write_solution(const std::filesystem::path& path, const Solution& solution, double cost);

struct SolutionFile {
    Solution solution;
    std::optional<double> cost;
};

/// Parses the layout above. When `instance` is given, node indices are bounds
/// checked (InvalidInput on a depot >= m or a customer outside [m, g)).
SolutionFile read_solution(std::istream& in, const Instance* instance = nullptr);
SolutionFile read_solution(const std::filesystem::path& path, const Instance* instance = nullptr);

}  // namespace hvrp
