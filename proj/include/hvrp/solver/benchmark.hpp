#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hvrp/solver/solve.hpp"

namespace hvrp::solver {

struct BenchmarkEntry {
    std::string name;  // file stem
    std::filesystem::path file;
    bool skipped = false;
    std::string reason;
    double construction = 0.0;
    double objective = 0.0;
    bool feasible = false;
    std::optional<double> best_known;
    std::optional<double> rpd;
    int ls_iterations = 0;
    double seconds = 0.0;
};

struct BenchmarkReport {
    std::vector<BenchmarkEntry> entries;  // sorted by name
    /// Absent when no entry has a reference value.
    std::optional<double> mean_rpd;
    double total_seconds = 0.0;

    int solved() const;
    int skipped() const;
};

/// Reference objectives, one `name value` pair per line (comma or whitespace
/// separated, `#` comments). Throws InvalidInput when the file is missing and
/// ParseError on a malformed line.
std::map<std::string, double> read_references(const std::filesystem::path& path);

struct BenchmarkOptions {
    SolveConfig solve;
    /// Worker count; 0 reads HVRP_THREADS, falling back to 1.
    int threads = 0;
    /// When set, receives `<name>.sol` solution files.
    std::optional<std::filesystem::path> solutions_dir;
};

int default_thread_count();

/// Solves every regular file in `dir` (sorted by name, hidden files ignored).
/// Files that fail to parse or solve are recorded as skipped with the reason.
BenchmarkReport run_benchmark(const std::filesystem::path& dir, const std::map<std::string, double>& references,
                              const BenchmarkOptions& options);

/// Header: name,status,construction,objective,best_known,rpd,ls_iterations,seconds,reason
void write_report_csv(std::ostream& out, const BenchmarkReport& report);
void write_report_json(std::ostream& out, const BenchmarkReport& report);

}  // namespace hvrp::solver
