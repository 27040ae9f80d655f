#include "hvrp/solver/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "hvrp/core/cost.hpp"
#include "hvrp/core/errors.hpp"
#include "hvrp/io/parsers.hpp"
#include "hvrp/io/solution_io.hpp"
#include "hvrp/nn/checkpoint.hpp"
#include "hvrp/solver/rpd.hpp"

namespace hvrp::solver {

namespace fs = std::filesystem;

int BenchmarkReport::solved() const {
    return static_cast<int>(std::count_if(entries.begin(), entries.end(), [](const auto& e) { return !e.skipped; }));
}

int BenchmarkReport::skipped() const { return static_cast<int>(entries.size()) - solved(); }

std::map<std::string, double> read_references(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open references file " + path.string());
    std::map<std::string, double> refs;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        std::string name;
        if (!(ss >> name)) continue;
        double value = 0.0;
        std::string extra;
        if (!(ss >> value) || (ss >> extra)) throw ParseError("expected `name value`", lineno);
        refs[name] = value;
    }
    return refs;
}

int default_thread_count() {
    if (const char* env = std::getenv("HVRP_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
    }
    return 1;
}

BenchmarkReport run_benchmark(const fs::path& dir, const std::map<std::string, double>& references,
                              const BenchmarkOptions& options) {
    if (!fs::is_directory(dir)) throw InvalidInput("not a directory: " + dir.string());
    std::optional<nn::PolicyParams> params;
    if (is_neural(options.solve.mode)) {
        options.solve.validate();
        params = nn::load_checkpoint(options.solve.checkpoint);
    }
    if (options.solutions_dir) fs::create_directories(*options.solutions_dir);

    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().filename().string().front() != '.') files.push_back(e.path());
    std::sort(files.begin(), files.end());

    BenchmarkReport report;
    report.entries.resize(files.size());
    const auto t0 = std::chrono::steady_clock::now();
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < files.size(); i = next++) {
            BenchmarkEntry& e = report.entries[i];
            e.file = files[i];
            e.name = files[i].stem().string();
            const auto s0 = std::chrono::steady_clock::now();
            try {
                const Instance inst = load_instance(files[i]);
                const SolveResult r = solve(inst, options.solve, params ? &*params : nullptr);
                e.construction = r.stats.construction_cost;
                e.objective = evaluate_solution(r.solution, inst, {}).distance;
                e.feasible = check_feasibility(r.solution, inst).feasible;
                e.ls_iterations = r.stats.ls_iterations;
                if (options.solutions_dir)
                    write_solution(*options.solutions_dir / (e.name + ".sol"), r.solution, e.objective);
                if (const auto it = references.find(e.name); it != references.end()) {
                    e.best_known = it->second;
                    e.rpd = compute_rpd(e.objective, it->second);
                }
            } catch (const std::exception& ex) {
                e.skipped = true;
                e.reason = ex.what();
            }
            e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - s0).count();
        }
    };
    const int threads = std::max(1, options.threads > 0 ? options.threads : default_thread_count());
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();
    report.total_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    double sum = 0.0;
    int count = 0;
    for (const BenchmarkEntry& e : report.entries)
        if (e.rpd) {
            sum += *e.rpd;
            ++count;
        }
    if (count > 0) report.mean_rpd = sum / count;
    return report;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

}  // namespace

void write_report_csv(std::ostream& out, const BenchmarkReport& report) {
    out << "name,status,construction,objective,best_known,rpd,ls_iterations,seconds,reason\n";
    out << std::setprecision(10);
    for (const BenchmarkEntry& e : report.entries) {
        out << csv_field(e.name) << ',';
        if (e.skipped) {
            out << "skipped,,,,,," << e.seconds << ',' << csv_field(e.reason) << '\n';
            continue;
        }
        out << (e.feasible ? "solved" : "infeasible") << ',' << e.construction << ',' << e.objective << ',';
        if (e.best_known) out << *e.best_known;
        out << ',';
        if (e.rpd) out << *e.rpd;
        out << ',' << e.ls_iterations << ',' << e.seconds << ",\n";
    }
}

void write_report_json(std::ostream& out, const BenchmarkReport& report) {
    nlohmann::json doc;
    doc["entries"] = nlohmann::json::array();
    for (const BenchmarkEntry& e : report.entries) {
        nlohmann::json j{{"name", e.name}, {"file", e.file.string()}, {"skipped", e.skipped}, {"seconds", e.seconds}};
        if (e.skipped) {
            j["reason"] = e.reason;
        } else {
            j["construction"] = e.construction;
            j["objective"] = e.objective;
            j["feasible"] = e.feasible;
            j["ls_iterations"] = e.ls_iterations;
            j["best_known"] = e.best_known ? nlohmann::json(*e.best_known) : nlohmann::json(nullptr);
            j["rpd"] = e.rpd ? nlohmann::json(*e.rpd) : nlohmann::json(nullptr);
        }
        doc["entries"].push_back(std::move(j));
    }
    doc["mean_rpd"] = report.mean_rpd ? nlohmann::json(*report.mean_rpd) : nlohmann::json(nullptr);
    doc["mean_rpd_defined"] = report.mean_rpd.has_value();
    doc["solved"] = report.solved();
    doc["skipped"] = report.skipped();
    doc["total_seconds"] = report.total_seconds;
    out << doc.dump(2) << '\n';
}

}  // namespace hvrp::solver
