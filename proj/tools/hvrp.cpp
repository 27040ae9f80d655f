// hvrp command-line front end.
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hvrp/core/cost.hpp"
#include "hvrp/core/errors.hpp"
#include "hvrp/io/generator.hpp"
#include "hvrp/io/instance_json.hpp"
#include "hvrp/io/parsers.hpp"
#include "hvrp/io/solution_io.hpp"
#include "hvrp/nn/checkpoint.hpp"
#include "hvrp/solver/benchmark.hpp"
#include "hvrp/solver/solve.hpp"
#include "hvrp/train/reinforce.hpp"

namespace fs = std::filesystem;
using namespace hvrp;

namespace {

// Bad flag values surface as InvalidInput from validation; report them as
// usage errors rather than runtime failures.
template <typename F>
auto as_usage_error(F&& f) {
    try {
        return f();
    } catch (const InvalidInput& e) {
        throw CLI::ValidationError(e.what());
    }
}

struct SolveFlags {
    std::string mode = "greedy+ls";
    std::string checkpoint;
    bool no_augment = false;
    int max_starts = 200;
    int iters = 50;
    int xmax = 3;
    int granularity = 20;
    double search_penalty = 0.1;
    double fix_penalty = 1e4;
    double time_budget_ms = 0.0;

    void add(CLI::App* app) {
        app->add_option("--mode", mode, "neural | neural+ls | greedy+ls | random+ls")
            ->check(CLI::IsMember({"neural", "neural+ls", "greedy+ls", "random+ls"}))
            ->capture_default_str();
        app->add_option("--checkpoint", checkpoint, "Policy checkpoint (neural modes)");
        app->add_flag("--no-augment", no_augment, "Decode the original image only");
        app->add_option("--max-starts", max_starts, "Cap on greedy start nodes per image")->capture_default_str();
        app->add_option("--iters", iters, "Local-search iterations")->check(CLI::NonNegativeNumber)->capture_default_str();
        app->add_option("--xmax", xmax, "Largest exchange segment")->check(CLI::PositiveNumber)->capture_default_str();
        app->add_option("--granularity", granularity, "Neighbour list size")->check(CLI::PositiveNumber)->capture_default_str();
        app->add_option("--search-penalty", search_penalty, "Penalty weight during search")->capture_default_str();
        app->add_option("--fix-penalty", fix_penalty, "Penalty weight during repair")->capture_default_str();
        app->add_option("--time-budget", time_budget_ms, "Local-search wall-clock cap in ms (0 = none)")
            ->check(CLI::NonNegativeNumber);
    }

    solver::SolveConfig build(std::uint64_t seed) const {
        return as_usage_error([&] { return make(seed); });
    }

    solver::SolveConfig make(std::uint64_t seed) const {
        solver::SolveConfig c;
        c.mode = solver::parse_solve_mode(mode);
        c.checkpoint = checkpoint;
        c.augment = !no_augment;
        c.max_starts = max_starts;
        c.ls.iterations = iters;
        c.ls.max_exchange = xmax;
        c.ls.granularity = granularity;
        c.ls.search_weights = PenaltyWeights::uniform(search_penalty);
        c.ls.fix_weights = PenaltyWeights::uniform(fix_penalty);
        c.time_budget_ms = time_budget_ms;
        c.seed = seed;
        c.validate();
        return c;
    }
};

struct TrainFlags {
    int epochs = 5;
    int steps = 100;
    int batch = 64;
    int starts = 0;
    double lr = 1e-4;
    std::string variant;
    int n = 20;
    int m = 2;
    bool full = false;
    std::string optimizer = "adam";
    int eval_instances = 0;
    std::string out;
    std::string curve;

    void add(CLI::App* app, const std::string& default_variant) {
        variant = default_variant;
        app->add_option("--epochs", epochs)->check(CLI::NonNegativeNumber)->capture_default_str();
        app->add_option("--steps", steps, "Steps per epoch")->check(CLI::PositiveNumber)->capture_default_str();
        app->add_option("--batch", batch)->check(CLI::PositiveNumber)->capture_default_str();
        app->add_option("--starts", starts, "Trajectories per instance (0 = g - 1)")->capture_default_str();
        app->add_option("--lr", lr)->capture_default_str();
        app->add_option("--variant", variant)->capture_default_str();
        app->add_option("--n", n, "Customers per training instance")->capture_default_str();
        app->add_option("--m", m, "Depots (multi-depot variants)")->capture_default_str();
        app->add_flag("--full", full, "Full-size network dimensions");
        app->add_option("--optimizer", optimizer)->check(CLI::IsMember({"adam", "ascent"}))->capture_default_str();
        app->add_option("--eval-instances", eval_instances, "Held-out instances scored after each epoch");
        app->add_option("--out", out, "Checkpoint to write")->required();
        app->add_option("--curve", curve, "Per-epoch CSV");
    }

    train::TrainConfig build(std::uint64_t seed) const {
        return as_usage_error([&] { return make(seed); });
    }

    train::TrainConfig make(std::uint64_t seed) const {
        train::TrainConfig c;
        c.epochs = epochs;
        c.steps_per_epoch = steps;
        c.batch = batch;
        c.starts = starts;
        c.lr = lr;
        c.variant = VariantFlags::from_name(variant);
        c.n = n;
        c.m = c.variant.multi_depot ? m : 1;
        c.seed = seed;
        c.desk = !full;
        c.optimizer = optimizer == "adam" ? train::OptimizerKind::adam : train::OptimizerKind::ascent;
        c.eval_instances = eval_instances;
        c.validate();
        return c;
    }
};

void print_epoch(const train::EpochStats& s) {
    std::cerr << "epoch " << s.epoch << " objective " << s.mean_objective;
    if (s.eval_objective == s.eval_objective) std::cerr << " eval " << s.eval_objective;
    std::cerr << " t " << std::fixed << std::setprecision(1) << s.seconds << "s\n" << std::defaultfloat;
}

void finish_training(const train::TrainResult& r, const TrainFlags& f) {
    nn::save_checkpoint(r.params, fs::path(f.out));
    if (!f.curve.empty()) train::write_curve_csv(f.curve, r.curve);
    std::cout << "wrote " << f.out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid neural / local-search vehicle routing solver"};
    app.set_config("--config", "", "TOML/INI file with option values (sections per subcommand)");
    app.require_subcommand(1);
    std::uint64_t seed = 1;
    app.add_option("--seed", seed, "Random seed")->capture_default_str();

    // generate
    auto* gen = app.add_subcommand("generate", "Write random instances as JSON");
    std::string gen_variant = "cvrp", gen_out;
    int gen_n = 20, gen_m = 2, gen_count = 1;
    double gen_capacity = 50.0;
    gen->add_option("--variant", gen_variant)->capture_default_str();
    gen->add_option("--n", gen_n, "Customers (cities for tsp)")->check(CLI::PositiveNumber)->capture_default_str();
    gen->add_option("--m", gen_m, "Depots for multi-depot variants")->check(CLI::PositiveNumber)->capture_default_str();
    gen->add_option("--capacity", gen_capacity)->capture_default_str();
    gen->add_option("--count", gen_count, "Instances; more than one needs --out as a directory")
        ->check(CLI::PositiveNumber);
    gen->add_option("--out", gen_out, "Output file or directory (stdout when omitted)");
    gen->add_option("--seed", seed, "Random seed");

    // train / finetune / adapt-tsp
    auto* tr = app.add_subcommand("train", "Pre-train a policy from scratch");
    TrainFlags train_flags;
    train_flags.add(tr, "mdvrp");
    tr->add_option("--seed", seed, "Random seed");

    auto* ft = app.add_subcommand("finetune", "Fine-tune a pre-trained policy on another variant");
    TrainFlags ft_flags;
    std::string ft_ckpt;
    ft_flags.add(ft, "cvrp");
    ft->add_option("--checkpoint", ft_ckpt, "Pre-trained checkpoint")->required()->check(CLI::ExistingFile);
    ft->add_option("--seed", seed, "Random seed");

    auto* ad = app.add_subcommand("adapt-tsp", "Strip routing-specific weights for TSP use");
    std::string ad_ckpt, ad_out;
    ad->add_option("--checkpoint", ad_ckpt)->required()->check(CLI::ExistingFile);
    ad->add_option("--out", ad_out)->required();

    // solve / trace / benchmark
    auto* sv = app.add_subcommand("solve", "Solve one instance");
    SolveFlags solve_flags;
    std::string sv_file, sv_out, sv_trace;
    solve_flags.add(sv);
    sv->add_option("file", sv_file, "Instance file")->required()->check(CLI::ExistingFile);
    sv->add_option("--out", sv_out, "Solution file to write");
    sv->add_option("--trace", sv_trace, "Convergence CSV to write");
    sv->add_option("--seed", seed, "Random seed");

    auto* tc = app.add_subcommand("trace", "Write the local-search convergence CSV for one instance");
    SolveFlags trace_flags;
    std::string tc_file, tc_out;
    trace_flags.add(tc);
    tc->add_option("file", tc_file, "Instance file")->required()->check(CLI::ExistingFile);
    tc->add_option("--out", tc_out, "CSV path (stdout when omitted)");
    tc->add_option("--seed", seed, "Random seed");

    auto* bm = app.add_subcommand("benchmark", "Solve every instance in a directory and report RPD");
    SolveFlags bench_flags;
    std::string bm_dir, bm_refs, bm_csv, bm_json, bm_solutions;
    int bm_threads = 0;
    bench_flags.add(bm);
    bm->add_option("dir", bm_dir, "Instance directory")->required()->check(CLI::ExistingDirectory);
    bm->add_option("--references", bm_refs, "Best-known objectives, `name value` per line")
        ->required()
        ->check(CLI::ExistingFile);
    bm->add_option("--threads", bm_threads, "Workers (default: HVRP_THREADS or 1)");
    bm->add_option("--report-csv", bm_csv);
    bm->add_option("--report-json", bm_json);
    bm->add_option("--solutions-dir", bm_solutions, "Directory for per-instance solution files");
    bm->add_option("--seed", seed, "Random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (gen->parsed()) {
            GenConfig g;
            g.variant = as_usage_error([&] { return VariantFlags::from_name(gen_variant); });
            g.n = gen_n;
            g.m = g.variant.multi_depot ? gen_m : 1;
            g.capacity = gen_capacity;
            if (gen_count == 1) {
                g.seed = seed;
                const std::string text = instance_to_json(generate_instance(g));
                if (gen_out.empty()) {
                    std::cout << text;
                } else {
                    std::ofstream f(gen_out, std::ios::binary);
                    if (!f) throw InvalidInput("cannot write " + gen_out);
                    f << text;
                }
            } else {
                if (gen_out.empty()) throw CLI::ValidationError("--count > 1 needs --out DIR");
                fs::create_directories(gen_out);
                for (int i = 0; i < gen_count; ++i) {
                    g.seed = seed + static_cast<std::uint64_t>(i);
                    const fs::path p = fs::path(gen_out) / (g.variant.name() + "_n" + std::to_string(g.n) + "_s" +
                                                            std::to_string(g.seed) + ".json");
                    std::ofstream f(p, std::ios::binary);
                    f << instance_to_json(generate_instance(g));
                }
            }
        } else if (tr->parsed()) {
            finish_training(train::train(train_flags.build(seed), print_epoch), train_flags);
        } else if (ft->parsed()) {
            const nn::PolicyParams pre = nn::load_checkpoint(fs::path(ft_ckpt));
            finish_training(train::finetune(pre, ft_flags.build(seed), print_epoch), ft_flags);
        } else if (ad->parsed()) {
            nn::save_checkpoint(train::adapt_for_tsp(nn::load_checkpoint(fs::path(ad_ckpt))), fs::path(ad_out));
            std::cout << "wrote " << ad_out << "\n";
        } else if (sv->parsed() || tc->parsed()) {
            const bool tracing = tc->parsed();
            const Instance inst = load_instance(tracing ? tc_file : sv_file);
            const solver::SolveConfig cfg = (tracing ? trace_flags : solve_flags).build(seed);
            const solver::SolveResult r = solver::solve(inst, cfg);
            const double cost = evaluate_solution(r.solution, inst, {}).distance;
            if (tracing) {
                if (tc_out.empty()) ls::write_trace_csv(std::cout, r.stats.trace);
                else ls::write_trace_csv(tc_out, r.stats.trace);
            } else {
                std::cout << std::setprecision(12) << "cost " << cost << "\n"
                          << "construction " << r.stats.construction_cost << "\n"
                          << "feasible " << (check_feasibility(r.solution, inst).feasible ? "yes" : "no") << "\n"
                          << "routes " << r.solution.routes.size() << "\n"
                          << "ls_iterations " << r.stats.ls_iterations << "\n"
                          << std::setprecision(6) << "time_ms " << r.stats.total_ms << "\n";
                if (!sv_out.empty()) write_solution(fs::path(sv_out), r.solution, cost);
                if (!sv_trace.empty()) ls::write_trace_csv(sv_trace, r.stats.trace);
            }
        } else if (bm->parsed()) {
            solver::BenchmarkOptions opts;
            opts.solve = bench_flags.build(seed);
            opts.threads = bm_threads;
            if (!bm_solutions.empty()) opts.solutions_dir = fs::path(bm_solutions);
            const solver::BenchmarkReport rep =
                solver::run_benchmark(bm_dir, solver::read_references(bm_refs), opts);
            if (!bm_csv.empty()) {
                std::ofstream f(bm_csv);
                solver::write_report_csv(f, rep);
            }
            if (!bm_json.empty()) {
                std::ofstream f(bm_json);
                solver::write_report_json(f, rep);
            }
            solver::write_report_csv(std::cout, rep);
            std::cout << "solved " << rep.solved() << " skipped " << rep.skipped() << " mean_rpd ";
            if (rep.mean_rpd) std::cout << std::setprecision(6) << *rep.mean_rpd << "\n";
            else std::cout << "undefined\n";
        }
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << "\n" << app.help();
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
