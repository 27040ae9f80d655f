// Acceptance checks. Usage: acceptance <fast|training|benchmark|all> [checkpoint-out]
//
// Prints one PASS/FAIL line per criterion. Exit status: 0 when everything
// evaluated passed, 1 on any failure, 77 when the benchmark data is absent.

#include <algorithm>
#include <chrono>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "hvrp/core/cost.hpp"
#include "hvrp/core/errors.hpp"
#include "hvrp/io/normalize.hpp"
#include "hvrp/io/parsers.hpp"
#include "hvrp/ls/crossover.hpp"
#include "hvrp/ls/local_search.hpp"
#include "hvrp/ls/operators.hpp"
#include "hvrp/ls/search.hpp"
#include "hvrp/nn/augment.hpp"
#include "hvrp/nn/checkpoint.hpp"
#include "hvrp/nn/params.hpp"
#include "hvrp/solver/initial.hpp"
#include "hvrp/solver/rpd.hpp"
#include "hvrp/solver/solve.hpp"
#include "hvrp/train/reinforce.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace hvrp;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
    bool pass = false;
    std::string detail;
};

int failures = 0;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

void report(int id, const std::string& title, const Verdict& v) {
    std::cout << (v.pass ? "PASS" : "FAIL") << "  [" << id << "] " << title << ": " << v.detail << std::endl;
    if (!v.pass) ++failures;
}

void run(int id, const std::string& title, const std::function<Verdict()>& body) {
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    report(id, title, v);
}

const PenaltyWeights kSearchW = PenaltyWeights::uniform(0.1);

// 1. Every operator's reported delta equals the oracle's full re-evaluation.
Verdict operator_deltas() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(101);
    long checked[5] = {0, 0, 0, 0, 0};
    double worst = 0.0;
    const long target = 10000;
    for (int k = 0; *std::min_element(checked, checked + 5) < target; ++k) {
        const std::string& v = support::variant_names()[static_cast<std::size_t>(k % 7)];
        const int n = k % 2 == 0 ? 10 : 30;
        const Instance inst = support::generated(v, n, 50000 + static_cast<std::uint64_t>(k), 3);
        ls::Rng init(static_cast<std::uint64_t>(k));
        ls::SearchState s(inst, ls::make_random(inst, init), kSearchW);
        std::uniform_int_distribution<int> pick(inst.num_depots(), inst.size() - 1);
        for (int trial = 0; trial < 500; ++trial) {
            const int op = trial % 5;
            const double before = oracle::penalized(inst, s.solution(), 0.1);
            ls::MoveResult r;
            if (op < 3) {
                const int a = pick(rng), b = pick(rng);
                if (op == 0) {
                    const int x = 1 + static_cast<int>(rng() % 3);
                    const int m = static_cast<int>(rng() % static_cast<unsigned>(x + 1));
                    r = ls::op_exchange(s, a, b, x, m, ls::ApplyMode::always);
                } else if (op == 1) {
                    r = ls::op_move_two_reversed(s, a, b, ls::ApplyMode::always);
                } else {
                    r = ls::op_two_opt(s, a, b, ls::ApplyMode::always);
                }
            } else {
                const int i = static_cast<int>(rng() % static_cast<unsigned>(s.num_routes()));
                const int j = static_cast<int>(rng() % static_cast<unsigned>(s.num_routes()));
                r = op == 3 ? ls::op_relocate_star(s, i, j, ls::ApplyMode::always)
                            : ls::op_swap_star(s, i, j, ls::ApplyMode::always);
            }
            if (!r.applicable) continue;
            const double after = oracle::penalized(inst, s.solution(), 0.1);
            worst = std::max(worst, std::abs((after - before) - r.delta));
            if (!oracle::is_partition(inst, s.solution())) return {false, "move broke the customer partition"};
            ++checked[op];
        }
    }
    const double secs = seconds_since(t0);
    const bool ok = worst <= 1e-9 && secs < 60.0;
    return {ok, fmt("moves per operator >= %ld (exchange %ld, pair %ld, 2-opt %ld, relocate* %ld, swap* %ld), "
                    "max |delta - re-evaluation| %.3g (<= 1e-9), %.1fs (< 60s)",
                    target, checked[0], checked[1], checked[2], checked[3], checked[4], worst, secs)};
}

// 2. greedy+ls with I = 50 against exhaustive enumeration on n <= 8 CVRPs.
Verdict brute_force_optimality() {
    const auto t0 = Clock::now();
    int optimal = 0, within = 0;
    double worst_gap = 0.0;
    const int count = 200;
    for (int k = 0; k < count; ++k) {
        const int n = 4 + k % 5;
        const Instance inst = support::generated("cvrp", n, 70000 + static_cast<std::uint64_t>(k));
        solver::SolveConfig c;
        c.mode = solver::SolveMode::greedy_ls;
        c.ls.iterations = 50;
        c.seed = static_cast<std::uint64_t>(k + 1);
        const solver::SolveResult r = solver::solve(inst, c);
        const double best = oracle::brute_force_cvrp(inst);
        const double z = oracle::distance(inst, r.solution);
        const double gap = (z - best) / best;
        worst_gap = std::max(worst_gap, gap);
        if (gap <= 1e-9) ++optimal;
        else if (gap <= 0.02) ++within;
    }
    const double secs = seconds_since(t0);
    const bool ok = optimal >= 0.9 * count && optimal + within == count && secs < 300.0;
    return {ok, fmt("optimal on %d/%d (>= 90%%), remainder within 2%%: %d/%d, worst gap %.4f%%, %.1fs (< 300s)",
                    optimal, count, within, count - optimal, 100.0 * worst_gap, secs)};
}

// 3. Every solution returned by solve passes check_feasibility.
Verdict feasibility_guarantee() {
    const auto t0 = Clock::now();
    const int per_variant = 1000;
    int total = 0, feasible = 0;
    std::string first_bad;
    for (const std::string& v : support::variant_names()) {
        for (int k = 0; k < per_variant; ++k) {
            const std::uint64_t seed = 90000 + static_cast<std::uint64_t>(k);
            const Instance inst = support::generated(v, 20, seed, 3);
            solver::SolveConfig c;
            c.mode = k % 2 == 0 ? solver::SolveMode::greedy_ls : solver::SolveMode::random_ls;
            c.ls.iterations = 5;
            c.seed = seed;
            ++total;
            bool ok = false;
            try {
                ok = check_feasibility(solver::solve(inst, c).solution, inst).feasible;
            } catch (const std::exception&) {
                ok = false;
            }
            feasible += ok;
            if (!ok && first_bad.empty()) first_bad = v + " seed " + std::to_string(seed);
        }
    }
    std::string detail = fmt("%d/%d feasible across 7 variants x %d instances (n = 20, I = 5), %.1fs", feasible,
                             total, per_variant, seconds_since(t0));
    if (!first_bad.empty()) detail += ", first failure " + first_bad;
    return {feasible == total, detail};
}

// 4. Best-so-far traces never increase.
Verdict monotone_incumbent() {
    const int runs = 500;
    int monotone = 0;
    for (int k = 0; k < runs; ++k) {
        const Instance inst =
            support::generated(support::variant_names()[static_cast<std::size_t>(k % 7)], 20, 110000 + k, 3);
        ls::Rng rng(static_cast<std::uint64_t>(k));
        ls::LSConfig c;
        c.iterations = 10;
        c.seed = static_cast<std::uint64_t>(k);
        const ls::LSResult r = ls::run_local_search(ls::make_random(inst, rng), inst, c);
        bool ok = r.trace.size() == 11;
        for (std::size_t i = 1; ok && i < r.trace.size(); ++i) ok = r.trace[i].best_cost <= r.trace[i - 1].best_cost;
        monotone += ok;
    }
    return {monotone == runs, fmt("%d/%d traces non-increasing (n = 20, I = 10)", monotone, runs)};
}

// 5. Reverse-mode gradient against central differences, tensor by tensor.
Verdict gradient_correctness() {
    const auto t0 = Clock::now();
    const nn::PolicyParams params = nn::init_params(nn::PolicyConfig::desk(), 5);
    double worst = 0.0;
    std::string worst_name;
    int tensors = 0, zero_tensors = 0;
    double zero_fd = 0.0;
    auto check_batch = [&](const std::vector<Instance>& batch, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        train::GradientRequest sample;
        sample.starts = 2;
        sample.rng = &rng;
        const train::PolicyGradient first = train::policy_gradient(params, batch, sample);
        std::vector<std::vector<int>> actions;
        for (const auto& t : first.trajectories) actions.push_back(t.actions);
        std::vector<double> adv;
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (std::size_t i = 0; i < actions.size(); ++i) adv.push_back(u(rng));
        train::GradientRequest fixed;
        fixed.starts = 2;
        fixed.forced = &actions;
        fixed.advantages = &adv;
        const train::PolicyGradient analytic = train::policy_gradient(params, batch, fixed);
        auto objective = [&](const nn::PolicyParams& p) { return train::policy_gradient(p, batch, fixed).objective; };

        std::normal_distribution<double> gauss(0.0, 1.0);
        const double eps = 1e-6;
        for (const auto& [name, g] : analytic.grad.grads) {
            // Directional derivative along a random unit direction covering
            // the whole tensor, plus a few single coordinates.
            std::vector<double> dir(g.data.size());
            double norm = 0.0;
            for (double& d : dir) {
                d = gauss(rng);
                norm += d * d;
            }
            norm = std::sqrt(norm);
            double a_dir = 0.0;
            nn::PolicyParams plus = params, minus = params;
            for (std::size_t i = 0; i < dir.size(); ++i) {
                dir[i] /= norm;
                a_dir += g.data[i] * dir[i];
                plus.at(name).data[i] += eps * dir[i];
                minus.at(name).data[i] -= eps * dir[i];
            }
            const double fd_dir = (objective(plus) - objective(minus)) / (2 * eps);
            double diff2 = (a_dir - fd_dir) * (a_dir - fd_dir), ref2 = fd_dir * fd_dir;
            for (int s = 0; s < 4; ++s) {
                const std::size_t i = static_cast<std::size_t>(rng() % g.data.size());
                nn::PolicyParams p = params, q = params;
                p.at(name).data[i] += eps;
                q.at(name).data[i] -= eps;
                const double fd = (objective(p) - objective(q)) / (2 * eps);
                diff2 += (g.data[i] - fd) * (g.data[i] - fd);
                ref2 += fd * fd;
            }
            ++tensors;
            // A bias feeding a training-mode batch norm has a mathematically
            // zero gradient: the analytic side is round-off (~1e-18) and the
            // difference quotient is noise (~1e-10), so relative error is
            // meaningless there and both are bounded absolutely instead.
            double a2 = 0.0;
            for (double x : g.data) a2 += x * x;
            if (std::sqrt(a2) <= 1e-12) {
                ++zero_tensors;
                zero_fd = std::max(zero_fd, std::sqrt(ref2));
                continue;
            }
            const double rel = std::sqrt(diff2 / ref2);
            if (rel > worst) {
                worst = rel;
                worst_name = name;
            }
        }
    };
    // g = 5 nodes: one depot and four customers, then two depots and three.
    check_batch({support::generated("cvrp", 4, 1), support::generated("cvrp", 4, 2)}, 11);
    check_batch({support::generated("mdvrptw", 3, 3, 2), support::generated("mdvrptw", 3, 4, 2)}, 12);

    // Every trajectory of this instance costs 6, so every advantage is zero.
    const Instance flat = support::make_instance({{0, 0}}, {{1, 0, 5}, {0, 1, 5}, {-1, 0, 5}, {0, -1, 5}}, 5);
    std::mt19937_64 rng(1);
    train::GradientRequest req;
    req.starts = 2;
    req.rng = &rng;
    const std::vector<Instance> batch{flat, flat};
    const bool zero = train::policy_gradient(params, batch, req).grad.all_zero();

    const double secs = seconds_since(t0);
    const bool ok = worst <= 1e-4 && zero_fd <= 1e-8 && zero && secs < 120.0;
    return {ok, fmt("%d tensor checks, worst relative error %.3g (%s) (<= 1e-4); %d tensors with zero "
                    "gradient, largest difference quotient there %.2g (<= 1e-8); equal-reward gradient %s; %.1fs "
                    "(< 120s)",
                    tensors, worst, worst_name.c_str(), zero_tensors, zero_fd, zero ? "exactly zero" : "NONZERO",
                    secs)};
}

// 8. Augmented images preserve cost; the best image is never worse than the original.
Verdict augmentation_invariance() {
    const auto t0 = Clock::now();
    const nn::PolicyParams routing = nn::init_params(nn::PolicyConfig::desk(), 8);
    const nn::PolicyParams tsp = train::adapt_for_tsp(routing);
    double worst_spread = 0.0;
    int not_worse = 0;
    const int count = 1000;
    for (int k = 0; k < count; ++k) {
        const std::string& v = support::variant_names()[static_cast<std::size_t>(k % 7)];
        const Instance inst = support::generated(v, 12, 130000 + static_cast<std::uint64_t>(k), 3);
        const Instance norm = normalize_for_policy(inst).instance;
        const Solution fixed = solver::greedy_initial(norm);
        const auto images = nn::augment_x8(norm);
        const double base = evaluate_solution(fixed, images[0], kSearchW).penalized;
        for (const Instance& img : images)
            worst_spread = std::max(worst_spread, std::abs(evaluate_solution(fixed, img, kSearchW).penalized - base));

        const nn::PolicyParams& p = inst.variant().tsp_mode ? tsp : routing;
        const double single = evaluate_solution(solver::neural_construct(inst, p, false, 200), inst, {}).distance;
        const double best8 = evaluate_solution(solver::neural_construct(inst, p, true, 200), inst, {}).distance;
        not_worse += best8 <= single + 1e-12;
    }
    const bool ok = worst_spread <= 1e-9 && not_worse == count;
    return {ok, fmt("max cost spread over 8 images %.3g (<= 1e-9), min-over-8 <= single image on %d/%d, %.1fs",
                    worst_spread, not_worse, count, seconds_since(t0))};
}

// 9 (metric half). RPD reproduces two published table entries.
Verdict rpd_values() {
    const double a = solver::compute_rpd(577.0, 577.0);
    const double b = solver::compute_rpd(28157.0, 27591.0);
    const bool ok = std::abs(a - 0.0) <= 1e-3 && std::abs(b - 2.051) <= 1e-3;
    return {ok, fmt("rpd(577, 577) = %.4f%% (0.000), rpd(28157, 27591) = %.4f%% (2.051), tolerance 0.001", a, b)};
}

// 11. SREX offspring are partitions and the kept child is the cheaper one.
Verdict srex_integrity() {
    const int count = 10000;
    int partitions = 0, ordered = 0;
    for (int k = 0; k < count; ++k) {
        const std::string& v = support::variant_names()[static_cast<std::size_t>(k % 6)];
        const Instance inst = support::generated(v, 10 + k % 31, 150000 + static_cast<std::uint64_t>(k), 3);
        ls::Rng rng(static_cast<std::uint64_t>(k));
        const Solution pa = ls::make_random(inst, rng), pb = ls::make_random(inst, rng);
        const ls::SrexOutcome out = ls::srex_detailed(pa, pb, inst, kSearchW, rng);
        partitions += oracle::is_partition(inst, out.offspring) && oracle::is_partition(inst, out.discarded);
        ordered += out.offspring_cost <= out.discarded_cost;
    }
    return {partitions == count && ordered == count,
            fmt("%d/%d offspring serve every customer exactly once, %d/%d kept cost <= discarded cost", partitions,
                count, ordered, count)};
}

// 6 and 7.
void training_criteria(const std::string& checkpoint_out) {
    const auto t0 = Clock::now();
    train::TrainConfig cfg;  // MDVRP, n = 20, m = 2, desk dims, 5 x 100 x 64
    cfg.seed = 1;
    const std::vector<Instance> held_out = train::held_out_set(cfg, 512);
    const nn::PolicyParams initial = nn::init_params(nn::PolicyConfig::desk(), cfg.seed);
    const double before = train::evaluate_policy(initial, held_out);
    const train::TrainResult pre = train::train(cfg, [](const train::EpochStats& e) {
        std::cout << "  epoch " << e.epoch << " mean objective " << e.mean_objective << " (" << e.seconds << "s)"
                  << std::endl;
    });
    const double after = train::evaluate_policy(pre.params, held_out);
    const double secs = seconds_since(t0);
    const double reduction = (before - after) / before;
    if (!checkpoint_out.empty()) nn::save_checkpoint(pre.params, checkpoint_out);
    report(6, "training signal",
           {reduction >= 0.25 && secs < 1800.0,
            fmt("held-out (512) greedy mean objective %.4f -> %.4f, reduction %.1f%% (>= 25%%), %.0fs (< 1800s)",
                before, after, 100.0 * reduction, secs)});

    run(7, "transfer head start", [&] {
        train::TrainConfig c = cfg;
        c.variant = VariantFlags::from_name("cvrp");
        c.epochs = 1;
        c.eval_instances = 512;
        const train::TrainResult tuned = train::finetune(pre.params, c);
        const train::TrainResult scratch = train::train(c);
        const double ft = tuned.curve.at(0).eval_objective, sc = scratch.curve.at(0).eval_objective;
        return Verdict{ft < sc, fmt("CVRP epoch-1 held-out mean objective: fine-tuned %.4f vs from scratch %.4f", ft,
                                    sc)};
    });
}

// 9 (parsing half) and 10. Returns false when the data directory is missing.
bool benchmark_criteria() {
    const char* env = std::getenv("HVRP_BENCHMARK_DIR");
    const fs::path root = env ? fs::path(env) : fs::path("data/benchmarks");
    const fs::path cordeau = root / "cordeau";
    if (!fs::is_directory(cordeau)) {
        const std::string why = "benchmark data not found at " + cordeau.string() + " (set HVRP_BENCHMARK_DIR)";
        report(9, "Cordeau parsing", {false, why});
        report(10, "scaled benchmark quality", {false, why});
        return false;
    }
    run(9, "Cordeau parsing", [&] {
        int parsed = 0, errors = 0;
        std::string p01;
        for (const auto& e : fs::directory_iterator(cordeau)) {
            if (!e.is_regular_file()) continue;
            try {
                const Instance inst = load_instance(e.path());
                ++parsed;
                if (e.path().stem() == "p01")
                    p01 = fmt("p01 = (%d depots, %d customers)", inst.num_depots(), inst.num_customers());
            } catch (const std::exception&) {
                ++errors;
            }
        }
        const bool ok = parsed == 23 && errors == 0 && p01 == "p01 = (4 depots, 50 customers)";
        return Verdict{ok, fmt("%d instances parsed (23), %d errors, ", parsed, errors) +
                               (p01.empty() ? std::string("p01 missing") : p01)};
    });
    run(10, "scaled benchmark quality", [&] {
        const auto t0 = Clock::now();
        const Instance inst = load_instance(cordeau / "p01");
        solver::SolveConfig c;
        c.mode = solver::SolveMode::greedy_ls;
        c.ls.iterations = 250;
        const solver::SolveResult r = solver::solve(inst, c);
        const double secs = seconds_since(t0);
        const bool feasible = check_feasibility(r.solution, inst).feasible;
        const double rpd = solver::compute_rpd(r.stats.final_cost, 577.0);
        return Verdict{feasible && rpd <= 5.0 && secs < 120.0,
                       fmt("p01 objective %.2f, %.2f%% above 577 (<= 5%%), %s, %.1fs (< 120s)", r.stats.final_cost,
                           rpd, feasible ? "feasible" : "INFEASIBLE", secs)};
    });
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string suite = argc > 1 ? argv[1] : "fast";
    const std::string checkpoint_out = argc > 2 ? argv[2] : "";
    // A bare number selects one fast criterion.
    const int only = std::all_of(suite.begin(), suite.end(), ::isdigit) && !suite.empty() ? std::stoi(suite) : 0;
    const bool all = suite == "all";
    if (!all && !only && suite != "fast" && suite != "training" && suite != "benchmark") {
        std::cerr << "usage: acceptance <fast|training|benchmark|all|N> [checkpoint-out]\n";
        return 2;
    }
    const struct {
        int id;
        const char* title;
        Verdict (*body)();
    } fast[] = {
        {1, "operator-delta soundness", operator_deltas},   {2, "brute-force optimality", brute_force_optimality},
        {3, "feasibility guarantee", feasibility_guarantee}, {4, "monotone incumbent", monotone_incumbent},
        {5, "gradient correctness", gradient_correctness},   {8, "augmentation invariance", augmentation_invariance},
        {9, "RPD metric", rpd_values},                       {11, "SREX integrity", srex_integrity},
    };
    for (const auto& c : fast)
        if (all || suite == "fast" || only == c.id) run(c.id, c.title, c.body);

    bool data_present = true;
    if (all || suite == "training") training_criteria(checkpoint_out);
    if (all || suite == "benchmark") data_present = benchmark_criteria();

    if (!data_present && failures == 2) return 77;
    return failures == 0 ? 0 : 1;
}
