#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "hvrp/core/instance.hpp"
#include "hvrp/io/generator.hpp"
#include "hvrp/nn/params.hpp"
#include "hvrp/nn/policy.hpp"
#include "hvrp/train/optimizer.hpp"

namespace hvrp::train {

struct TrainConfig {
    int epochs = 5;             // E
    int steps_per_epoch = 100;  // T
    int batch = 64;             // B
    int starts = 0;             // N; 0 means g - 1
    double lr = 1e-4;           // eta
    VariantFlags variant{.multi_depot = true};
    int n = 20;
    int m = 2;
    std::uint64_t seed = 1;
    bool desk = true;  // desk-scale dims when initializing from scratch
    OptimizerKind optimizer = OptimizerKind::adam;
    /// Experiment hooks, off by default.
    bool normalize_advantages = false;
    double max_grad_norm = 0.0;
    /// Held-out greedy evaluation after every epoch (0 disables).
    int eval_instances = 0;
    std::uint64_t eval_seed = 0xe7a1;

    /// Throws InvalidInput on non-positive sizes or N > g - 1.
    void validate() const;
    GenConfig generator(std::uint64_t seed) const;
};

/// b_i = mean_j R(tau_i^j) of a row-major (batch x starts) reward matrix.
std::vector<double> shared_baseline(std::span<const double> rewards, int batch, int starts);

struct PolicyGradient {
    double objective = 0.0;  // surrogate J = 1/(BN) sum (R - b) log p
    double mean_reward = 0.0;
    GradientAccumulator grad;  // dJ/dtheta
    std::vector<nn::Trajectory> trajectories;
    std::vector<double> advantages;
};

struct GradientRequest {
    int starts = 0;  // per instance; 0 means g - 1
    /// Sampling source; unused with `forced`.
    std::mt19937_64* rng = nullptr;
    /// Replay these action lists instead of sampling (instance-major).
    const std::vector<std::vector<int>>* forced = nullptr;
    /// Use these advantages instead of R - b (instance-major).
    const std::vector<double>* advantages = nullptr;
    /// Batch-norm running statistics to update (null: leave untouched).
    nn::PolicyParams* stats = nullptr;
    bool normalize_advantages = false;
};

/// Samples B x N trajectories in training mode and back-propagates the
/// surrogate objective. All instances must share g and m.
PolicyGradient policy_gradient(const nn::PolicyParams& params, std::span<const Instance> batch,
                               const GradientRequest& request);

/// One update: gradient, optional clipping, optimizer step. Returns the mean
/// sampled reward. Throws NumericError on a non-finite gradient.
double reinforce_step(nn::PolicyParams& params, Optimizer& optimizer, std::span<const Instance> batch,
                      const TrainConfig& config, std::mt19937_64& rng);

struct EpochStats {
    int epoch = 0;
    double mean_objective = 0.0;  // mean sampled cost over the epoch
    double eval_objective = 0.0;  // held-out greedy cost (NaN when disabled)
    double seconds = 0.0;         // wall clock since training started
};

struct TrainResult {
    nn::PolicyParams params;
    std::vector<EpochStats> curve;
};

using ProgressFn = std::function<void(const EpochStats&)>;

/// Trains from scratch (desk or full dims per config).
TrainResult train(const TrainConfig& config, const ProgressFn& progress = {});
/// Continues training given parameters; E = 0 returns them unchanged.
TrainResult train_from(nn::PolicyParams params, const TrainConfig& config, const ProgressFn& progress = {});

/// Loads pre-trained parameters and trains on config.variant. Throws
/// CheckpointError when the dims do not match config.desk, InvalidInput for
/// a plain MDVRP target.
TrainResult finetune(const nn::PolicyParams& pretrained, const TrainConfig& config, const ProgressFn& progress = {});

/// Drops the customer embedding and the dynamic-feature columns of W_Q.
/// Throws CheckpointError when expected tensors are missing.
nn::PolicyParams adapt_for_tsp(const nn::PolicyParams& pretrained);

/// Mean over instances of the best greedy multi-start cost.
double evaluate_policy(const nn::PolicyParams& params, std::span<const Instance> instances, int starts = 0);

/// Held-out instances for the config's variant and size.
std::vector<Instance> held_out_set(const TrainConfig& config, int count);

void write_curve_csv(const std::filesystem::path& path, const std::vector<EpochStats>& curve);

}  // namespace hvrp::train
