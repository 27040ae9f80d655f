#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hvrp/core/instance.hpp"
#include "hvrp/core/solution.hpp"
#include "hvrp/nn/autograd.hpp"
#include "hvrp/nn/environment.hpp"
#include "hvrp/nn/params.hpp"

namespace hvrp::nn {

/// Encoder inputs of a batch of same-shaped instances (equal g and m),
/// already normalized for the policy.
struct EncoderInput {
    int batch = 0;
    int g = 0;
    int m = 0;
    bool tsp = false;
    Tensor customer;  // (B*n, 5); unused for TSP
    Tensor depot;     // (B*m, 2); for TSP every node, (B*g, 2)
    Tensor edges;     // (B*g*g, 1) pairwise distances
};

/// Throws InvalidInput when the instances differ in size or depot count.
/// `coordinates_only` selects the TSP layout (every node embedded from its
/// coordinates).
EncoderInput make_encoder_input(std::span<const Instance* const> normalized, bool coordinates_only);
EncoderInput make_encoder_input(const Instance& normalized, bool coordinates_only);

/// Graph handles of the parameter tensors. Trainable tensors become
/// gradient leaves when `trainable` is set, constants otherwise.
struct ParamVars {
    std::map<std::string, Var> vars;
    Var operator[](const std::string& name) const;
};
ParamVars bind_params(Graph& graph, const PolicyParams& params, bool trainable);

/// How batch normalization behaves during a forward pass.
struct ForwardMode {
    bool training = false;
    /// Running statistics to update in training mode (may be null).
    PolicyParams* stats = nullptr;
};

struct Embeddings {
    Var nodes;  // (B*g, h_x), depots first inside each instance block
    Var edges;  // (B*g*g, h_e)
};
Embeddings embed_inputs(Graph& graph, const ParamVars& p, const PolicyParams& params, const EncoderInput& in);

struct EgatOutput {
    Var out;    // (B*g, h_x)
    Var alpha;  // (B*g, g), rows sum to one
};
EgatOutput egat_layer(Graph& graph, const ParamVars& p, const PolicyParams& params, int layer, Var x, Var edges,
                      int batch, int g, const ForwardMode& mode);

/// Embedding followed by every E-GAT layer. Throws NumericError naming the
/// layer when an activation is not finite.
Var encode(Graph& graph, const ParamVars& p, const PolicyParams& params, const EncoderInput& in,
           const ForwardMode& mode);

/// Evaluation-mode node embeddings of one normalized instance, (g, h_x).
Tensor encode_instance(const PolicyParams& params, const Instance& normalized);

struct DecoderCache {
    Var nodes;   // x^(L)
    Var keys;    // nodes * W_K^T
    Var values;  // nodes * W_V^T
    int batch = 0;
    int g = 0;
};
DecoderCache prepare_decoder(const ParamVars& p, Var nodes, int batch, int g);

/// Log-probabilities (R, g) for R = batch * group rows. `current` holds the
/// node index of each row, `dynamic` is (R, 4) (ignored in TSP mode), mask is
/// (R, g) with nonzero = admissible.
Var decode_log_probs(const ParamVars& p, const PolicyConfig& config, const DecoderCache& cache,
                     std::span<const int> current, std::span<const double> dynamic,
                     std::shared_ptr<const std::vector<std::uint8_t>> mask, int group);

/// Next-node distribution for one state given evaluation-mode embeddings.
/// Masked nodes get probability exactly 0.
std::vector<double> decode_step(const PolicyParams& params, const Tensor& embeddings, const Environment& env,
                                const RolloutState& state);

enum class DecodeMode { greedy, sample };

struct Trajectory {
    int start = 0;
    std::vector<int> actions;
    /// Log-probability of each action that went through the policy (forced
    /// opening actions are not listed).
    std::vector<double> step_log_probs;
    double log_prob = 0.0;
    double reward = 0.0;  // minus total distance
    Solution solution;
};

/// Graph-level record of a batched rollout, kept for the policy gradient.
struct RolloutRecord {
    std::vector<Trajectory> trajectories;  // instance-major: b * group + j
    std::vector<Var> step_log_probs;       // (R, g) per decoding step
    std::vector<std::vector<int>> step_actions;
    std::vector<std::vector<char>> step_active;
};

/// Decodes `group` trajectories for each environment in lockstep.
/// starts[b * group + j] is the first node of that trajectory: a depot start
/// selects that depot, a customer start departs depot 0 (when the customer
/// cannot open a route there the policy chooses freely). With `forced`,
/// actions are replayed instead of chosen (teacher forcing).
RolloutRecord run_rollouts(const ParamVars& p, const PolicyConfig& config, const DecoderCache& cache,
                           std::span<const Environment> envs, int group, std::span<const int> starts, DecodeMode mode,
                           std::mt19937_64* rng, const std::vector<std::vector<int>>* forced = nullptr);

/// Default start nodes 1..N for N = min(g - 1, max_starts).
std::vector<int> default_starts(int g, int count, int max_starts = 200);

struct RolloutOptions {
    /// Number of starts; 0 means g - 1 (capped by max_starts).
    int starts = 0;
    int max_starts = 200;
    DecodeMode mode = DecodeMode::greedy;
    std::uint64_t seed = 0;
};

/// Evaluation-mode multi-start rollouts on one instance (any coordinates;
/// normalization is applied internally). Solutions and rewards refer to the
/// original instance.
std::vector<Trajectory> rollout(const PolicyParams& params, const Instance& instance, const RolloutOptions& options);

/// Same over the 8 augmented images; returns 8 * N trajectories, image-major.
std::vector<Trajectory> rollout_augmented(const PolicyParams& params, const Instance& instance,
                                          const RolloutOptions& options);

/// Index of the best (highest reward) trajectory; ties go to the lowest index.
std::size_t best_trajectory(std::span<const Trajectory> trajectories);

}  // namespace hvrp::nn
