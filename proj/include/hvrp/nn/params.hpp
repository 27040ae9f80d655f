#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hvrp/core/variant.hpp"
#include "hvrp/nn/autograd.hpp"

namespace hvrp::nn {

struct PolicyConfig {
    int hidden = 256;       // h_x
    int edge_hidden = 32;   // h_e
    int heads = 16;         // H
    int layers = 5;         // L
    int ff_hidden = 512;
    double clip = 10.0;     // C
    double leaky_slope = 0.2;
    double bn_eps = 1e-5;
    double bn_momentum = 0.1;
    /// Set after adapt_for_tsp: no customer embedding, no dynamic query inputs.
    bool tsp = false;

    static PolicyConfig full() { return {}; }
    /// h_x=64, h_e=16, L=2, H=8.
    static PolicyConfig desk();

    /// Throws InvalidInput on non-positive dims or hidden % heads != 0.
    void validate() const;
    int head_dim() const { return hidden / heads; }

    friend bool operator==(const PolicyConfig&, const PolicyConfig&) = default;
};

inline constexpr int kCustomerFeatures = 5;  // x, y, demand, tw_early, tw_late
inline constexpr int kDepotFeatures = 2;     // x, y
inline constexpr int kDynamicFeatures = 4;

/// Named tensors of the policy. BatchNorm running statistics are stored here
/// as well (names ending in ".running_mean" / ".running_var") but are not
/// trainable.
struct PolicyParams {
    PolicyConfig config;
    std::map<std::string, Tensor> tensors;
    /// Variant names the parameters were trained on, oldest first.
    std::vector<std::string> trained_on;
    int epochs_trained = 0;

    Tensor& at(const std::string& name);
    const Tensor& at(const std::string& name) const;
    bool has(const std::string& name) const { return tensors.count(name) != 0; }

    static bool trainable(const std::string& name);
    std::size_t trainable_count() const;

    /// Throws CheckpointError when a tensor is missing or has the wrong shape.
    void check_shapes() const;

    friend bool operator==(const PolicyParams&, const PolicyParams&) = default;
};

/// Expected (rows, cols) of every tensor for a config.
std::map<std::string, std::pair<int, int>> expected_shapes(const PolicyConfig& config);

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights; BN scale 1, shift 0,
/// running mean 0, running var 1.
PolicyParams init_params(const PolicyConfig& config, std::uint64_t seed);

std::string layer_prefix(int layer);

}  // namespace hvrp::nn
