#include "hvrp/nn/params.hpp"

#include <cmath>
#include <random>

#include "hvrp/core/errors.hpp"

namespace hvrp::nn {

PolicyConfig PolicyConfig::desk() {
    PolicyConfig c;
    c.hidden = 64;
    c.edge_hidden = 16;
    c.heads = 8;
    c.layers = 2;
    c.ff_hidden = 128;
    return c;
}

void PolicyConfig::validate() const {
    if (hidden <= 0 || edge_hidden <= 0 || heads <= 0 || layers < 0 || ff_hidden <= 0)
        throw InvalidInput("policy dims must be positive");
    if (hidden % heads != 0) throw InvalidInput("hidden size must be divisible by the head count");
    if (!(clip > 0.0)) throw InvalidInput("clip must be positive");
}

std::string layer_prefix(int layer) { return "egat." + std::to_string(layer) + "."; }

std::map<std::string, std::pair<int, int>> expected_shapes(const PolicyConfig& c) {
    const int h = c.hidden, he = c.edge_hidden;
    std::map<std::string, std::pair<int, int>> s;
    if (!c.tsp) {
        s["embed.customer.weight"] = {h, kCustomerFeatures};
        s["embed.customer.bias"] = {1, h};
    }
    s["embed.depot.weight"] = {h, kDepotFeatures};
    s["embed.depot.bias"] = {1, h};
    s["embed.edge.weight"] = {he, 1};
    s["embed.edge.bias"] = {1, he};
    for (int l = 0; l < c.layers; ++l) {
        const std::string p = layer_prefix(l);
        s[p + "w1"] = {h, 2 * h + he};
        s[p + "attn"] = {1, h};
        s[p + "w2"] = {h, h};
        for (const char* bn : {"bn1.", "bn2."}) {
            s[p + bn + "weight"] = {1, h};
            s[p + bn + "bias"] = {1, h};
            s[p + bn + "running_mean"] = {1, h};
            s[p + bn + "running_var"] = {1, h};
        }
        s[p + "ff1.weight"] = {c.ff_hidden, h};
        s[p + "ff1.bias"] = {1, c.ff_hidden};
        s[p + "ff2.weight"] = {h, c.ff_hidden};
        s[p + "ff2.bias"] = {1, h};
    }
    s["decoder.wq"] = {h, c.tsp ? h : h + kDynamicFeatures};
    s["decoder.wk"] = {h, h};
    s["decoder.wv"] = {h, h};
    s["decoder.wo"] = {h, h};
    return s;
}

Tensor& PolicyParams::at(const std::string& name) {
    auto it = tensors.find(name);
    if (it == tensors.end()) throw CheckpointError("missing tensor " + name);
    return it->second;
}

const Tensor& PolicyParams::at(const std::string& name) const {
    auto it = tensors.find(name);
    if (it == tensors.end()) throw CheckpointError("missing tensor " + name);
    return it->second;
}

bool PolicyParams::trainable(const std::string& name) {
    return name.find(".running_") == std::string::npos;
}

std::size_t PolicyParams::trainable_count() const {
    std::size_t n = 0;
    for (const auto& [name, t] : tensors)
        if (trainable(name)) n += t.size();
    return n;
}

void PolicyParams::check_shapes() const {
    const auto shapes = expected_shapes(config);
    for (const auto& [name, rc] : shapes) {
        auto it = tensors.find(name);
        if (it == tensors.end()) throw CheckpointError("missing tensor " + name);
        if (it->second.rows != rc.first || it->second.cols != rc.second)
            throw CheckpointError("tensor " + name + " has shape " + std::to_string(it->second.rows) + "x" +
                                  std::to_string(it->second.cols) + ", expected " + std::to_string(rc.first) + "x" +
                                  std::to_string(rc.second));
    }
    for (const auto& [name, t] : tensors)
        if (!shapes.count(name)) throw CheckpointError("unexpected tensor " + name);
}

PolicyParams init_params(const PolicyConfig& config, std::uint64_t seed) {
    config.validate();
    PolicyParams p;
    p.config = config;
    std::mt19937_64 rng(seed);
    // std::map iteration order makes the draw order independent of insertion.
    for (const auto& [name, rc] : expected_shapes(config)) {
        Tensor t(rc.first, rc.second);
        const bool bn = name.find(".bn") != std::string::npos;
        if (bn) {
            const bool ones = name.ends_with(".weight") || name.ends_with(".running_var");
            std::fill(t.data.begin(), t.data.end(), ones ? 1.0 : 0.0);
        } else {
            int fan_in = rc.second;
            if (name.ends_with(".bias")) {
                const std::string w = name.substr(0, name.size() - 4) + "weight";
                fan_in = expected_shapes(config).at(w).second;
            }
            const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
            std::uniform_real_distribution<double> u(-bound, bound);
            for (double& v : t.data) v = u(rng);
        }
        p.tensors.emplace(name, std::move(t));
    }
    return p;
}

}  // namespace hvrp::nn
