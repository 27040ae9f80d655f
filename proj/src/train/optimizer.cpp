#include "hvrp/train/optimizer.hpp"

#include <cmath>

#include "hvrp/core/errors.hpp"

namespace hvrp::train {

GradientAccumulator GradientAccumulator::zeros_like(const nn::PolicyParams& params) {
    GradientAccumulator g;
    for (const auto& [name, t] : params.tensors)
        if (nn::PolicyParams::trainable(name)) g.grads.emplace(name, nn::Tensor(t.rows, t.cols));
    return g;
}

void GradientAccumulator::zero() {
    for (auto& [name, t] : grads) std::fill(t.data.begin(), t.data.end(), 0.0);
}

void GradientAccumulator::check_shapes(const nn::PolicyParams& params) const {
    for (const auto& [name, t] : params.tensors) {
        if (!nn::PolicyParams::trainable(name)) continue;
        auto it = grads.find(name);
        if (it == grads.end()) throw CheckpointError("no gradient for " + name);
        if (it->second.rows != t.rows || it->second.cols != t.cols)
            throw CheckpointError("gradient shape mismatch for " + name);
    }
}

double GradientAccumulator::max_abs() const {
    double m = 0.0;
    for (const auto& [name, t] : grads)
        for (double v : t.data) m = std::max(m, std::abs(v));
    return m;
}

bool GradientAccumulator::all_zero() const {
    for (const auto& [name, t] : grads)
        for (double v : t.data)
            if (v != 0.0) return false;
    return true;
}

void PlainAscent::step(nn::PolicyParams& params, const GradientAccumulator& grad) {
    grad.check_shapes(params);
    if (lr_ == 0.0) return;
    for (auto& [name, t] : grad.grads) {
        auto& p = params.at(name).data;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] += lr_ * t.data[i];
    }
}

void Adam::step(nn::PolicyParams& params, const GradientAccumulator& grad) {
    grad.check_shapes(params);
    ++t_;
    if (lr_ == 0.0) return;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (const auto& [name, gt] : grad.grads) {
        auto& m = m_[name];
        auto& v = v_[name];
        if (m.empty()) {
            m.assign(gt.data.size(), 0.0);
            v.assign(gt.data.size(), 0.0);
        }
        auto& p = params.at(name).data;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double gi = gt.data[i];
            m[i] = beta1_ * m[i] + (1.0 - beta1_) * gi;
            v[i] = beta2_ * v[i] + (1.0 - beta2_) * gi * gi;
            p[i] += lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
        }
    }
}

std::unique_ptr<Optimizer> make_optimizer(OptimizerKind kind, double lr) {
    if (kind == OptimizerKind::ascent) return std::make_unique<PlainAscent>(lr);
    return std::make_unique<Adam>(lr);
}

}  // namespace hvrp::train
