#pragma once

#include <map>
#include <memory>
#include <string>

#include "hvrp/nn/params.hpp"

namespace hvrp::train {

/// Gradient of the objective for every trainable tensor.
struct GradientAccumulator {
    std::map<std::string, nn::Tensor> grads;

    static GradientAccumulator zeros_like(const nn::PolicyParams& params);
    void zero();
    /// Throws CheckpointError when a tensor is missing or misshapen.
    void check_shapes(const nn::PolicyParams& params) const;
    double max_abs() const;
    bool all_zero() const;
};

enum class OptimizerKind { adam, ascent };

/// Gradient-ascent step rules: params move along +grad.
class Optimizer {
public:
    virtual ~Optimizer() = default;
    virtual void step(nn::PolicyParams& params, const GradientAccumulator& grad) = 0;
};

/// theta += lr * grad
class PlainAscent final : public Optimizer {
public:
    explicit PlainAscent(double lr) : lr_(lr) {}
    void step(nn::PolicyParams& params, const GradientAccumulator& grad) override;

private:
    double lr_;
};

/// Adaptive moment estimation applied to the ascent direction.
class Adam final : public Optimizer {
public:
    explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}
    void step(nn::PolicyParams& params, const GradientAccumulator& grad) override;

private:
    double lr_, beta1_, beta2_, eps_;
    long long t_ = 0;
    std::map<std::string, std::vector<double>> m_, v_;
};

std::unique_ptr<Optimizer> make_optimizer(OptimizerKind kind, double lr);

}  // namespace hvrp::train
