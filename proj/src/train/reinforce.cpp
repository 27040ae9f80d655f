#include "hvrp/train/reinforce.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "hvrp/core/errors.hpp"
#include "hvrp/io/normalize.hpp"

namespace hvrp::train {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
    return splitmix(splitmix(splitmix(seed ^ splitmix(a)) ^ b) ^ c);
}

}  // namespace

void TrainConfig::validate() const {
    if (epochs < 0 || steps_per_epoch <= 0 || batch <= 0 || n <= 0 || m <= 0 || starts < 0)
        throw InvalidInput("training sizes must be positive");
    variant.validate();
    const int g = variant.tsp_mode ? n : n + (variant.multi_depot ? m : 1);
    if (starts > g - 1) throw InvalidInput("start count exceeds g - 1");
    if (!(lr >= 0.0)) throw InvalidInput("learning rate must be non-negative");
}

GenConfig TrainConfig::generator(std::uint64_t s) const {
    GenConfig gc;
    gc.variant = variant;
    gc.n = n;
    gc.m = variant.multi_depot ? m : 1;
    gc.seed = s;
    return gc;
}

std::vector<double> shared_baseline(std::span<const double> rewards, int batch, int starts) {
    if (batch < 0 || starts < 1 || rewards.size() != static_cast<std::size_t>(batch) * starts)
        throw InvalidInput("reward matrix does not match batch x starts");
    std::vector<double> b(static_cast<std::size_t>(batch), 0.0);
    for (int i = 0; i < batch; ++i) {
        double s = 0.0;
        for (int j = 0; j < starts; ++j) s += rewards[static_cast<std::size_t>(i) * starts + j];
        b[static_cast<std::size_t>(i)] = s / starts;
    }
    return b;
}

PolicyGradient policy_gradient(const nn::PolicyParams& params, std::span<const Instance> batch,
                               const GradientRequest& req) {
    if (batch.empty()) throw InvalidInput("empty training batch");
    const int B = static_cast<int>(batch.size());
    const int g = batch.front().size();

    std::vector<NormalizedInstance> norm;
    norm.reserve(batch.size());
    for (const Instance& inst : batch) norm.push_back(normalize_for_policy(inst));
    std::vector<const Instance*> feats;
    std::vector<nn::Environment> envs;
    for (int b = 0; b < B; ++b) {
        feats.push_back(&norm[static_cast<std::size_t>(b)].instance);
        envs.emplace_back(batch[static_cast<std::size_t>(b)], norm[static_cast<std::size_t>(b)].scale);
    }

    nn::Graph graph(true);
    nn::ParamVars p = nn::bind_params(graph, params, true);
    const nn::EncoderInput in = nn::make_encoder_input(feats, params.config.tsp);
    nn::Var x = nn::encode(graph, p, params, in, nn::ForwardMode{true, req.stats});
    nn::DecoderCache cache = nn::prepare_decoder(p, x, B, g);

    const std::vector<int> base = nn::default_starts(g, req.starts, std::numeric_limits<int>::max());
    const int N = static_cast<int>(base.size());
    std::vector<int> starts;
    for (int b = 0; b < B; ++b) starts.insert(starts.end(), base.begin(), base.end());
    nn::RolloutRecord rec = nn::run_rollouts(p, params.config, cache, envs, N, starts, nn::DecodeMode::sample,
                                             req.rng, req.forced);

    const int R = B * N;
    PolicyGradient out;
    std::vector<double> rewards(static_cast<std::size_t>(R));
    for (int r = 0; r < R; ++r) rewards[static_cast<std::size_t>(r)] = rec.trajectories[static_cast<std::size_t>(r)].reward;
    double total = 0.0;
    for (double v : rewards) total += v;
    out.mean_reward = total / R;

    if (req.advantages) {
        if (req.advantages->size() != static_cast<std::size_t>(R)) throw InvalidInput("advantage count mismatch");
        out.advantages = *req.advantages;
    } else {
        const auto base_line = shared_baseline(rewards, B, N);
        out.advantages.resize(static_cast<std::size_t>(R));
        for (int r = 0; r < R; ++r)
            out.advantages[static_cast<std::size_t>(r)] =
                rewards[static_cast<std::size_t>(r)] - base_line[static_cast<std::size_t>(r / N)];
        if (req.normalize_advantages) {
            double ss = 0.0;
            for (double a : out.advantages) ss += a * a;
            const double sd = std::sqrt(ss / R);
            if (sd > 0.0)
                for (double& a : out.advantages) a /= sd;
        }
    }

    std::vector<nn::Var> terms;
    for (std::size_t s = 0; s < rec.step_log_probs.size(); ++s) {
        std::vector<double> coef(static_cast<std::size_t>(R), 0.0);
        for (int r = 0; r < R; ++r)
            if (rec.step_active[s][static_cast<std::size_t>(r)])
                coef[static_cast<std::size_t>(r)] = out.advantages[static_cast<std::size_t>(r)] / R;
        terms.push_back(nn::weighted_pick_sum(rec.step_log_probs[s], rec.step_actions[s], std::move(coef)));
    }
    out.grad = GradientAccumulator::zeros_like(params);
    if (!terms.empty()) {
        nn::Var objective = nn::add_scalars(terms);
        out.objective = objective.value()[0];
        graph.backward(objective);
        for (auto& [name, t] : out.grad.grads) {
            const auto& gsrc = graph.grad(p[name]);
            std::copy(gsrc.begin(), gsrc.end(), t.data.begin());
        }
    }
    out.trajectories = std::move(rec.trajectories);
    return out;
}

double reinforce_step(nn::PolicyParams& params, Optimizer& optimizer, std::span<const Instance> batch,
                      const TrainConfig& config, std::mt19937_64& rng) {
    GradientRequest req;
    req.starts = config.starts;
    req.rng = &rng;
    req.stats = &params;
    req.normalize_advantages = config.normalize_advantages;
    PolicyGradient pg = policy_gradient(params, batch, req);
    double norm2 = 0.0;
    for (const auto& [name, t] : pg.grad.grads)
        for (double v : t.data) {
            if (!std::isfinite(v)) throw NumericError("non-finite gradient in tensor " + name);
            norm2 += v * v;
        }
    if (config.max_grad_norm > 0.0) {
        const double norm = std::sqrt(norm2);
        if (norm > config.max_grad_norm)
            for (auto& [name, t] : pg.grad.grads)
                for (double& v : t.data) v *= config.max_grad_norm / norm;
    }
    optimizer.step(params, pg.grad);
    return pg.mean_reward;
}

std::vector<Instance> held_out_set(const TrainConfig& config, int count) {
    std::vector<Instance> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out.push_back(generate_instance(config.generator(derive(config.eval_seed, 0xe7a1, static_cast<std::uint64_t>(i)))));
    return out;
}

double evaluate_policy(const nn::PolicyParams& params, std::span<const Instance> instances, int starts) {
    if (instances.empty()) return std::numeric_limits<double>::quiet_NaN();
    constexpr std::size_t kChunk = 64;
    double total = 0.0;
    std::size_t i = 0;
    while (i < instances.size()) {
        // Chunks of equal-shaped instances share one encoder pass.
        std::size_t j = i + 1;
        while (j < instances.size() && j - i < kChunk && instances[j].size() == instances[i].size() &&
               instances[j].num_depots() == instances[i].num_depots())
            ++j;
        const int B = static_cast<int>(j - i);
        const int g = instances[i].size();
        std::vector<NormalizedInstance> norm;
        std::vector<const Instance*> feats;
        std::vector<nn::Environment> envs;
        for (std::size_t k = i; k < j; ++k) norm.push_back(normalize_for_policy(instances[k]));
        for (int b = 0; b < B; ++b) {
            feats.push_back(&norm[static_cast<std::size_t>(b)].instance);
            envs.emplace_back(instances[i + static_cast<std::size_t>(b)], norm[static_cast<std::size_t>(b)].scale);
        }
        nn::Graph graph(false);
        nn::ParamVars p = nn::bind_params(graph, params, false);
        nn::Var x = nn::encode(graph, p, params, nn::make_encoder_input(feats, params.config.tsp), nn::ForwardMode{});
        nn::DecoderCache cache = nn::prepare_decoder(p, x, B, g);
        const std::vector<int> base = nn::default_starts(g, starts);
        const int N = static_cast<int>(base.size());
        std::vector<int> st;
        for (int b = 0; b < B; ++b) st.insert(st.end(), base.begin(), base.end());
        nn::RolloutRecord rec = nn::run_rollouts(p, params.config, cache, envs, N, st, nn::DecodeMode::greedy, nullptr);
        for (int b = 0; b < B; ++b) {
            double best = -std::numeric_limits<double>::infinity();
            for (int k = 0; k < N; ++k) best = std::max(best, rec.trajectories[static_cast<std::size_t>(b * N + k)].reward);
            total += -best;
        }
        i = j;
    }
    return total / static_cast<double>(instances.size());
}

TrainResult train_from(nn::PolicyParams params, const TrainConfig& config, const ProgressFn& progress) {
    config.validate();
    TrainResult result;
    auto optimizer = make_optimizer(config.optimizer, config.lr);
    std::mt19937_64 rng(derive(config.seed, 0x5a3b1e));
    const std::vector<Instance> held_out =
        config.eval_instances > 0 ? held_out_set(config, config.eval_instances) : std::vector<Instance>{};
    const auto t0 = std::chrono::steady_clock::now();
    const std::string variant_name = config.variant.name();
    for (int e = 0; e < config.epochs; ++e) {
        double sum = 0.0;
        for (int t = 0; t < config.steps_per_epoch; ++t) {
            std::vector<Instance> batch;
            batch.reserve(static_cast<std::size_t>(config.batch));
            for (int b = 0; b < config.batch; ++b)
                batch.push_back(generate_instance(config.generator(
                    derive(config.seed, static_cast<std::uint64_t>(e + 1),
                           static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(b)))));
            sum += -reinforce_step(params, *optimizer, batch, config, rng);
        }
        ++params.epochs_trained;
        EpochStats st;
        st.epoch = e + 1;
        st.mean_objective = sum / config.steps_per_epoch;
        st.eval_objective = held_out.empty() ? std::numeric_limits<double>::quiet_NaN()
                                             : evaluate_policy(params, held_out, config.starts);
        st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.curve.push_back(st);
        if (progress) progress(st);
    }
    if (config.epochs > 0 && (params.trained_on.empty() || params.trained_on.back() != variant_name))
        params.trained_on.push_back(variant_name);
    result.params = std::move(params);
    return result;
}

TrainResult train(const TrainConfig& config, const ProgressFn& progress) {
    config.validate();
    nn::PolicyConfig pc = config.desk ? nn::PolicyConfig::desk() : nn::PolicyConfig::full();
    pc.tsp = false;
    return train_from(nn::init_params(pc, config.seed), config, progress);
}

TrainResult finetune(const nn::PolicyParams& pretrained, const TrainConfig& config, const ProgressFn& progress) {
    config.validate();
    const nn::PolicyConfig want = config.desk ? nn::PolicyConfig::desk() : nn::PolicyConfig::full();
    const nn::PolicyConfig& have = pretrained.config;
    if (have.hidden != want.hidden || have.edge_hidden != want.edge_hidden || have.heads != want.heads ||
        have.layers != want.layers || have.ff_hidden != want.ff_hidden)
        throw CheckpointError("pre-trained dims do not match the requested profile");
    if (have.tsp != config.variant.tsp_mode)
        throw CheckpointError(config.variant.tsp_mode ? "TSP fine-tuning needs adapt_for_tsp parameters first"
                                                      : "TSP-adapted parameters cannot be fine-tuned on routing variants");
    if (config.variant == VariantFlags{.multi_depot = true})
        throw InvalidInput("fine-tuning targets a variant other than plain MDVRP");
    pretrained.check_shapes();
    return train_from(pretrained, config, progress);
}

nn::PolicyParams adapt_for_tsp(const nn::PolicyParams& pretrained) {
    if (pretrained.config.tsp) throw CheckpointError("parameters are already TSP-adapted");
    pretrained.check_shapes();
    nn::PolicyParams out = pretrained;
    out.tensors.erase("embed.customer.weight");
    out.tensors.erase("embed.customer.bias");
    const nn::Tensor& wq = pretrained.at("decoder.wq");
    const int h = pretrained.config.hidden;
    nn::Tensor sliced(h, h);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < h; ++c) sliced.at(r, c) = wq.at(r, c);
    out.tensors["decoder.wq"] = std::move(sliced);
    out.config.tsp = true;
    out.check_shapes();
    return out;
}

void write_curve_csv(const std::filesystem::path& path, const std::vector<EpochStats>& curve) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write " + path.string());
    out << "epoch,mean_objective,eval_objective,seconds\n" << std::setprecision(10);
    for (const auto& s : curve) {
        out << s.epoch << ',' << s.mean_objective << ',';
        if (std::isfinite(s.eval_objective)) out << s.eval_objective;
        out << ',' << s.seconds << '\n';
    }
}

}  // namespace hvrp::train
