#include "hvrp/nn/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hvrp/core/cost.hpp"
#include "hvrp/core/errors.hpp"
#include "hvrp/io/normalize.hpp"
#include "hvrp/nn/augment.hpp"

namespace hvrp::nn {

EncoderInput make_encoder_input(std::span<const Instance* const> insts, bool coordinates_only) {
    if (insts.empty()) throw InvalidInput("empty encoder batch");
    EncoderInput in;
    in.batch = static_cast<int>(insts.size());
    in.g = insts.front()->size();
    in.m = insts.front()->num_depots();
    in.tsp = coordinates_only;
    const int B = in.batch, g = in.g, m = in.m, n = g - m;
    for (const Instance* p : insts)
        if (p->size() != g || p->num_depots() != m)
            throw InvalidInput("encoder batch mixes instance shapes");
    if (coordinates_only) {
        in.depot = Tensor(B * g, kDepotFeatures);
    } else {
        in.depot = Tensor(B * m, kDepotFeatures);
        in.customer = Tensor(B * n, kCustomerFeatures);
    }
    in.edges = Tensor(B * g * g, 1);
    for (int b = 0; b < B; ++b) {
        const Instance& inst = *insts[static_cast<std::size_t>(b)];
        const bool tw = inst.variant().time_windows;
        for (int i = 0; i < g; ++i) {
            const Node& nd = inst.node(i);
            if (coordinates_only || i < m) {
                const int row = coordinates_only ? b * g + i : b * m + i;
                in.depot.at(row, 0) = nd.x;
                in.depot.at(row, 1) = nd.y;
            } else {
                const int row = b * n + (i - m);
                in.customer.at(row, 0) = nd.x;
                in.customer.at(row, 1) = nd.y;
                in.customer.at(row, 2) = nd.is_backhaul ? -nd.demand : nd.demand;
                in.customer.at(row, 3) = tw ? nd.tw_early : 0.0;
                in.customer.at(row, 4) = tw ? nd.tw_late : 1.0;
            }
            for (int j = 0; j < g; ++j) in.edges.at((b * g + i) * g + j, 0) = inst.dist(i, j);
        }
    }
    return in;
}

EncoderInput make_encoder_input(const Instance& normalized, bool coordinates_only) {
    const Instance* p = &normalized;
    return make_encoder_input(std::span<const Instance* const>(&p, 1), coordinates_only);
}

Var ParamVars::operator[](const std::string& name) const {
    auto it = vars.find(name);
    if (it == vars.end()) throw CheckpointError("parameter " + name + " is not bound");
    return it->second;
}

ParamVars bind_params(Graph& graph, const PolicyParams& params, bool trainable) {
    ParamVars p;
    for (const auto& [name, t] : params.tensors) {
        if (!PolicyParams::trainable(name)) continue;
        p.vars.emplace(name, trainable ? graph.parameter(t) : graph.constant(t));
    }
    return p;
}

Embeddings embed_inputs(Graph& graph, const ParamVars& p, const PolicyParams& params, const EncoderInput& in) {
    const PolicyConfig& c = params.config;
    if (in.tsp != c.tsp && in.tsp) throw InvalidInput("coordinate-only inputs need TSP-adapted parameters");
    if (c.tsp && !in.tsp) throw InvalidInput("TSP-adapted parameters need coordinate-only inputs");
    Embeddings e;
    Var dep = linear(graph.constant(in.depot), p["embed.depot.weight"], p["embed.depot.bias"]);
    if (in.tsp) {
        e.nodes = dep;
    } else {
        Var cus = linear(graph.constant(in.customer), p["embed.customer.weight"], p["embed.customer.bias"]);
        const int B = in.batch, g = in.g, m = in.m, n = g - m;
        if (B == 1) {
            e.nodes = concat_rows(dep, cus);
        } else {
            Var all = concat_rows(dep, cus);
            std::vector<int> order(static_cast<std::size_t>(B) * g);
            for (int b = 0; b < B; ++b)
                for (int i = 0; i < g; ++i)
                    order[static_cast<std::size_t>(b) * g + i] = i < m ? b * m + i : B * m + b * n + (i - m);
            e.nodes = gather_rows(all, std::move(order));
        }
    }
    e.edges = linear(graph.constant(in.edges), p["embed.edge.weight"], p["embed.edge.bias"]);
    return e;
}

namespace {

BatchNormState bn_state(const PolicyParams& params, const std::string& prefix, const ForwardMode& mode) {
    BatchNormState st;
    st.training = mode.training;
    st.eps = params.config.bn_eps;
    st.momentum = params.config.bn_momentum;
    st.running_mean = &params.at(prefix + "running_mean").data;
    st.running_var = &params.at(prefix + "running_var").data;
    if (mode.training && mode.stats) {
        st.update_mean = &mode.stats->at(prefix + "running_mean").data;
        st.update_var = &mode.stats->at(prefix + "running_var").data;
    }
    return st;
}

void check_finite(Var v, int layer) {
    for (double x : v.value())
        if (!std::isfinite(x))
            throw NumericError("non-finite activation in encoder layer " + std::to_string(layer));
}

}  // namespace

EgatOutput egat_layer(Graph& graph, const ParamVars& p, const PolicyParams& params, int layer, Var x, Var edges,
                      int batch, int g, const ForwardMode& mode) {
    (void)graph;
    const PolicyConfig& c = params.config;
    const int h = c.hidden, he = c.edge_hidden;
    const std::string pre = layer_prefix(layer);
    Var w1 = p[pre + "w1"];
    Var src = matmul_nt(x, column_slice(w1, 0, h));
    Var dst = matmul_nt(x, column_slice(w1, h, 2 * h));
    Var edg = matmul_nt(edges, column_slice(w1, 2 * h, 2 * h + he));
    Var z = leaky_relu(pairwise_sum(src, dst, edg, batch, g), c.leaky_slope);
    Var scores = reshape(matmul_nt(z, p[pre + "attn"]), batch * g, g);
    EgatOutput out;
    out.alpha = softmax_rows(scores);
    Var msg = batched_matmul(out.alpha, matmul_nt(x, p[pre + "w2"]), batch);
    Var h1 = batch_norm(add(x, msg), p[pre + "bn1.weight"], p[pre + "bn1.bias"], bn_state(params, pre + "bn1.", mode));
    Var ff = linear(relu(linear(h1, p[pre + "ff1.weight"], p[pre + "ff1.bias"])), p[pre + "ff2.weight"],
                    p[pre + "ff2.bias"]);
    out.out = batch_norm(add(h1, ff), p[pre + "bn2.weight"], p[pre + "bn2.bias"], bn_state(params, pre + "bn2.", mode));
    check_finite(out.out, layer);
    return out;
}

Var encode(Graph& graph, const ParamVars& p, const PolicyParams& params, const EncoderInput& in,
           const ForwardMode& mode) {
    Embeddings e = embed_inputs(graph, p, params, in);
    check_finite(e.nodes, 0);
    Var x = e.nodes;
    for (int l = 0; l < params.config.layers; ++l)
        x = egat_layer(graph, p, params, l, x, e.edges, in.batch, in.g, mode).out;
    return x;
}

Tensor encode_instance(const PolicyParams& params, const Instance& normalized) {
    Graph graph(false);
    ParamVars p = bind_params(graph, params, false);
    Var x = encode(graph, p, params, make_encoder_input(normalized, params.config.tsp), ForwardMode{});
    return Tensor(x.rows(), x.cols(), std::vector<double>(x.value().begin(), x.value().end()));
}

DecoderCache prepare_decoder(const ParamVars& p, Var nodes, int batch, int g) {
    DecoderCache c;
    c.nodes = nodes;
    c.keys = matmul_nt(nodes, p["decoder.wk"]);
    c.values = matmul_nt(nodes, p["decoder.wv"]);
    c.batch = batch;
    c.g = g;
    return c;
}

Var decode_log_probs(const ParamVars& p, const PolicyConfig& config, const DecoderCache& cache,
                     std::span<const int> current, std::span<const double> dynamic,
                     std::shared_ptr<const std::vector<std::uint8_t>> mask, int group) {
    Graph& graph = *cache.nodes.graph;
    const int R = static_cast<int>(current.size());
    if (R != cache.batch * group) throw ContractViolation("decode: row count does not match batch * group");
    std::vector<int> rows(static_cast<std::size_t>(R));
    for (int r = 0; r < R; ++r) rows[static_cast<std::size_t>(r)] = (r / group) * cache.g + current[static_cast<std::size_t>(r)];
    Var cur = gather_rows(cache.nodes, std::move(rows));
    Var qin = cur;
    if (!config.tsp) {
        if (dynamic.size() != static_cast<std::size_t>(R) * kDynamicFeatures)
            throw ContractViolation("decode: dynamic feature block has wrong size");
        qin = concat_cols(cur, graph.constant(Tensor(R, kDynamicFeatures,
                                                     std::vector<double>(dynamic.begin(), dynamic.end()))));
    }
    Var q = matmul_nt(qin, p["decoder.wq"]);
    Var glimpse = multi_head_glimpse(q, cache.keys, cache.values, mask, group, config.heads);
    Var ctx = matmul_nt(glimpse, p["decoder.wo"]);
    return pointer_log_probs(ctx, cache.keys, mask, group, config.clip,
                             1.0 / std::sqrt(static_cast<double>(config.hidden)));
}

std::vector<double> decode_step(const PolicyParams& params, const Tensor& embeddings, const Environment& env,
                                const RolloutState& state) {
    Graph graph(false);
    ParamVars p = bind_params(graph, params, false);
    const int g = env.size();
    if (embeddings.rows != g) throw InvalidInput("embeddings do not match the environment");
    DecoderCache cache = prepare_decoder(p, graph.constant(embeddings), 1, g);
    auto mask = std::make_shared<std::vector<std::uint8_t>>(env.mask(state));
    const auto f = env.dynamic_features(state);
    const int cur[1] = {state.current};
    Var lp = decode_log_probs(p, params.config, cache, cur, f, mask, 1);
    std::vector<double> prob(static_cast<std::size_t>(g));
    for (int i = 0; i < g; ++i) prob[static_cast<std::size_t>(i)] = std::exp(lp.value()[static_cast<std::size_t>(i)]);
    return prob;
}

std::vector<int> default_starts(int g, int count, int max_starts) {
    int n = count > 0 ? count : g - 1;
    n = std::min({n, g - 1, std::max(1, max_starts)});
    if (n < 1) throw InvalidInput("an instance needs at least two nodes to roll out");
    std::vector<int> s(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) s[static_cast<std::size_t>(j)] = j + 1;
    return s;
}

namespace {

void apply_start(const Environment& env, RolloutState& state, int start, std::vector<int>& actions) {
    const Instance& in = env.instance();
    auto take = [&](int a) {
        const auto m = env.mask(state);
        if (!m[static_cast<std::size_t>(a)]) return false;
        env.advance(state, a, m);
        actions.push_back(a);
        return true;
    };
    if (in.is_depot(start)) {
        take(start);
    } else if (take(0)) {
        take(start);
    }
}

int sample_row(std::span<const double> logp, std::span<const std::uint8_t> mask, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double x = u(rng);
    double acc = 0.0;
    int last = -1;
    for (std::size_t j = 0; j < logp.size(); ++j) {
        if (!mask[j]) continue;
        acc += std::exp(logp[j]);
        last = static_cast<int>(j);
        if (x < acc) return last;
    }
    return last;  // rounding left a sliver above the cumulative sum
}

int argmax_row(std::span<const double> logp, std::span<const std::uint8_t> mask) {
    int best = -1;
    for (std::size_t j = 0; j < logp.size(); ++j)
        if (mask[j] && (best < 0 || logp[j] > logp[static_cast<std::size_t>(best)])) best = static_cast<int>(j);
    return best;
}

}  // namespace

RolloutRecord run_rollouts(const ParamVars& p, const PolicyConfig& config, const DecoderCache& cache,
                           std::span<const Environment> envs, int group, std::span<const int> starts, DecodeMode mode,
                           std::mt19937_64* rng, const std::vector<std::vector<int>>* forced) {
    const int B = cache.batch, g = cache.g;
    const int R = B * group;
    if (static_cast<int>(envs.size()) != B || static_cast<int>(starts.size()) != R)
        throw ContractViolation("rollout: environment or start count mismatch");
    if (forced && static_cast<int>(forced->size()) != R) throw ContractViolation("rollout: forced action count");
    if (mode == DecodeMode::sample && !rng && !forced) throw ContractViolation("sampling needs a random engine");

    RolloutRecord rec;
    rec.trajectories.resize(static_cast<std::size_t>(R));
    std::vector<RolloutState> states(static_cast<std::size_t>(R));
    std::vector<std::size_t> cursor(static_cast<std::size_t>(R), 0);
    for (int r = 0; r < R; ++r) {
        const Environment& env = envs[static_cast<std::size_t>(r / group)];
        if (env.size() != g) throw ContractViolation("rollout: environment size differs from the encoder batch");
        auto& t = rec.trajectories[static_cast<std::size_t>(r)];
        t.start = starts[static_cast<std::size_t>(r)];
        states[static_cast<std::size_t>(r)] = env.initial_state();
        apply_start(env, states[static_cast<std::size_t>(r)], t.start, t.actions);
        if (forced) {
            const auto& f = (*forced)[static_cast<std::size_t>(r)];
            if (f.size() < t.actions.size() || !std::equal(t.actions.begin(), t.actions.end(), f.begin()))
                throw ContractViolation("forced trajectory does not begin with its start actions");
            cursor[static_cast<std::size_t>(r)] = t.actions.size();
        }
    }

    std::vector<int> current(static_cast<std::size_t>(R));
    std::vector<double> dynamic(static_cast<std::size_t>(R) * kDynamicFeatures);
    for (;;) {
        std::vector<char> active(static_cast<std::size_t>(R), 0);
        bool any = false;
        for (int r = 0; r < R; ++r) any |= (active[static_cast<std::size_t>(r)] = !states[static_cast<std::size_t>(r)].done());
        if (!any) break;

        auto mask = std::make_shared<std::vector<std::uint8_t>>(static_cast<std::size_t>(R) * g, 0);
        bool choice = false;
        for (int r = 0; r < R; ++r) {
            std::span<std::uint8_t> row(mask->data() + static_cast<std::size_t>(r) * g, static_cast<std::size_t>(g));
            if (!active[static_cast<std::size_t>(r)]) {
                row[0] = 1;
                current[static_cast<std::size_t>(r)] = 0;
                std::fill_n(dynamic.begin() + static_cast<std::ptrdiff_t>(r) * kDynamicFeatures, kDynamicFeatures, 0.0);
                continue;
            }
            const Environment& env = envs[static_cast<std::size_t>(r / group)];
            const RolloutState& s = states[static_cast<std::size_t>(r)];
            env.mask(s, row);
            choice = choice || std::count(row.begin(), row.end(), std::uint8_t{1}) > 1;
            current[static_cast<std::size_t>(r)] = s.current;
            const auto f = env.dynamic_features(s);
            std::copy(f.begin(), f.end(), dynamic.begin() + static_cast<std::ptrdiff_t>(r) * kDynamicFeatures);
        }

        std::vector<int> actions(static_cast<std::size_t>(R), 0);
        Var logp;
        if (choice) logp = decode_log_probs(p, config, cache, current, dynamic, mask, group);
        for (int r = 0; r < R; ++r) {
            if (!active[static_cast<std::size_t>(r)]) continue;
            std::span<const std::uint8_t> row(mask->data() + static_cast<std::size_t>(r) * g, static_cast<std::size_t>(g));
            int a = -1;
            if (forced) {
                const auto& f = (*forced)[static_cast<std::size_t>(r)];
                std::size_t& k = cursor[static_cast<std::size_t>(r)];
                if (k >= f.size()) throw ContractViolation("forced trajectory ends before the instance is served");
                a = f[k++];
            } else if (!choice) {
                a = static_cast<int>(std::find(row.begin(), row.end(), std::uint8_t{1}) - row.begin());
            } else {
                std::span<const double> lp = logp.value().subspan(static_cast<std::size_t>(r) * g, static_cast<std::size_t>(g));
                a = mode == DecodeMode::greedy ? argmax_row(lp, row) : sample_row(lp, row, *rng);
            }
            auto& t = rec.trajectories[static_cast<std::size_t>(r)];
            envs[static_cast<std::size_t>(r / group)].advance(states[static_cast<std::size_t>(r)], a, row);
            t.actions.push_back(a);
            if (choice) {
                const double v = logp.value()[static_cast<std::size_t>(r) * g + a];
                t.step_log_probs.push_back(v);
                t.log_prob += v;
            }
            actions[static_cast<std::size_t>(r)] = a;
        }
        if (choice) {
            rec.step_log_probs.push_back(logp);
            rec.step_actions.push_back(std::move(actions));
            rec.step_active.push_back(std::move(active));
        }
    }

    for (int r = 0; r < R; ++r) {
        auto& t = rec.trajectories[static_cast<std::size_t>(r)];
        if (forced && cursor[static_cast<std::size_t>(r)] != (*forced)[static_cast<std::size_t>(r)].size())
            throw ContractViolation("forced trajectory continues after the instance is served");
        t.solution = std::move(states[static_cast<std::size_t>(r)].partial);
        t.solution.normalize();
        const Instance& inst = envs[static_cast<std::size_t>(r / group)].instance();
        double dist = 0.0;
        for (const Route& route : t.solution.routes) dist += route_distance(route, inst);
        t.reward = -dist;
    }
    return rec;
}

namespace {

std::vector<Trajectory> rollout_images(const PolicyParams& params, const Instance& instance,
                                       const std::vector<Instance>& images, double scale,
                                       const RolloutOptions& options) {
    std::vector<const Instance*> ptrs;
    for (const Instance& im : images) ptrs.push_back(&im);
    const int B = static_cast<int>(images.size());
    const int g = instance.size();
    Graph graph(false);
    ParamVars p = bind_params(graph, params, false);
    const EncoderInput in = make_encoder_input(ptrs, params.config.tsp);
    Var x = encode(graph, p, params, in, ForwardMode{});
    DecoderCache cache = prepare_decoder(p, x, B, g);
    const std::vector<int> base = default_starts(g, options.starts, options.max_starts);
    const int N = static_cast<int>(base.size());
    std::vector<int> starts;
    for (int b = 0; b < B; ++b) starts.insert(starts.end(), base.begin(), base.end());
    std::vector<Environment> envs(static_cast<std::size_t>(B), Environment(instance, scale));
    std::mt19937_64 rng(options.seed);
    RolloutRecord rec = run_rollouts(p, params.config, cache, envs, N, starts, options.mode, &rng);
    return std::move(rec.trajectories);
}

}  // namespace

std::vector<Trajectory> rollout(const PolicyParams& params, const Instance& instance, const RolloutOptions& options) {
    const NormalizedInstance ni = normalize_for_policy(instance);
    return rollout_images(params, instance, {ni.instance}, ni.scale, options);
}

std::vector<Trajectory> rollout_augmented(const PolicyParams& params, const Instance& instance,
                                          const RolloutOptions& options) {
    const NormalizedInstance ni = normalize_for_policy(instance);
    return rollout_images(params, instance, augment_x8(ni.instance), ni.scale, options);
}

std::size_t best_trajectory(std::span<const Trajectory> trajectories) {
    if (trajectories.empty()) throw InvalidInput("no trajectories");
    std::size_t best = 0;
    for (std::size_t i = 1; i < trajectories.size(); ++i)
        if (trajectories[i].reward > trajectories[best].reward) best = i;
    return best;
}

}  // namespace hvrp::nn
