#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace hvrp::nn {

/// Row-major 2-D array of doubles. Parameters, features and gradients all
/// use this one layout.
struct Tensor {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Tensor() = default;
    Tensor(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}
    Tensor(int r, int c, std::vector<double> values);

    std::size_t size() const noexcept { return data.size(); }
    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

    friend bool operator==(const Tensor&, const Tensor&) = default;
};

class Graph;

/// Handle to a value recorded on a Graph.
struct Var {
    Graph* graph = nullptr;
    int id = -1;

    int rows() const;
    int cols() const;
    std::span<const double> value() const;
    bool valid() const noexcept { return graph != nullptr && id >= 0; }
};

/// Reverse-mode tape. Every op appends a node; backward() walks the nodes in
/// reverse creation order, which is a valid topological order. One Graph per
/// forward pass; not shared between threads.
class Graph {
public:
    explicit Graph(bool track_gradients = true) : track_(track_gradients) {}
    Graph(const Graph&) = delete;
    Graph& operator=(const Graph&) = delete;

    bool tracking() const noexcept { return track_; }

    Var constant(Tensor value);
    /// Leaf whose gradient is retrievable after backward().
    Var parameter(const Tensor& value);

    /// Seeds d(output)/d(output) = 1 for a 1x1 output and back-propagates.
    void backward(Var scalar_output);
    /// Gradient buffer of a node (zeros if it received none).
    const std::vector<double>& grad(Var v);

    // -- used by op implementations --
    struct Node {
        int rows = 0;
        int cols = 0;
        std::vector<double> value;
        std::vector<double> grad;
        std::function<void()> backward;
        bool needs_grad = false;
    };
    Node& node(int id) { return nodes_[static_cast<std::size_t>(id)]; }
    const Node& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
    Var add_node(int rows, int cols, std::vector<double> value, bool needs_grad);
    bool needs_grad(Var v) const { return node(v.id).needs_grad; }
    /// Gradient buffer, allocated zeroed on first access.
    std::vector<double>& grad_buffer(int id);
    std::size_t size() const noexcept { return nodes_.size(); }

private:
    bool track_;
    std::deque<Node> nodes_;
};

// ---------------------------------------------------------------------------
// Ops. Shapes are (rows, cols); "batch" arguments split rows into equal
// per-instance blocks.

/// a * w^T  with a:(r,k), w:(o,k) -> (r,o)
Var matmul_nt(Var a, Var w);
/// a * w^T + bias, bias:(1,o)
Var linear(Var a, Var w, Var bias);
Var add(Var a, Var b);
Var leaky_relu(Var a, double slope);
Var relu(Var a);
Var concat_cols(Var a, Var b);
Var concat_rows(Var a, Var b);
/// Columns [c0, c1) of a.
Var column_slice(Var a, int c0, int c1);
Var gather_rows(Var a, std::vector<int> rows);
Var reshape(Var a, int rows, int cols);
Var softmax_rows(Var a);
/// Per-block product: a:(B*r,k), b:(B*k,c) -> (B*r,c).
Var batched_matmul(Var a, Var b, int batch);
/// z[(b,i,j)] = src[(b,i)] + dst[(b,j)] + edge[(b,i,j)] for every ordered
/// pair inside each block of g nodes. src,dst:(B*g,h), edge:(B*g*g,h).
Var pairwise_sum(Var src, Var dst, Var edge, int batch, int g);

struct BatchNormState {
    bool training = true;
    double eps = 1e-5;
    /// Read in evaluation mode.
    const std::vector<double>* running_mean = nullptr;
    const std::vector<double>* running_var = nullptr;
    /// When set in training mode, updated with the batch statistics.
    std::vector<double>* update_mean = nullptr;
    std::vector<double>* update_var = nullptr;
    double momentum = 0.1;
};
/// Per-column normalization over all rows; gamma, beta:(1,h).
Var batch_norm(Var x, Var gamma, Var beta, const BatchNormState& state);

/// Multi-head glimpse. Row r of q (R = B*group rows) attends over the g key
/// and value rows of block r / group, with heads splitting the columns.
/// mask:(R,g), nonzero = visible.
Var multi_head_glimpse(Var q, Var keys, Var values, std::shared_ptr<const std::vector<std::uint8_t>> mask,
                       int group, int heads);

/// Clipped pointer log-probabilities: u_rj = clip * tanh(scale * <ctx_r, x_j>)
/// over the g node rows of block r / group; masked entries are -inf and the
/// rest are log-softmax normalized.
Var pointer_log_probs(Var ctx, Var nodes, std::shared_ptr<const std::vector<std::uint8_t>> mask, int group,
                      double clip, double scale);

/// sum_r coef[r] * logp[r, index[r]] -> (1,1). Rows with coef 0 are skipped.
Var weighted_pick_sum(Var logp, std::vector<int> index, std::vector<double> coef);
/// Sum of (1,1) nodes.
Var add_scalars(const std::vector<Var>& terms);

}  // namespace hvrp::nn
