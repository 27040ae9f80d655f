#include "hvrp/nn/autograd.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "hvrp/core/errors.hpp"

namespace hvrp::nn {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapC = Eigen::Map<const RowMat>;
using Map = Eigen::Map<RowMat>;

MapC cview(const std::vector<double>& v, int r, int c) { return MapC(v.data(), r, c); }
Map view(std::vector<double>& v, int r, int c) { return Map(v.data(), r, c); }

Graph& same_graph(Var a, Var b) {
    if (a.graph == nullptr || a.graph != b.graph) throw ContractViolation("vars belong to different graphs");
    return *a.graph;
}

void require(bool ok, const char* what) {
    if (!ok) throw ContractViolation(what);
}

}  // namespace

Tensor::Tensor(int r, int c, std::vector<double> values) : rows(r), cols(c), data(std::move(values)) {
    if (data.size() != static_cast<std::size_t>(r) * static_cast<std::size_t>(c))
        throw InvalidInput("tensor data size does not match its shape");
}

int Var::rows() const { return graph->node(id).rows; }
int Var::cols() const { return graph->node(id).cols; }
std::span<const double> Var::value() const { return graph->node(id).value; }

Var Graph::add_node(int rows, int cols, std::vector<double> value, bool needs_grad) {
    Node n;
    n.rows = rows;
    n.cols = cols;
    n.value = std::move(value);
    n.needs_grad = track_ && needs_grad;
    nodes_.push_back(std::move(n));
    return Var{this, static_cast<int>(nodes_.size()) - 1};
}

Var Graph::constant(Tensor value) { return add_node(value.rows, value.cols, std::move(value.data), false); }

Var Graph::parameter(const Tensor& value) { return add_node(value.rows, value.cols, value.data, true); }

std::vector<double>& Graph::grad_buffer(int id) {
    Node& n = node(id);
    if (n.grad.empty()) n.grad.assign(n.value.size(), 0.0);
    return n.grad;
}

const std::vector<double>& Graph::grad(Var v) { return grad_buffer(v.id); }

void Graph::backward(Var out) {
    require(out.graph == this, "backward on a foreign var");
    require(track_, "backward on a graph built without gradient tracking");
    Node& o = node(out.id);
    require(o.rows == 1 && o.cols == 1, "backward needs a scalar output");
    if (!o.needs_grad) return;
    grad_buffer(out.id)[0] += 1.0;
    for (int i = out.id; i >= 0; --i) {
        Node& n = node(i);
        if (n.backward && !n.grad.empty()) n.backward();
    }
}

// ---------------------------------------------------------------------------

Var matmul_nt(Var a, Var w) {
    Graph& g = same_graph(a, w);
    const int r = a.rows(), k = a.cols(), o = w.rows();
    require(w.cols() == k, "matmul_nt: inner dimensions differ");
    std::vector<double> out(static_cast<std::size_t>(r) * o);
    view(out, r, o).noalias() = cview(g.node(a.id).value, r, k) * cview(g.node(w.id).value, o, k).transpose();
    Var y = g.add_node(r, o, std::move(out), g.needs_grad(a) || g.needs_grad(w));
    if (g.needs_grad(y)) {
        g.node(y.id).backward = [&g, a, w, y, r, k, o]() {
            const MapC dy = cview(g.node(y.id).grad, r, o);
            if (g.needs_grad(a))
                view(g.grad_buffer(a.id), r, k).noalias() += dy * cview(g.node(w.id).value, o, k);
            if (g.needs_grad(w))
                view(g.grad_buffer(w.id), o, k).noalias() += dy.transpose() * cview(g.node(a.id).value, r, k);
        };
    }
    return y;
}

Var linear(Var a, Var w, Var bias) {
    Graph& g = same_graph(a, bias);
    Var y = matmul_nt(a, w);
    const int r = y.rows(), o = y.cols();
    require(bias.rows() == 1 && bias.cols() == o, "linear: bias shape");
    std::vector<double> out = g.node(y.id).value;
    const auto& b = g.node(bias.id).value;
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < o; ++j) out[static_cast<std::size_t>(i) * o + j] += b[j];
    Var z = g.add_node(r, o, std::move(out), g.needs_grad(y) || g.needs_grad(bias));
    if (g.needs_grad(z)) {
        g.node(z.id).backward = [&g, y, bias, z, r, o]() {
            const auto& dz = g.node(z.id).grad;
            if (g.needs_grad(y)) {
                auto& dy = g.grad_buffer(y.id);
                for (std::size_t i = 0; i < dz.size(); ++i) dy[i] += dz[i];
            }
            if (g.needs_grad(bias)) {
                auto& db = g.grad_buffer(bias.id);
                for (int i = 0; i < r; ++i)
                    for (int j = 0; j < o; ++j) db[j] += dz[static_cast<std::size_t>(i) * o + j];
            }
        };
    }
    return z;
}

Var add(Var a, Var b) {
    Graph& g = same_graph(a, b);
    require(a.rows() == b.rows() && a.cols() == b.cols(), "add: shape mismatch");
    const auto& av = g.node(a.id).value;
    const auto& bv = g.node(b.id).value;
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
    Var y = g.add_node(a.rows(), a.cols(), std::move(out), g.needs_grad(a) || g.needs_grad(b));
    if (g.needs_grad(y)) {
        g.node(y.id).backward = [&g, a, b, y]() {
            const auto& dy = g.node(y.id).grad;
            for (Var v : {a, b}) {
                if (!g.needs_grad(v)) continue;
                auto& dv = g.grad_buffer(v.id);
                for (std::size_t i = 0; i < dy.size(); ++i) dv[i] += dy[i];
            }
        };
    }
    return y;
}

Var leaky_relu(Var a, double slope) {
    Graph& g = *a.graph;
    const auto& av = g.node(a.id).value;
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] > 0.0 ? av[i] : slope * av[i];
    Var y = g.add_node(a.rows(), a.cols(), std::move(out), g.needs_grad(a));
    if (g.needs_grad(y)) {
        g.node(y.id).backward = [&g, a, y, slope]() {
            const auto& dy = g.node(y.id).grad;
            const auto& av = g.node(a.id).value;
            auto& da = g.grad_buffer(a.id);
            for (std::size_t i = 0; i < dy.size(); ++i) da[i] += av[i] > 0.0 ? dy[i] : slope * dy[i];
        };
    }
    return y;
}

Var relu(Var a) { return leaky_relu(a, 0.0); }

Var concat_cols(Var a, Var b) {
    Graph& g = same_graph(a, b);
    const int r = a.rows(), ca = a.cols(), cb = b.cols();
    require(b.rows() == r, "concat_cols: row mismatch");
    const int c = ca + cb;
    std::vector<double> out(static_cast<std::size_t>(r) * c);
    const auto& av = g.node(a.id).value;
    const auto& bv = g.node(b.id).value;
    for (int i = 0; i < r; ++i) {
        std::copy_n(av.begin() + static_cast<std::ptrdiff_t>(i) * ca, ca, out.begin() + static_cast<std::ptrdiff_t>(i) * c);
        std::copy_n(bv.begin() + static_cast<std::ptrdiff_t>(i) * cb, cb,
                    out.begin() + static_cast<std::ptrdiff_t>(i) * c + ca);
    }
    Var y = g.add_node(r, c, std::move(out), g.needs_grad(a) || g.needs_grad(b));
    if (g.needs_grad(y)) {
        g.node(y.id).backward = [&g, a, b, y, r, ca, cb, c]() {
            const auto& dy = g.node(y.id).grad;
            if (g.needs_grad(a)) {
                auto& da = g.grad_buffer(a.id);
                for (int i = 0; i < r; ++i)
                    for (int j = 0; j < ca; ++j) da[static_cast<std::size_t>(i) * ca + j] += dy[static_cast<std::size_t>(i) * c + j];
            }
            if (g.needs_grad(b)) {
                auto& db = g.grad_buffer(b.id);
                for (int i = 0; i < r; ++i)
                    for (int j = 0; j < cb; ++j)
                        db[static_cast<std::size_t>(i) * cb + j] += dy[static_cast<std::size_t>(i) * c + ca + j];
            }
        };
    }
    return y;
}

Var concat_rows(Var a, Var b) {
    Graph& g = same_graph(a, b);
    require(a.cols() == b.cols(), "concat_rows: column mismatch");
    std::vector<double> out = g.node(a.id).value;
    const auto& bv = g.node(b.id).value;
    const std::size_t na = out.size();
    out.insert(out.end(), bv.begin(), bv.end());
    Var y = g.add_node(a.rows() + b.rows(), a.cols(), std::move(out), g.needs_grad(a) || g.needs_grad(b));
    if (g.needs_grad(y)) {
        g.node(y.id).backward = [&g, a, b, y, na]() {
            const auto& dy = g.node(y.id).grad;
            if (g.needs_grad(a)) {
                auto& da = g.grad_buffer(a.id);
                for (std::size_t i = 0; i < na; ++i) da[i] += dy[i];
            }
            if (g.needs_grad(b)) {
                auto& db = g.grad_buffer(b.id);
                for (std::size_t i = 0; i < db.size(); ++i) db[i] += dy[na + i];
            }
        };
    }
    return y;
}

Var column_slice(Var a, int c0, int c1) {
    Graph& g = *a.graph;
    const int r = a.rows(), c = a.cols();
    require(0 <= c0 && c0 <= c1 && c1 <= c, "column_slice: bad range");
    const int w = c1 - c0;
    std::vector<double> out(static_cast<std::size_t>(r) * w);
    const auto& av = g.node(a.id).value;
    for (int i = 0; i < r; ++i)
        std::copy_n(av.begin() + static_cast<std::ptrdiff_t>(i) * c + c0, w, out.begin() + static_cast<std::ptrdiff_t>(i) * w);
    Var y = g.add_node(r, w, std::move(out), g.needs_grad(a));
    if (g.needs_grad(y)) {
        g.node(y.id).backward = [&g, a, y, r, c, c0, w]() {
            const auto& dy = g.node(y.id).grad;
            auto& da = g.grad_buffer(a.id);
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < w; ++j) da[static_cast<std::size_t>(i) * c + c0 + j] += dy[static_cast<std::size_t>(i) * w + j];
        };
    }
    return y;
}

Var gather_rows(Var a, std::vector<int> rows) {
    Graph& g = *a.graph;
    const int c = a.cols();
    const int n = static_cast<int>(rows.size());
    std::vector<double> out(static_cast<std::size_t>(n) * c);
    const auto& av = g.node(a.id).value;
    for (int i = 0; i < n; ++i) {
        require(rows[i] >= 0 && rows[i] < a.rows(), "gather_rows: index out of range");
        std::copy_n(av.begin() + static_cast<std::ptrdiff_t>(rows[i]) * c, c, out.begin() + static_cast<std::ptrdiff_t>(i) * c);
    }
    Var y = g.add_node(n, c, std::move(out), g.needs_grad(a));
    if (g.needs_grad(y)) {
        g.node(y.id).backward = [&g, a, y, c, rows = std::move(rows)]() {
            const auto& dy = g.node(y.id).grad;
            auto& da = g.grad_buffer(a.id);
            for (std::size_t i = 0; i < rows.size(); ++i)
                for (int j = 0; j < c; ++j) da[static_cast<std::size_t>(rows[i]) * c + j] += dy[i * c + j];
        };
    }
    return y;
}

Var reshape(Var a, int rows, int cols) {
    Graph& g = *a.graph;
    require(static_cast<std::size_t>(rows) * cols == g.node(a.id).value.size(), "reshape: size mismatch");
    Var y = g.add_node(rows, cols, g.node(a.id).value, g.needs_grad(a));
    if (g.needs_grad(y)) {
        g.node(y.id).backward = [&g, a, y]() {
            const auto& dy = g.node(y.id).grad;
            auto& da = g.grad_buffer(a.id);
            for (std::size_t i = 0; i < dy.size(); ++i) da[i] += dy[i];
        };
    }
    return y;
}

Var softmax_rows(Var a) {
    Graph& g = *a.graph;
    const int r = a.rows(), c = a.cols();
    const auto& av = g.node(a.id).value;
    std::vector<double> out(av.size());
    for (int i = 0; i < r; ++i) {
        const double* x = av.data() + static_cast<std::size_t>(i) * c;
        double* p = out.data() + static_cast<std::size_t>(i) * c;
        const double mx = *std::max_element(x, x + c);
        double s = 0.0;
        for (int j = 0; j < c; ++j) s += (p[j] = std::exp(x[j] - mx));
        for (int j = 0; j < c; ++j) p[j] /= s;
    }
    Var y = g.add_node(r, c, std::move(out), g.needs_grad(a));
    if (g.needs_grad(y)) {
        g.node(y.id).backward = [&g, a, y, r, c]() {
            const auto& dy = g.node(y.id).grad;
            const auto& p = g.node(y.id).value;
            auto& da = g.grad_buffer(a.id);
            for (int i = 0; i < r; ++i) {
                const std::size_t o = static_cast<std::size_t>(i) * c;
                double dot = 0.0;
                for (int j = 0; j < c; ++j) dot += dy[o + j] * p[o + j];
                for (int j = 0; j < c; ++j) da[o + j] += p[o + j] * (dy[o + j] - dot);
            }
        };
    }
    return y;
}

Var batched_matmul(Var a, Var b, int batch) {
    Graph& g = same_graph(a, b);
    require(batch > 0 && a.rows() % batch == 0 && b.rows() % batch == 0, "batched_matmul: rows not divisible");
    const int r = a.rows() / batch, k = a.cols(), c = b.cols();
    require(b.rows() / batch == k, "batched_matmul: inner dimensions differ");
    std::vector<double> out(static_cast<std::size_t>(batch) * r * c);
    const auto& av = g.node(a.id).value;
    const auto& bv = g.node(b.id).value;
    for (int t = 0; t < batch; ++t) {
        Map(out.data() + static_cast<std::size_t>(t) * r * c, r, c).noalias() =
            MapC(av.data() + static_cast<std::size_t>(t) * r * k, r, k) * MapC(bv.data() + static_cast<std::size_t>(t) * k * c, k, c);
    }
    Var y = g.add_node(batch * r, c, std::move(out), g.needs_grad(a) || g.needs_grad(b));
    if (g.needs_grad(y)) {
        g.node(y.id).backward = [&g, a, b, y, batch, r, k, c]() {
            const auto& dy = g.node(y.id).grad;
            const auto& av = g.node(a.id).value;
            const auto& bv = g.node(b.id).value;
            for (int t = 0; t < batch; ++t) {
                const MapC dyt(dy.data() + static_cast<std::size_t>(t) * r * c, r, c);
                if (g.needs_grad(a))
                    Map(g.grad_buffer(a.id).data() + static_cast<std::size_t>(t) * r * k, r, k).noalias() +=
                        dyt * MapC(bv.data() + static_cast<std::size_t>(t) * k * c, k, c).transpose();
                if (g.needs_grad(b))
                    Map(g.grad_buffer(b.id).data() + static_cast<std::size_t>(t) * k * c, k, c).noalias() +=
                        MapC(av.data() + static_cast<std::size_t>(t) * r * k, r, k).transpose() * dyt;
            }
        };
    }
    return y;
}

Var pairwise_sum(Var src, Var dst, Var edge, int batch, int gsize) {
    Graph& g = same_graph(src, dst);
    same_graph(src, edge);
    const int h = src.cols();
    require(src.rows() == batch * gsize && dst.rows() == batch * gsize && dst.cols() == h, "pairwise_sum: node shape");
    require(edge.rows() == batch * gsize * gsize && edge.cols() == h, "pairwise_sum: edge shape");
    const auto& sv = g.node(src.id).value;
    const auto& dv = g.node(dst.id).value;
    std::vector<double> out = g.node(edge.id).value;
    for (int b = 0; b < batch; ++b)
        for (int i = 0; i < gsize; ++i)
            for (int j = 0; j < gsize; ++j) {
                double* z = out.data() + (static_cast<std::size_t>(b * gsize + i) * gsize + j) * h;
                const double* s = sv.data() + static_cast<std::size_t>(b * gsize + i) * h;
                const double* d = dv.data() + static_cast<std::size_t>(b * gsize + j) * h;
                for (int c = 0; c < h; ++c) z[c] += s[c] + d[c];
            }
    Var y = g.add_node(batch * gsize * gsize, h, std::move(out),
                       g.needs_grad(src) || g.needs_grad(dst) || g.needs_grad(edge));
    if (g.needs_grad(y)) {
        g.node(y.id).backward = [&g, src, dst, edge, y, batch, gsize, h]() {
            const auto& dy = g.node(y.id).grad;
            if (g.needs_grad(edge)) {
                auto& de = g.grad_buffer(edge.id);
                for (std::size_t i = 0; i < dy.size(); ++i) de[i] += dy[i];
            }
            const bool ns = g.needs_grad(src), nd = g.needs_grad(dst);
            if (!ns && !nd) return;
            std::vector<double>* ds = ns ? &g.grad_buffer(src.id) : nullptr;
            std::vector<double>* dd = nd ? &g.grad_buffer(dst.id) : nullptr;
            for (int b = 0; b < batch; ++b)
                for (int i = 0; i < gsize; ++i)
                    for (int j = 0; j < gsize; ++j) {
                        const double* z = dy.data() + (static_cast<std::size_t>(b * gsize + i) * gsize + j) * h;
                        if (ds) {
                            double* s = ds->data() + static_cast<std::size_t>(b * gsize + i) * h;
                            for (int c = 0; c < h; ++c) s[c] += z[c];
                        }
                        if (dd) {
                            double* d = dd->data() + static_cast<std::size_t>(b * gsize + j) * h;
                            for (int c = 0; c < h; ++c) d[c] += z[c];
                        }
                    }
        };
    }
    return y;
}

Var batch_norm(Var x, Var gamma, Var beta, const BatchNormState& st) {
    Graph& g = same_graph(x, gamma);
    same_graph(x, beta);
    const int r = x.rows(), h = x.cols();
    require(gamma.cols() == h && beta.cols() == h && gamma.rows() == 1 && beta.rows() == 1, "batch_norm: affine shape");
    const auto& xv = g.node(x.id).value;
    const auto& gv = g.node(gamma.id).value;
    const auto& bv = g.node(beta.id).value;
    std::vector<double> mean(h, 0.0), var(h, 0.0);
    if (st.training) {
        require(r > 0, "batch_norm: empty batch");
        for (int i = 0; i < r; ++i)
            for (int c = 0; c < h; ++c) mean[c] += xv[static_cast<std::size_t>(i) * h + c];
        for (double& m : mean) m /= r;
        for (int i = 0; i < r; ++i)
            for (int c = 0; c < h; ++c) {
                const double d = xv[static_cast<std::size_t>(i) * h + c] - mean[c];
                var[c] += d * d;
            }
        for (double& v : var) v /= r;
        if (st.update_mean && st.update_var) {
            auto& rm = *st.update_mean;
            auto& rv = *st.update_var;
            const double unbias = r > 1 ? static_cast<double>(r) / (r - 1) : 1.0;
            for (int c = 0; c < h; ++c) {
                rm[c] = (1.0 - st.momentum) * rm[c] + st.momentum * mean[c];
                rv[c] = (1.0 - st.momentum) * rv[c] + st.momentum * var[c] * unbias;
            }
        }
    } else {
        require(st.running_mean && st.running_var, "batch_norm: eval mode needs running statistics");
        mean = *st.running_mean;
        var = *st.running_var;
    }
    std::vector<double> inv(h);
    for (int c = 0; c < h; ++c) inv[c] = 1.0 / std::sqrt(var[c] + st.eps);
    auto xhat = std::make_shared<std::vector<double>>(xv.size());
    std::vector<double> out(xv.size());
    for (int i = 0; i < r; ++i)
        for (int c = 0; c < h; ++c) {
            const std::size_t o = static_cast<std::size_t>(i) * h + c;
            (*xhat)[o] = (xv[o] - mean[c]) * inv[c];
            out[o] = gv[c] * (*xhat)[o] + bv[c];
        }
    Var y = g.add_node(r, h, std::move(out), g.needs_grad(x) || g.needs_grad(gamma) || g.needs_grad(beta));
    if (g.needs_grad(y)) {
        const bool training = st.training;
        g.node(y.id).backward = [&g, x, gamma, beta, y, r, h, xhat, inv = std::move(inv), training]() {
            const auto& dy = g.node(y.id).grad;
            const auto& gv = g.node(gamma.id).value;
            std::vector<double> sum_dy(h, 0.0), sum_dy_xhat(h, 0.0);
            for (int i = 0; i < r; ++i)
                for (int c = 0; c < h; ++c) {
                    const std::size_t o = static_cast<std::size_t>(i) * h + c;
                    sum_dy[c] += dy[o];
                    sum_dy_xhat[c] += dy[o] * (*xhat)[o];
                }
            if (g.needs_grad(gamma)) {
                auto& dg = g.grad_buffer(gamma.id);
                for (int c = 0; c < h; ++c) dg[c] += sum_dy_xhat[c];
            }
            if (g.needs_grad(beta)) {
                auto& db = g.grad_buffer(beta.id);
                for (int c = 0; c < h; ++c) db[c] += sum_dy[c];
            }
            if (!g.needs_grad(x)) return;
            auto& dx = g.grad_buffer(x.id);
            for (int i = 0; i < r; ++i)
                for (int c = 0; c < h; ++c) {
                    const std::size_t o = static_cast<std::size_t>(i) * h + c;
                    if (training)
                        dx[o] += gv[c] * inv[c] / r * (r * dy[o] - sum_dy[c] - (*xhat)[o] * sum_dy_xhat[c]);
                    else
                        dx[o] += gv[c] * inv[c] * dy[o];
                }
        };
    }
    return y;
}

Var multi_head_glimpse(Var q, Var keys, Var values, std::shared_ptr<const std::vector<std::uint8_t>> mask, int group,
                       int heads) {
    Graph& g = same_graph(q, keys);
    same_graph(q, values);
    const int R = q.rows(), h = q.cols();
    require(group > 0 && R % group == 0, "glimpse: rows not divisible by group");
    const int B = R / group;
    require(keys.rows() % B == 0 && keys.rows() == values.rows(), "glimpse: key rows");
    const int n = keys.rows() / B;
    require(keys.cols() == h && values.cols() == h && heads > 0 && h % heads == 0, "glimpse: widths");
    require(mask && mask->size() == static_cast<std::size_t>(R) * n, "glimpse: mask shape");
    const int dh = h / heads;
    const double sc = 1.0 / std::sqrt(static_cast<double>(dh));
    const auto& qv = g.node(q.id).value;
    const auto& kv = g.node(keys.id).value;
    const auto& vv = g.node(values.id).value;
    auto att = std::make_shared<std::vector<double>>(static_cast<std::size_t>(R) * heads * n, 0.0);
    std::vector<double> out(static_cast<std::size_t>(R) * h, 0.0);
    for (int r = 0; r < R; ++r) {
        const int b = r / group;
        const std::uint8_t* m = mask->data() + static_cast<std::size_t>(r) * n;
        for (int hd = 0; hd < heads; ++hd) {
            double* a = att->data() + (static_cast<std::size_t>(r) * heads + hd) * n;
            const double* qr = qv.data() + static_cast<std::size_t>(r) * h + hd * dh;
            double mx = -std::numeric_limits<double>::infinity();
            for (int j = 0; j < n; ++j) {
                if (!m[j]) continue;
                const double* kr = kv.data() + static_cast<std::size_t>(b * n + j) * h + hd * dh;
                double s = 0.0;
                for (int c = 0; c < dh; ++c) s += qr[c] * kr[c];
                a[j] = s * sc;
                mx = std::max(mx, a[j]);
            }
            require(std::isfinite(mx), "glimpse: fully masked row");
            double tot = 0.0;
            for (int j = 0; j < n; ++j) {
                if (!m[j]) continue;
                a[j] = std::exp(a[j] - mx);
                tot += a[j];
            }
            double* o = out.data() + static_cast<std::size_t>(r) * h + hd * dh;
            for (int j = 0; j < n; ++j) {
                if (!m[j]) continue;
                a[j] /= tot;
                const double* vr = vv.data() + static_cast<std::size_t>(b * n + j) * h + hd * dh;
                for (int c = 0; c < dh; ++c) o[c] += a[j] * vr[c];
            }
        }
    }
    Var y = g.add_node(R, h, std::move(out), g.needs_grad(q) || g.needs_grad(keys) || g.needs_grad(values));
    if (g.needs_grad(y)) {
        g.node(y.id).backward = [&g, q, keys, values, y, mask, att, group, heads, R, h, n, dh, sc]() {
            const auto& dy = g.node(y.id).grad;
            const auto& qv = g.node(q.id).value;
            const auto& kv = g.node(keys.id).value;
            const auto& vv = g.node(values.id).value;
            double* dq = g.needs_grad(q) ? g.grad_buffer(q.id).data() : nullptr;
            double* dk = g.needs_grad(keys) ? g.grad_buffer(keys.id).data() : nullptr;
            double* dv = g.needs_grad(values) ? g.grad_buffer(values.id).data() : nullptr;
            std::vector<double> da(n);
            for (int r = 0; r < R; ++r) {
                const int b = r / group;
                const std::uint8_t* m = mask->data() + static_cast<std::size_t>(r) * n;
                for (int hd = 0; hd < heads; ++hd) {
                    const double* a = att->data() + (static_cast<std::size_t>(r) * heads + hd) * n;
                    const double* go = dy.data() + static_cast<std::size_t>(r) * h + hd * dh;
                    double dot = 0.0;
                    for (int j = 0; j < n; ++j) {
                        if (!m[j]) continue;
                        const std::size_t off = static_cast<std::size_t>(b * n + j) * h + hd * dh;
                        double s = 0.0;
                        for (int c = 0; c < dh; ++c) s += go[c] * vv[off + c];
                        da[j] = s;
                        dot += a[j] * s;
                        if (dv)
                            for (int c = 0; c < dh; ++c) dv[off + c] += a[j] * go[c];
                    }
                    const std::size_t qo = static_cast<std::size_t>(r) * h + hd * dh;
                    for (int j = 0; j < n; ++j) {
                        if (!m[j]) continue;
                        const double ds = a[j] * (da[j] - dot) * sc;
                        const std::size_t off = static_cast<std::size_t>(b * n + j) * h + hd * dh;
                        if (dq)
                            for (int c = 0; c < dh; ++c) dq[qo + c] += ds * kv[off + c];
                        if (dk)
                            for (int c = 0; c < dh; ++c) dk[off + c] += ds * qv[qo + c];
                    }
                }
            }
        };
    }
    return y;
}

Var pointer_log_probs(Var ctx, Var nodes, std::shared_ptr<const std::vector<std::uint8_t>> mask, int group, double clip,
                      double scale) {
    Graph& g = same_graph(ctx, nodes);
    const int R = ctx.rows(), h = ctx.cols();
    require(group > 0 && R % group == 0, "pointer: rows not divisible by group");
    const int B = R / group;
    require(nodes.rows() % B == 0 && nodes.cols() == h, "pointer: node shape");
    const int n = nodes.rows() / B;
    require(mask && mask->size() == static_cast<std::size_t>(R) * n, "pointer: mask shape");
    const auto& cv = g.node(ctx.id).value;
    const auto& xv = g.node(nodes.id).value;
    const double ninf = -std::numeric_limits<double>::infinity();
    auto th = std::make_shared<std::vector<double>>(static_cast<std::size_t>(R) * n, 0.0);
    std::vector<double> out(static_cast<std::size_t>(R) * n, ninf);
    for (int r = 0; r < R; ++r) {
        const int b = r / group;
        const std::uint8_t* m = mask->data() + static_cast<std::size_t>(r) * n;
        double* lp = out.data() + static_cast<std::size_t>(r) * n;
        double* t = th->data() + static_cast<std::size_t>(r) * n;
        const MapC cr(cv.data() + static_cast<std::size_t>(r) * h, 1, h);
        double mx = ninf;
        for (int j = 0; j < n; ++j) {
            if (!m[j]) continue;
            const MapC xr(xv.data() + static_cast<std::size_t>(b * n + j) * h, 1, h);
            t[j] = std::tanh(scale * cr.row(0).dot(xr.row(0)));
            lp[j] = clip * t[j];
            mx = std::max(mx, lp[j]);
        }
        require(std::isfinite(mx), "pointer: fully masked row");
        double tot = 0.0;
        for (int j = 0; j < n; ++j)
            if (m[j]) tot += std::exp(lp[j] - mx);
        const double lse = mx + std::log(tot);
        for (int j = 0; j < n; ++j)
            if (m[j]) lp[j] -= lse;
    }
    Var y = g.add_node(R, n, std::move(out), g.needs_grad(ctx) || g.needs_grad(nodes));
    if (g.needs_grad(y)) {
        g.node(y.id).backward = [&g, ctx, nodes, y, mask, th, group, R, h, n, clip, scale]() {
            const auto& dy = g.node(y.id).grad;
            const auto& lp = g.node(y.id).value;
            const auto& cv = g.node(ctx.id).value;
            const auto& xv = g.node(nodes.id).value;
            double* dc = g.needs_grad(ctx) ? g.grad_buffer(ctx.id).data() : nullptr;
            double* dx = g.needs_grad(nodes) ? g.grad_buffer(nodes.id).data() : nullptr;
            for (int r = 0; r < R; ++r) {
                const int b = r / group;
                const std::uint8_t* m = mask->data() + static_cast<std::size_t>(r) * n;
                const std::size_t ro = static_cast<std::size_t>(r) * n;
                double tot = 0.0;
                bool any = false;
                for (int j = 0; j < n; ++j)
                    if (m[j] && dy[ro + j] != 0.0) {
                        tot += dy[ro + j];
                        any = true;
                    }
                if (!any) continue;
                for (int j = 0; j < n; ++j) {
                    if (!m[j]) continue;
                    const double du = dy[ro + j] - std::exp(lp[ro + j]) * tot;
                    const double t = (*th)[ro + j];
                    const double ds = du * clip * (1.0 - t * t) * scale;
                    if (ds == 0.0) continue;
                    const std::size_t xo = static_cast<std::size_t>(b * n + j) * h;
                    const std::size_t co = static_cast<std::size_t>(r) * h;
                    if (dc)
                        for (int c = 0; c < h; ++c) dc[co + c] += ds * xv[xo + c];
                    if (dx)
                        for (int c = 0; c < h; ++c) dx[xo + c] += ds * cv[co + c];
                }
            }
        };
    }
    return y;
}

Var weighted_pick_sum(Var logp, std::vector<int> index, std::vector<double> coef) {
    Graph& g = *logp.graph;
    const int R = logp.rows(), n = logp.cols();
    require(static_cast<int>(index.size()) == R && static_cast<int>(coef.size()) == R, "pick: length mismatch");
    const auto& lv = g.node(logp.id).value;
    double s = 0.0;
    for (int r = 0; r < R; ++r) {
        if (coef[r] == 0.0) continue;
        require(index[r] >= 0 && index[r] < n, "pick: index out of range");
        s += coef[r] * lv[static_cast<std::size_t>(r) * n + index[r]];
    }
    Var y = g.add_node(1, 1, {s}, g.needs_grad(logp));
    if (g.needs_grad(y)) {
        g.node(y.id).backward = [&g, logp, y, n, index = std::move(index), coef = std::move(coef)]() {
            const double d = g.node(y.id).grad[0];
            auto& dl = g.grad_buffer(logp.id);
            for (std::size_t r = 0; r < index.size(); ++r)
                if (coef[r] != 0.0) dl[r * n + index[r]] += d * coef[r];
        };
    }
    return y;
}

Var add_scalars(const std::vector<Var>& terms) {
    require(!terms.empty(), "add_scalars: no terms");
    Graph& g = *terms.front().graph;
    double s = 0.0;
    bool ng = false;
    for (Var t : terms) {
        require(t.graph == &g && t.rows() == 1 && t.cols() == 1, "add_scalars: expects 1x1 nodes of one graph");
        s += g.node(t.id).value[0];
        ng = ng || g.needs_grad(t);
    }
    Var y = g.add_node(1, 1, {s}, ng);
    if (g.needs_grad(y)) {
        g.node(y.id).backward = [&g, y, terms]() {
            const double d = g.node(y.id).grad[0];
            for (Var t : terms)
                if (g.needs_grad(t)) g.grad_buffer(t.id)[0] += d;
        };
    }
    return y;
}

}  // namespace hvrp::nn
