#include "prover/tape.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "prover/kernels.hpp"

namespace prover::ad {

void GradStore::acc(const std::string& name, const double* g, std::size_t n) {
    auto& v = grads_[name];
    if (v.empty()) v.assign(n, 0.0);
    if (v.size() != n) throw std::invalid_argument("GradStore::acc size mismatch for " + name);
    kern::ops().axpy(1.0, g, v.data(), static_cast<int>(n));
}

const std::vector<double>* GradStore::find(const std::string& name) const {
    auto it = grads_.find(name);
    return it == grads_.end() ? nullptr : &it->second;
}

void GradStore::scale_all(double a) {
    for (auto& [name, v] : grads_) kern::ops().scale(v.data(), a, static_cast<int>(v.size()));
}

std::vector<double>& ParamStore::create(const std::string& name, std::size_t n) {
    if (data_.count(name)) throw std::invalid_argument("parameter exists: " + name);
    auto& v = data_[name];
    v.assign(n, 0.0);
    return v;
}

std::vector<double>& ParamStore::create_normal(const std::string& name, std::size_t n,
                                               Rng& rng, double stddev) {
    auto& v = create(name, n);
    for (double& x : v) x = rng.normal(0.0, stddev);
    return v;
}

std::vector<double>& ParamStore::get(const std::string& name) {
    auto it = data_.find(name);
    if (it == data_.end()) throw std::out_of_range("no parameter: " + name);
    return it->second;
}

const std::vector<double>& ParamStore::get(const std::string& name) const {
    auto it = data_.find(name);
    if (it == data_.end()) throw std::out_of_range("no parameter: " + name);
    return it->second;
}

std::size_t ParamStore::total_size() const {
    std::size_t n = 0;
    for (const auto& [k, v] : data_) n += v.size();
    return n;
}

NodeId Tape::push(Op op, int n) {
    Node node;
    node.op = op;
    node.n = n;
    node.off = static_cast<int32_t>(vals_.size());
    vals_.resize(vals_.size() + n, 0.0);
    nodes_.push_back(node);
    return static_cast<NodeId>(nodes_.size() - 1);
}

void Tape::check_same_size(NodeId a, NodeId b) const {
    if (nodes_[a].n != nodes_[b].n)
        throw std::invalid_argument("tape op size mismatch: " + std::to_string(nodes_[a].n) +
                                    " vs " + std::to_string(nodes_[b].n));
}

NodeId Tape::input(const double* data, std::size_t n) {
    NodeId id = push(Op::Input, static_cast<int>(n));
    std::memcpy(vals_.data() + nodes_[id].off, data, n * sizeof(double));
    return id;
}

NodeId Tape::param(const std::string& name) {
    auto it = param_cache_.find(name);
    if (it != param_cache_.end()) return it->second;
    const std::vector<double>& v = params_->get(name);
    NodeId id = push(Op::Param, static_cast<int>(v.size()));
    std::memcpy(vals_.data() + nodes_[id].off, v.data(), v.size() * sizeof(double));
    nodes_[id].aux = static_cast<int32_t>(param_names_.size());
    param_names_.push_back(name);
    param_cache_.emplace(name, id);
    return id;
}

NodeId Tape::add(NodeId a, NodeId b) {
    check_same_size(a, b);
    int n = nodes_[a].n;
    NodeId id = push(Op::Add, n);
    const double* va = value(a);
    const double* vb = value(b);
    double* out = vals_.data() + nodes_[id].off;
    for (int i = 0; i < n; ++i) out[i] = va[i] + vb[i];
    nodes_[id].a = a;
    nodes_[id].b = b;
    return id;
}

NodeId Tape::mul(NodeId a, NodeId b) {
    check_same_size(a, b);
    int n = nodes_[a].n;
    NodeId id = push(Op::Mul, n);
    kern::ops().mul(value(a), value(b), vals_.data() + nodes_[id].off, n);
    nodes_[id].a = a;
    nodes_[id].b = b;
    return id;
}

NodeId Tape::one_minus(NodeId a) {
    int n = nodes_[a].n;
    NodeId id = push(Op::OneMinus, n);
    const double* va = value(a);
    double* out = vals_.data() + nodes_[id].off;
    for (int i = 0; i < n; ++i) out[i] = 1.0 - va[i];
    nodes_[id].a = a;
    return id;
}

NodeId Tape::scale(NodeId a, double c) {
    int n = nodes_[a].n;
    NodeId id = push(Op::Scale, n);
    const double* va = value(a);
    double* out = vals_.data() + nodes_[id].off;
    for (int i = 0; i < n; ++i) out[i] = c * va[i];
    nodes_[id].a = a;
    nodes_[id].c = c;
    return id;
}

NodeId Tape::tanh_(NodeId a) {
    int n = nodes_[a].n;
    NodeId id = push(Op::Tanh, n);
    kern::tanh_vec(value(a), vals_.data() + nodes_[id].off, n);
    nodes_[id].a = a;
    return id;
}

NodeId Tape::sigmoid(NodeId a) {
    int n = nodes_[a].n;
    NodeId id = push(Op::Sigmoid, n);
    kern::sigmoid_vec(value(a), vals_.data() + nodes_[id].off, n);
    nodes_[id].a = a;
    return id;
}

NodeId Tape::matvec(NodeId W, NodeId x, int rows, int cols) {
    if (nodes_[W].n != rows * cols || nodes_[x].n != cols)
        throw std::invalid_argument("matvec shape mismatch");
    NodeId id = push(Op::Matvec, rows);
    kern::ops().matvec_acc(value(W), value(x), vals_.data() + nodes_[id].off, rows, cols);
    nodes_[id].a = W;
    nodes_[id].b = x;
    nodes_[id].rows = rows;
    nodes_[id].cols = cols;
    return id;
}

NodeId Tape::row(NodeId W, int r, int rows, int cols) {
    if (nodes_[W].n != rows * cols || r < 0 || r >= rows)
        throw std::invalid_argument("row out of range");
    NodeId id = push(Op::Row, cols);
    std::memcpy(vals_.data() + nodes_[id].off, value(W) + static_cast<long>(r) * cols,
                cols * sizeof(double));
    nodes_[id].a = W;
    nodes_[id].rows = rows;
    nodes_[id].cols = cols;
    nodes_[id].aux = r;
    return id;
}

NodeId Tape::dot(NodeId a, NodeId b) {
    check_same_size(a, b);
    NodeId id = push(Op::Dot, 1);
    vals_[nodes_[id].off] = kern::ops().dot(value(a), value(b), nodes_[a].n);
    nodes_[id].a = a;
    nodes_[id].b = b;
    return id;
}

NodeId Tape::sum(NodeId a) {
    NodeId id = push(Op::Sum, 1);
    vals_[nodes_[id].off] = kern::ops().sum(value(a), nodes_[a].n);
    nodes_[id].a = a;
    return id;
}

NodeId Tape::pack(const std::vector<NodeId>& scalars) {
    if (scalars.empty()) throw std::invalid_argument("pack of nothing");
    for (NodeId s : scalars)
        if (nodes_[s].n != 1) throw std::invalid_argument("pack expects scalars");
    NodeId id = push(Op::Pack, static_cast<int>(scalars.size()));
    nodes_[id].a = static_cast<NodeId>(pack_args_.size());
    nodes_[id].b = static_cast<NodeId>(scalars.size());
    pack_args_.insert(pack_args_.end(), scalars.begin(), scalars.end());
    double* out = vals_.data() + nodes_[id].off;
    for (std::size_t i = 0; i < scalars.size(); ++i) out[i] = vals_[nodes_[scalars[i]].off];
    return id;
}

NodeId Tape::index(NodeId a, int i) {
    if (i < 0 || i >= nodes_[a].n) throw std::invalid_argument("index out of range");
    NodeId id = push(Op::Index, 1);
    vals_[nodes_[id].off] = value(a)[i];
    nodes_[id].a = a;
    nodes_[id].aux = i;
    return id;
}

std::vector<double> Tape::softmax_values(NodeId logits) const {
    int n = nodes_[logits].n;
    const double* v = value(logits);
    double mx = v[0];
    for (int i = 1; i < n; ++i) mx = std::max(mx, v[i]);
    std::vector<double> p(n);
    double z = 0.0;
    for (int i = 0; i < n; ++i) {
        p[i] = std::exp(v[i] - mx);
        z += p[i];
    }
    for (double& x : p) x /= z;
    return p;
}

NodeId Tape::log_softmax_pick(NodeId logits, int k) {
    int n = nodes_[logits].n;
    if (k < 0 || k >= n) throw std::invalid_argument("log_softmax_pick index out of range");
    const double* v = value(logits);
    double mx = v[0];
    for (int i = 1; i < n; ++i) mx = std::max(mx, v[i]);
    double z = 0.0;
    for (int i = 0; i < n; ++i) z += std::exp(v[i] - mx);
    NodeId id = push(Op::LogSoftmaxPick, 1);
    vals_[nodes_[id].off] = value(logits)[k] - (mx + std::log(z));
    nodes_[id].a = logits;
    nodes_[id].aux = k;
    return id;
}

std::pair<int, NodeId> Tape::categorical_sample(NodeId logits, Rng& rng) {
    for (int i = 0; i < nodes_[logits].n; ++i)
        if (std::isnan(value(logits)[i]))
            throw std::runtime_error("categorical_sample: NaN logit");
    std::vector<double> p = softmax_values(logits);
    int k = static_cast<int>(rng.categorical(p));
    return {k, log_softmax_pick(logits, k)};
}

double Tape::scalar(NodeId id) const {
    assert(nodes_[id].n == 1);
    return vals_[nodes_[id].off];
}

void Tape::backward(NodeId root, double seed, GradStore& out) const {
    if (nodes_[root].n != 1)
        throw std::invalid_argument("backward root must be scalar");
    // Scratch adjoint buffer aligned with the value arena; results are added
    // into `out` at the end, so repeated calls accumulate (and double).
    std::vector<double> adj(vals_.size(), 0.0);
    adj[nodes_[root].off] = seed;
    const kern::Ops& K = kern::ops();

    for (NodeId id = root; id >= 0; --id) {
        const Node& nd = nodes_[id];
        const double* g = adj.data() + nd.off;
        bool any = false;
        for (int i = 0; i < nd.n; ++i)
            if (g[i] != 0.0) { any = true; break; }
        if (!any) continue;

        switch (nd.op) {
            case Op::Input:
                break;
            case Op::Param:
                out.acc(param_names_[nd.aux], g, nd.n);
                break;
            case Op::Add:
                K.axpy(1.0, g, adj.data() + nodes_[nd.a].off, nd.n);
                K.axpy(1.0, g, adj.data() + nodes_[nd.b].off, nd.n);
                break;
            case Op::Mul:
                K.mul_acc(g, vals_.data() + nodes_[nd.b].off, adj.data() + nodes_[nd.a].off, nd.n);
                K.mul_acc(g, vals_.data() + nodes_[nd.a].off, adj.data() + nodes_[nd.b].off, nd.n);
                break;
            case Op::OneMinus:
                K.axpy(-1.0, g, adj.data() + nodes_[nd.a].off, nd.n);
                break;
            case Op::Scale:
                K.axpy(nd.c, g, adj.data() + nodes_[nd.a].off, nd.n);
                break;
            case Op::Tanh: {
                double* da = adj.data() + nodes_[nd.a].off;
                const double* y = vals_.data() + nd.off;
                for (int i = 0; i < nd.n; ++i) da[i] += g[i] * (1.0 - y[i] * y[i]);
                break;
            }
            case Op::Sigmoid: {
                double* da = adj.data() + nodes_[nd.a].off;
                const double* y = vals_.data() + nd.off;
                for (int i = 0; i < nd.n; ++i) da[i] += g[i] * y[i] * (1.0 - y[i]);
                break;
            }
            case Op::Matvec:
                // dW += g x^T ; dx += W^T g
                K.outer_acc(adj.data() + nodes_[nd.a].off, g, vals_.data() + nodes_[nd.b].off,
                            nd.rows, nd.cols);
                K.matvec_t_acc(vals_.data() + nodes_[nd.a].off, g,
                               adj.data() + nodes_[nd.b].off, nd.rows, nd.cols);
                break;
            case Op::Row:
                K.axpy(1.0, g, adj.data() + nodes_[nd.a].off + static_cast<long>(nd.aux) * nd.cols,
                       nd.n);
                break;
            case Op::Dot: {
                double gs = g[0];
                K.axpy(gs, vals_.data() + nodes_[nd.b].off, adj.data() + nodes_[nd.a].off,
                       nodes_[nd.a].n);
                K.axpy(gs, vals_.data() + nodes_[nd.a].off, adj.data() + nodes_[nd.b].off,
                       nodes_[nd.a].n);
                break;
            }
            case Op::Sum: {
                double gs = g[0];
                double* da = adj.data() + nodes_[nd.a].off;
                for (int i = 0; i < nodes_[nd.a].n; ++i) da[i] += gs;
                break;
            }
            case Op::Pack:
                for (int i = 0; i < nd.b; ++i) {
                    NodeId src = pack_args_[nd.a + i];
                    adj[nodes_[src].off] += g[i];
                }
                break;
            case Op::Index:
                adj[nodes_[nd.a].off + nd.aux] += g[0];
                break;
            case Op::LogSoftmaxPick: {
                double gs = g[0];
                double* da = adj.data() + nodes_[nd.a].off;
                const double* lv = vals_.data() + nodes_[nd.a].off;
                int n = nodes_[nd.a].n;
                double mx = lv[0];
                for (int i = 1; i < n; ++i) mx = std::max(mx, lv[i]);
                double z = 0.0;
                for (int i = 0; i < n; ++i) z += std::exp(lv[i] - mx);
                for (int i = 0; i < n; ++i) da[i] -= gs * std::exp(lv[i] - mx) / z;
                da[nd.aux] += gs;
                break;
            }
        }
    }
}

}  // namespace prover::ad
