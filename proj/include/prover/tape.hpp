#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "prover/rng.hpp"

namespace prover::ad {

// Gradients keyed by parameter name. Accumulates across backward calls and
// across episodes until cleared.
class GradStore {
public:
    void acc(const std::string& name, const double* g, std::size_t n);
    const std::vector<double>* find(const std::string& name) const;
    void scale_all(double a);
    void clear() { grads_.clear(); }
    bool empty() const { return grads_.empty(); }
    const std::map<std::string, std::vector<double>>& entries() const { return grads_; }

private:
    std::map<std::string, std::vector<double>> grads_;
};

// Named parameter vectors/matrices. std::map keeps iteration (and therefore
// serialization and optimizer order) deterministic.
class ParamStore {
public:
    std::vector<double>& create(const std::string& name, std::size_t n);
    std::vector<double>& create_normal(const std::string& name, std::size_t n, Rng& rng,
                                       double stddev);
    std::vector<double>& get(const std::string& name);
    const std::vector<double>& get(const std::string& name) const;
    bool has(const std::string& name) const { return data_.count(name) != 0; }
    std::size_t total_size() const;
    std::map<std::string, std::vector<double>>& entries() { return data_; }
    const std::map<std::string, std::vector<double>>& entries() const { return data_; }

private:
    std::map<std::string, std::vector<double>> data_;
};

using NodeId = int32_t;

// Reverse-mode tape over double vectors. Build a computation with the op
// methods, then call backward() on a scalar node; parameter-leaf gradients
// are summed into a GradStore. Tapes are cheap and meant to be rebuilt per
// episode. value() pointers are invalidated by subsequent op calls.
class Tape {
public:
    explicit Tape(const ParamStore& params) : params_(&params) {}

    // Leaves. input() copies; param() is cached by name (one leaf per
    // parameter per tape) and reads its size from the bound ParamStore.
    NodeId input(const double* data, std::size_t n);
    NodeId input_scalar(double v) { return input(&v, 1); }
    NodeId param(const std::string& name);

    // Elementwise; sizes must match.
    NodeId add(NodeId a, NodeId b);
    NodeId mul(NodeId a, NodeId b);
    NodeId one_minus(NodeId a);  // 1 - a
    NodeId scale(NodeId a, double c);
    NodeId tanh_(NodeId a);
    NodeId sigmoid(NodeId a);

    // Linear algebra. W is rows*cols row-major, x has cols entries.
    NodeId matvec(NodeId W, NodeId x, int rows, int cols);
    NodeId row(NodeId W, int r, int rows, int cols);  // one row of a matrix leaf
    NodeId dot(NodeId a, NodeId b);
    NodeId sum(NodeId a);

    // Shape plumbing for distributions over dynamic candidate sets.
    NodeId pack(const std::vector<NodeId>& scalars);
    NodeId index(NodeId a, int i);

    // log softmax(logits)[k]; gradient is onehot(k) - softmax.
    NodeId log_softmax_pick(NodeId logits, int k);

    // Draw index ~ softmax(logits) and return its differentiable log-prob.
    std::pair<int, NodeId> categorical_sample(NodeId logits, Rng& rng);

    int size(NodeId id) const { return nodes_[id].n; }
    const double* value(NodeId id) const { return vals_.data() + nodes_[id].off; }
    double scalar(NodeId id) const;

    // Softmax of a logits node's current values (no tape growth); used by
    // samplers that need the full distribution.
    std::vector<double> softmax_values(NodeId logits) const;

    // Reverse sweep from a scalar root; adds parameter gradients into out.
    // Calling twice (without out.clear()) doubles them.
    void backward(NodeId root, double seed, GradStore& out) const;

    std::size_t node_count() const { return nodes_.size(); }

private:
    enum class Op : uint8_t {
        Input, Param, Add, Mul, OneMinus, Scale, Tanh, Sigmoid,
        Matvec, Row, Dot, Sum, Pack, Index, LogSoftmaxPick,
    };

    struct Node {
        Op op;
        NodeId a = -1, b = -1;  // parents; for Pack: (start, count) in pack_args_
        int32_t off = 0;        // offset into vals_
        int32_t n = 0;          // value length
        int32_t rows = 0, cols = 0;
        int32_t aux = -1;       // pick/row/element index, or param id
        double c = 0.0;
    };

    NodeId push(Op op, int n);
    void check_same_size(NodeId a, NodeId b) const;

    const ParamStore* params_;
    std::vector<Node> nodes_;
    std::vector<double> vals_;
    std::vector<NodeId> pack_args_;
    std::vector<std::string> param_names_;
    std::unordered_map<std::string, NodeId> param_cache_;
};

}  // namespace prover::ad
