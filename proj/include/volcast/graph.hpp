#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "volcast/tensor.hpp"

namespace volcast::diff {

using NodeId = std::size_t;

enum class OpKind {
    leaf,
    matvec,      // (m,n) x (n) -> (m)
    dot,         // (n) . (n) -> scalar
    add,         // elementwise, same shape
    mul,         // elementwise, same shape
    sigmoid,
    tanh_fn,
    softplus,
    square,
    log_fn,
    sqrt_fn,
    reciprocal,
    mean,        // any shape -> scalar
    concat,      // rank <= 1 tensors -> vector
    affine,      // c0 * x + c1, scalar constants
    floor_at,    // max(x, c0) elementwise
};

const char* op_kind_name(OpKind kind);

// Scalar kernels shared with code that mirrors graph arithmetic outside a
// tape (keeps both paths numerically identical).
double softplus_value(double x);
double logistic_value(double x);

/// Recorded computation structure: an append-only list of nodes in
/// topological order (inputs always precede their consumers). The graph
/// holds shapes and wiring only; values live in a Runner so one graph can
/// be re-evaluated against many leaf bindings.
class Graph {
public:
    struct Node {
        OpKind kind = OpKind::leaf;
        NodeId a = 0;
        NodeId b = 0;
        double c0 = 0.0;  // scalar parameter (affine slope / floor)
        double c1 = 0.0;  // affine intercept
        std::vector<std::size_t> shape;
        std::string label;
    };

    NodeId leaf(std::vector<std::size_t> shape, std::string label = {});

    NodeId matvec(NodeId matrix, NodeId vec, std::string label = {});
    NodeId dot(NodeId a, NodeId b, std::string label = {});
    NodeId add(NodeId a, NodeId b, std::string label = {});
    NodeId mul(NodeId a, NodeId b, std::string label = {});
    NodeId sigmoid(NodeId a, std::string label = {});
    NodeId tanh(NodeId a, std::string label = {});
    NodeId softplus(NodeId a, std::string label = {});
    NodeId square(NodeId a, std::string label = {});
    NodeId log(NodeId a, std::string label = {});
    NodeId sqrt(NodeId a, std::string label = {});
    NodeId reciprocal(NodeId a, std::string label = {});
    NodeId mean(NodeId a, std::string label = {});
    NodeId concat(NodeId a, NodeId b, std::string label = {});
    NodeId affine(NodeId a, double scale, double shift, std::string label = {});
    NodeId floor_at(NodeId a, double floor, std::string label = {});

    const Node& node(NodeId id) const { return nodes_[id]; }
    std::size_t size() const { return nodes_.size(); }
    const std::vector<NodeId>& leaves() const { return leaves_; }
    std::string describe(NodeId id) const;

private:
    NodeId push(Node node);
    NodeId unary(OpKind kind, NodeId a, std::string label);
    const Node& checked(NodeId id, const char* who) const;

    std::vector<Node> nodes_;
    std::vector<NodeId> leaves_;
};

/// Evaluates a Graph. Value and gradient buffers are allocated once and
/// reused across forward/backward calls, so rebinding leaves and
/// re-running is cheap (the training loop relies on this).
class Runner {
public:
    explicit Runner(const Graph& graph);

    void bind(NodeId leaf, const Tensor& value);

    /// Computes every node value in tape order. All leaves must be bound.
    /// Throws numeric_error naming the node if a non-finite value appears.
    void forward();

    /// Reverse accumulation from a scalar seed; fills d(seed)/d(node) for
    /// every node. Requires a prior forward() on this runner.
    void backward(NodeId seed);

    const Tensor& value(NodeId id) const { return values_[id]; }
    const Tensor& grad(NodeId id) const { return grads_[id]; }
    const Graph& graph() const { return *graph_; }

private:
    const Graph* graph_;
    std::vector<Tensor> values_;
    std::vector<Tensor> grads_;
    std::vector<char> bound_;
    bool has_forward_ = false;
};

/// Compares the analytic gradient of a scalar-valued graph against central
/// finite differences at `point`, returning the largest relative error
/// (denominator max(1, |analytic|)). `step` must lie in [1e-7, 1e-3].
double check_gradients(const std::function<NodeId(Graph&, NodeId)>& build, const Tensor& point,
                       double step);

/// Multi-leaf variant: one leaf per entry of `points`, perturbed jointly.
double check_gradients(const std::function<NodeId(Graph&, const std::vector<NodeId>&)>& build,
                       const std::vector<Tensor>& points, double step);

}  // namespace volcast::diff
