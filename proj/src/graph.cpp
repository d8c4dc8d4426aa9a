#include "volcast/graph.hpp"

#include <cmath>
#include <utility>

#include "volcast/errors.hpp"

namespace volcast::diff {

double softplus_value(double x) {
    // ln(1 + e^x) without overflow for large |x|
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

double logistic_value(double x) { return 1.0 / (1.0 + std::exp(-x)); }

namespace {
constexpr auto stable_softplus = softplus_value;
constexpr auto logistic = logistic_value;
}  // namespace

const char* op_kind_name(OpKind kind) {
    switch (kind) {
        case OpKind::leaf: return "leaf";
        case OpKind::matvec: return "matvec";
        case OpKind::dot: return "dot";
        case OpKind::add: return "add";
        case OpKind::mul: return "mul";
        case OpKind::sigmoid: return "sigmoid";
        case OpKind::tanh_fn: return "tanh";
        case OpKind::softplus: return "softplus";
        case OpKind::square: return "square";
        case OpKind::log_fn: return "log";
        case OpKind::sqrt_fn: return "sqrt";
        case OpKind::reciprocal: return "reciprocal";
        case OpKind::mean: return "mean";
        case OpKind::concat: return "concat";
        case OpKind::affine: return "affine";
        case OpKind::floor_at: return "floor_at";
    }
    return "?";
}

std::string Graph::describe(NodeId id) const {
    const Node& n = nodes_[id];
    std::string s = "node #" + std::to_string(id) + " (" + op_kind_name(n.kind);
    if (!n.label.empty()) s += " '" + n.label + "'";
    s += ")";
    return s;
}

NodeId Graph::push(Node node) {
    nodes_.push_back(std::move(node));
    return nodes_.size() - 1;
}

const Graph::Node& Graph::checked(NodeId id, const char* who) const {
    if (id >= nodes_.size())
        throw std::invalid_argument(std::string(who) + ": unknown node id " + std::to_string(id));
    return nodes_[id];
}

NodeId Graph::leaf(std::vector<std::size_t> shape, std::string label) {
    NodeId id = push({OpKind::leaf, 0, 0, 0.0, 0.0, std::move(shape), std::move(label)});
    leaves_.push_back(id);
    return id;
}

NodeId Graph::matvec(NodeId matrix, NodeId vec, std::string label) {
    const Node& m = checked(matrix, "matvec");
    const Node& v = checked(vec, "matvec");
    if (m.shape.size() != 2 || v.shape.size() != 1 || m.shape[1] != v.shape[0])
        throw std::invalid_argument("matvec: incompatible shapes " + shape_string(m.shape) + " x " +
                                    shape_string(v.shape) + " at " + describe(matrix) + ", " +
                                    describe(vec));
    return push({OpKind::matvec, matrix, vec, 0.0, 0.0, {m.shape[0]}, std::move(label)});
}

NodeId Graph::dot(NodeId a, NodeId b, std::string label) {
    const Node& na = checked(a, "dot");
    const Node& nb = checked(b, "dot");
    if (na.shape.size() != 1 || nb.shape.size() != 1 || na.shape[0] != nb.shape[0])
        throw std::invalid_argument("dot: incompatible shapes " + shape_string(na.shape) + " . " +
                                    shape_string(nb.shape) + " at " + describe(a) + ", " + describe(b));
    return push({OpKind::dot, a, b, 0.0, 0.0, {}, std::move(label)});
}

NodeId Graph::add(NodeId a, NodeId b, std::string label) {
    const Node& na = checked(a, "add");
    const Node& nb = checked(b, "add");
    if (na.shape != nb.shape)
        throw std::invalid_argument("add: shape mismatch " + shape_string(na.shape) + " vs " +
                                    shape_string(nb.shape) + " at " + describe(a) + ", " + describe(b));
    return push({OpKind::add, a, b, 0.0, 0.0, na.shape, std::move(label)});
}

NodeId Graph::mul(NodeId a, NodeId b, std::string label) {
    const Node& na = checked(a, "mul");
    const Node& nb = checked(b, "mul");
    if (na.shape != nb.shape)
        throw std::invalid_argument("mul: shape mismatch " + shape_string(na.shape) + " vs " +
                                    shape_string(nb.shape) + " at " + describe(a) + ", " + describe(b));
    return push({OpKind::mul, a, b, 0.0, 0.0, na.shape, std::move(label)});
}

NodeId Graph::unary(OpKind kind, NodeId a, std::string label) {
    const Node& na = checked(a, op_kind_name(kind));
    return push({kind, a, 0, 0.0, 0.0, na.shape, std::move(label)});
}

NodeId Graph::sigmoid(NodeId a, std::string label) { return unary(OpKind::sigmoid, a, std::move(label)); }
NodeId Graph::tanh(NodeId a, std::string label) { return unary(OpKind::tanh_fn, a, std::move(label)); }
NodeId Graph::softplus(NodeId a, std::string label) { return unary(OpKind::softplus, a, std::move(label)); }
NodeId Graph::square(NodeId a, std::string label) { return unary(OpKind::square, a, std::move(label)); }
NodeId Graph::log(NodeId a, std::string label) { return unary(OpKind::log_fn, a, std::move(label)); }
NodeId Graph::sqrt(NodeId a, std::string label) { return unary(OpKind::sqrt_fn, a, std::move(label)); }
NodeId Graph::reciprocal(NodeId a, std::string label) { return unary(OpKind::reciprocal, a, std::move(label)); }

NodeId Graph::mean(NodeId a, std::string label) {
    checked(a, "mean");
    return push({OpKind::mean, a, 0, 0.0, 0.0, {}, std::move(label)});
}

NodeId Graph::concat(NodeId a, NodeId b, std::string label) {
    const Node& na = checked(a, "concat");
    const Node& nb = checked(b, "concat");
    if (na.shape.size() > 1 || nb.shape.size() > 1)
        throw std::invalid_argument("concat: expects scalars or vectors, got " +
                                    shape_string(na.shape) + " and " + shape_string(nb.shape));
    std::size_t n = shape_product(na.shape) + shape_product(nb.shape);
    return push({OpKind::concat, a, b, 0.0, 0.0, {n}, std::move(label)});
}

NodeId Graph::affine(NodeId a, double scale, double shift, std::string label) {
    const Node& na = checked(a, "affine");
    return push({OpKind::affine, a, 0, scale, shift, na.shape, std::move(label)});
}

NodeId Graph::floor_at(NodeId a, double floor, std::string label) {
    const Node& na = checked(a, "floor_at");
    return push({OpKind::floor_at, a, 0, floor, 0.0, na.shape, std::move(label)});
}

Runner::Runner(const Graph& graph) : graph_(&graph) {
    values_.reserve(graph.size());
    grads_.reserve(graph.size());
    for (NodeId id = 0; id < graph.size(); ++id) {
        values_.push_back(Tensor::zeros(graph.node(id).shape));
        grads_.push_back(Tensor::zeros(graph.node(id).shape));
    }
    bound_.assign(graph.size(), 0);
}

void Runner::bind(NodeId leaf, const Tensor& value) {
    const Graph::Node& n = graph_->node(leaf);
    if (n.kind != OpKind::leaf)
        throw std::invalid_argument("bind: " + graph_->describe(leaf) + " is not a leaf");
    if (value.shape() != n.shape)
        throw std::invalid_argument("bind: " + graph_->describe(leaf) + " expects shape " +
                                    shape_string(n.shape) + ", got " + shape_string(value.shape()));
    values_[leaf] = value;
    bound_[leaf] = 1;
}

void Runner::forward() {
    const Graph& g = *graph_;
    for (NodeId id = 0; id < g.size(); ++id) {
        const Graph::Node& n = g.node(id);
        Tensor& out = values_[id];
        switch (n.kind) {
            case OpKind::leaf:
                if (!bound_[id])
                    throw std::invalid_argument("forward: unbound " + g.describe(id));
                break;
            case OpKind::matvec: {
                const Tensor& m = values_[n.a];
                const Tensor& v = values_[n.b];
                std::size_t rows = m.rows(), cols = m.cols();
                for (std::size_t r = 0; r < rows; ++r) {
                    double acc = 0.0;
                    for (std::size_t c = 0; c < cols; ++c) acc += m.data()[r * cols + c] * v[c];
                    out[r] = acc;
                }
                break;
            }
            case OpKind::dot: {
                const Tensor& a = values_[n.a];
                const Tensor& b = values_[n.b];
                double acc = 0.0;
                for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
                out[0] = acc;
                break;
            }
            case OpKind::add: {
                const Tensor& a = values_[n.a];
                const Tensor& b = values_[n.b];
                for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
                break;
            }
            case OpKind::mul: {
                const Tensor& a = values_[n.a];
                const Tensor& b = values_[n.b];
                for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
                break;
            }
            case OpKind::sigmoid: {
                const Tensor& a = values_[n.a];
                for (std::size_t i = 0; i < a.size(); ++i) out[i] = logistic(a[i]);
                break;
            }
            case OpKind::tanh_fn: {
                const Tensor& a = values_[n.a];
                for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::tanh(a[i]);
                break;
            }
            case OpKind::softplus: {
                const Tensor& a = values_[n.a];
                for (std::size_t i = 0; i < a.size(); ++i) out[i] = stable_softplus(a[i]);
                break;
            }
            case OpKind::square: {
                const Tensor& a = values_[n.a];
                for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * a[i];
                break;
            }
            case OpKind::log_fn: {
                const Tensor& a = values_[n.a];
                for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::log(a[i]);
                break;
            }
            case OpKind::sqrt_fn: {
                const Tensor& a = values_[n.a];
                for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::sqrt(a[i]);
                break;
            }
            case OpKind::reciprocal: {
                const Tensor& a = values_[n.a];
                for (std::size_t i = 0; i < a.size(); ++i) out[i] = 1.0 / a[i];
                break;
            }
            case OpKind::mean: {
                const Tensor& a = values_[n.a];
                double acc = 0.0;
                for (std::size_t i = 0; i < a.size(); ++i) acc += a[i];
                out[0] = acc / static_cast<double>(a.size());
                break;
            }
            case OpKind::concat: {
                const Tensor& a = values_[n.a];
                const Tensor& b = values_[n.b];
                for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i];
                for (std::size_t i = 0; i < b.size(); ++i) out[a.size() + i] = b[i];
                break;
            }
            case OpKind::affine: {
                const Tensor& a = values_[n.a];
                for (std::size_t i = 0; i < a.size(); ++i) out[i] = n.c0 * a[i] + n.c1;
                break;
            }
            case OpKind::floor_at: {
                const Tensor& a = values_[n.a];
                for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] > n.c0 ? a[i] : n.c0;
                break;
            }
        }
        if (!out.all_finite())
            throw numeric_error("forward: non-finite value at " + g.describe(id));
    }
    has_forward_ = true;
}

void Runner::backward(NodeId seed) {
    const Graph& g = *graph_;
    if (!has_forward_) throw std::invalid_argument("backward: forward() has not been run");
    if (seed >= g.size()) throw std::invalid_argument("backward: unknown seed node");
    if (values_[seed].size() != 1)
        throw std::invalid_argument("backward: seed " + g.describe(seed) + " is not scalar-valued");

    for (NodeId id = 0; id < g.size(); ++id) {
        Tensor& t = grads_[id];
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = 0.0;
    }
    grads_[seed][0] = 1.0;

    // Reverse tape order; inputs always precede consumers, so one pass
    // accumulates every adjoint deterministically.
    for (NodeId id = g.size(); id-- > 0;) {
        const Graph::Node& n = g.node(id);
        const Tensor& gr = grads_[id];
        switch (n.kind) {
            case OpKind::leaf:
                break;
            case OpKind::matvec: {
                const Tensor& m = values_[n.a];
                const Tensor& v = values_[n.b];
                Tensor& dm = grads_[n.a];
                Tensor& dv = grads_[n.b];
                std::size_t rows = m.rows(), cols = m.cols();
                for (std::size_t r = 0; r < rows; ++r) {
                    double grad_r = gr[r];
                    for (std::size_t c = 0; c < cols; ++c) {
                        dm.data()[r * cols + c] += grad_r * v[c];
                        dv[c] += grad_r * m.data()[r * cols + c];
                    }
                }
                break;
            }
            case OpKind::dot: {
                const Tensor& a = values_[n.a];
                const Tensor& b = values_[n.b];
                double s = gr[0];
                for (std::size_t i = 0; i < a.size(); ++i) {
                    grads_[n.a][i] += s * b[i];
                    grads_[n.b][i] += s * a[i];
                }
                break;
            }
            case OpKind::add:
                for (std::size_t i = 0; i < gr.size(); ++i) {
                    grads_[n.a][i] += gr[i];
                    grads_[n.b][i] += gr[i];
                }
                break;
            case OpKind::mul: {
                const Tensor& a = values_[n.a];
                const Tensor& b = values_[n.b];
                for (std::size_t i = 0; i < gr.size(); ++i) {
                    grads_[n.a][i] += gr[i] * b[i];
                    grads_[n.b][i] += gr[i] * a[i];
                }
                break;
            }
            case OpKind::sigmoid: {
                const Tensor& y = values_[id];
                for (std::size_t i = 0; i < gr.size(); ++i)
                    grads_[n.a][i] += gr[i] * y[i] * (1.0 - y[i]);
                break;
            }
            case OpKind::tanh_fn: {
                const Tensor& y = values_[id];
                for (std::size_t i = 0; i < gr.size(); ++i)
                    grads_[n.a][i] += gr[i] * (1.0 - y[i] * y[i]);
                break;
            }
            case OpKind::softplus: {
                const Tensor& x = values_[n.a];
                for (std::size_t i = 0; i < gr.size(); ++i)
                    grads_[n.a][i] += gr[i] * logistic(x[i]);
                break;
            }
            case OpKind::square: {
                const Tensor& x = values_[n.a];
                for (std::size_t i = 0; i < gr.size(); ++i)
                    grads_[n.a][i] += gr[i] * 2.0 * x[i];
                break;
            }
            case OpKind::log_fn: {
                const Tensor& x = values_[n.a];
                for (std::size_t i = 0; i < gr.size(); ++i) grads_[n.a][i] += gr[i] / x[i];
                break;
            }
            case OpKind::sqrt_fn: {
                const Tensor& y = values_[id];
                for (std::size_t i = 0; i < gr.size(); ++i)
                    grads_[n.a][i] += gr[i] * 0.5 / y[i];
                break;
            }
            case OpKind::reciprocal: {
                const Tensor& y = values_[id];
                for (std::size_t i = 0; i < gr.size(); ++i)
                    grads_[n.a][i] += -gr[i] * y[i] * y[i];
                break;
            }
            case OpKind::mean: {
                double s = gr[0] / static_cast<double>(values_[n.a].size());
                Tensor& da = grads_[n.a];
                for (std::size_t i = 0; i < da.size(); ++i) da[i] += s;
                break;
            }
            case OpKind::concat: {
                std::size_t na = values_[n.a].size();
                for (std::size_t i = 0; i < na; ++i) grads_[n.a][i] += gr[i];
                for (std::size_t i = 0; i < values_[n.b].size(); ++i) grads_[n.b][i] += gr[na + i];
                break;
            }
            case OpKind::affine:
                for (std::size_t i = 0; i < gr.size(); ++i) grads_[n.a][i] += n.c0 * gr[i];
                break;
            case OpKind::floor_at: {
                const Tensor& x = values_[n.a];
                for (std::size_t i = 0; i < gr.size(); ++i)
                    if (x[i] >= n.c0) grads_[n.a][i] += gr[i];
                break;
            }
        }
    }
}

double check_gradients(const std::function<NodeId(Graph&, const std::vector<NodeId>&)>& build,
                       const std::vector<Tensor>& points, double step) {
    if (!(step >= 1e-7 && step <= 1e-3))
        throw std::invalid_argument("check_gradients: step " + std::to_string(step) +
                                    " outside [1e-7, 1e-3]");
    Graph graph;
    std::vector<NodeId> leaves;
    leaves.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        leaves.push_back(graph.leaf(points[i].shape(), "point" + std::to_string(i)));
    NodeId out = build(graph, leaves);

    Runner runner(graph);
    for (std::size_t i = 0; i < points.size(); ++i) runner.bind(leaves[i], points[i]);
    runner.forward();
    if (runner.value(out).size() != 1)
        throw std::invalid_argument("check_gradients: builder output is not scalar");
    runner.backward(out);

    std::vector<Tensor> analytic;
    analytic.reserve(points.size());
    for (NodeId leaf : leaves) analytic.push_back(runner.grad(leaf));

    double worst = 0.0;
    std::vector<Tensor> probe = points;
    for (std::size_t p = 0; p < points.size(); ++p) {
        for (std::size_t i = 0; i < points[p].size(); ++i) {
            double base = points[p][i];
            probe[p][i] = base + step;
            runner.bind(leaves[p], probe[p]);
            runner.forward();
            double up = runner.value(out).item();
            probe[p][i] = base - step;
            runner.bind(leaves[p], probe[p]);
            runner.forward();
            double down = runner.value(out).item();
            probe[p][i] = base;
            runner.bind(leaves[p], probe[p]);

            double numeric = (up - down) / (2.0 * step);
            if (!std::isfinite(numeric))
                throw numeric_error("check_gradients: non-finite finite-difference value");
            double a = analytic[p][i];
            double rel = std::abs(a - numeric) / std::max(1.0, std::abs(a));
            if (rel > worst) worst = rel;
        }
    }
    return worst;
}

double check_gradients(const std::function<NodeId(Graph&, NodeId)>& build, const Tensor& point,
                       double step) {
    return check_gradients(
        [&build](Graph& g, const std::vector<NodeId>& leaves) { return build(g, leaves[0]); },
        std::vector<Tensor>{point}, step);
}

}  // namespace volcast::diff
