#include "volcast/vanilla_lstm.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "volcast/errors.hpp"
#include "volcast/rng.hpp"

namespace volcast::cells {

using diff::Tensor;

std::vector<Tensor*> VanillaLstmParams::tensors() {
    return {&w_f, &w_i, &w_c, &w_o, &b_f, &b_i, &b_c, &b_o, &w_y, &b_y};
}

std::vector<const Tensor*> VanillaLstmParams::tensors() const {
    return {&w_f, &w_i, &w_c, &w_o, &b_f, &b_i, &b_c, &b_o, &w_y, &b_y};
}

VanillaState VanillaState::zero(std::size_t hidden) {
    return {std::vector<double>(hidden, 0.0), std::vector<double>(hidden, 0.0)};
}

VanillaLstmParams init_vanilla_lstm(int hidden, std::uint64_t seed) {
    if (hidden < 1) throw std::invalid_argument("init_vanilla_lstm: hidden width must be >= 1");
    const auto h = static_cast<std::size_t>(hidden);
    const double bound = 1.0 / std::sqrt(static_cast<double>(h + 1));

    SplitMix64 rng(seed);
    auto uniform = [&rng, bound](std::size_t n) {
        std::vector<double> data(n);
        for (double& v : data) v = (2.0 * rng.next_uniform() - 1.0) * bound;
        return data;
    };

    VanillaLstmParams p;
    p.hidden = h;
    p.seed = seed;
    p.w_f = Tensor::matrix(h, h + 1, uniform(h * (h + 1)));
    p.w_i = Tensor::matrix(h, h + 1, uniform(h * (h + 1)));
    p.w_c = Tensor::matrix(h, h + 1, uniform(h * (h + 1)));
    p.w_o = Tensor::matrix(h, h + 1, uniform(h * (h + 1)));
    p.b_f = Tensor::vector(std::vector<double>(h, 1.0));
    p.b_i = Tensor::zeros({h});
    p.b_c = Tensor::zeros({h});
    p.b_o = Tensor::zeros({h});
    p.w_y = Tensor::vector(uniform(h));
    p.b_y = Tensor::scalar(0.0);
    return p;
}

double vanilla_lstm_step(const VanillaLstmParams& p, VanillaState& state, double x) {
    const std::size_t h = p.hidden;
    if (state.h.size() != h || state.c.size() != h)
        throw std::invalid_argument("vanilla_lstm_step: state width mismatch");

    std::vector<double> hx(h + 1);
    for (std::size_t j = 0; j < h; ++j) hx[j] = state.h[j];
    hx[h] = x;

    auto preact = [&](const Tensor& w, const Tensor& b, std::size_t row) {
        double acc = 0.0;
        for (std::size_t c = 0; c < h + 1; ++c) acc += w.data()[row * (h + 1) + c] * hx[c];
        return acc + b[row];
    };

    std::vector<double> c_next(h), h_next(h);
    for (std::size_t j = 0; j < h; ++j) {
        double f = diff::logistic_value(preact(p.w_f, p.b_f, j));
        double i = diff::logistic_value(preact(p.w_i, p.b_i, j));
        double c_tilde = std::tanh(preact(p.w_c, p.b_c, j));
        c_next[j] = f * state.c[j] + i * c_tilde;
    }
    for (std::size_t j = 0; j < h; ++j) {
        double o = diff::logistic_value(preact(p.w_o, p.b_o, j));
        h_next[j] = o * std::tanh(c_next[j]);
    }
    state.c = std::move(c_next);
    state.h = std::move(h_next);

    double y = 0.0;
    for (std::size_t j = 0; j < h; ++j) y += p.w_y[j] * state.h[j];
    return y + p.b_y.item();
}

VanillaLstmForward vanilla_lstm_forward(const VanillaLstmParams& p, std::span<const double> x,
                                        std::span<const double> targets) {
    if (x.size() != targets.size())
        throw std::invalid_argument("vanilla_lstm_forward: inputs and targets differ in length");
    if (x.empty()) throw std::invalid_argument("vanilla_lstm_forward: empty sequence");

    VanillaLstmForward out;
    out.predictions.resize(x.size());
    VanillaState state = VanillaState::zero(p.hidden);
    double sum_sq = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        out.predictions[t] = vanilla_lstm_step(p, state, x[t]);
        double err = out.predictions[t] - targets[t];
        sum_sq += err * err;
    }
    out.mse = sum_sq / static_cast<double>(x.size());
    return out;
}

VanillaLstmGraph build_vanilla_lstm_graph(std::size_t hidden, std::size_t steps) {
    if (hidden < 1 || steps < 1)
        throw std::invalid_argument("build_vanilla_lstm_graph: hidden and steps must be >= 1");
    VanillaLstmGraph g;
    g.hidden = hidden;
    g.steps = steps;
    diff::Graph& graph = g.graph;

    g.w_f = graph.leaf({hidden, hidden + 1}, "w_f");
    g.w_i = graph.leaf({hidden, hidden + 1}, "w_i");
    g.w_c = graph.leaf({hidden, hidden + 1}, "w_c");
    g.w_o = graph.leaf({hidden, hidden + 1}, "w_o");
    g.b_f = graph.leaf({hidden}, "b_f");
    g.b_i = graph.leaf({hidden}, "b_i");
    g.b_c = graph.leaf({hidden}, "b_c");
    g.b_o = graph.leaf({hidden}, "b_o");
    g.w_y = graph.leaf({hidden}, "w_y");
    g.b_y = graph.leaf({}, "b_y");
    g.h0 = graph.leaf({hidden}, "h0");
    g.c0 = graph.leaf({hidden}, "c0");

    diff::NodeId h_prev = g.h0;
    diff::NodeId c_prev = g.c0;
    diff::NodeId sum_sq = 0;
    for (std::size_t t = 0; t < steps; ++t) {
        const std::string st = std::to_string(t);
        diff::NodeId x_t = graph.leaf({}, "x" + st);
        diff::NodeId target_t = graph.leaf({}, "y" + st);
        g.x.push_back(x_t);
        g.target.push_back(target_t);

        diff::NodeId hx = graph.concat(h_prev, x_t);
        diff::NodeId f = graph.sigmoid(graph.add(graph.matvec(g.w_f, hx), g.b_f));
        diff::NodeId i = graph.sigmoid(graph.add(graph.matvec(g.w_i, hx), g.b_i));
        diff::NodeId c_tilde = graph.tanh(graph.add(graph.matvec(g.w_c, hx), g.b_c));
        diff::NodeId o = graph.sigmoid(graph.add(graph.matvec(g.w_o, hx), g.b_o));
        diff::NodeId c = graph.add(graph.mul(f, c_prev), graph.mul(i, c_tilde), "c" + st);
        diff::NodeId h = graph.mul(o, graph.tanh(c), "h" + st);

        diff::NodeId pred = graph.add(graph.dot(g.w_y, h), g.b_y, "pred" + st);
        g.prediction.push_back(pred);
        diff::NodeId err = graph.add(pred, graph.affine(target_t, -1.0, 0.0));
        diff::NodeId sq = graph.square(err);
        sum_sq = t == 0 ? sq : graph.add(sum_sq, sq);

        h_prev = h;
        c_prev = c;
    }
    g.mse = graph.affine(sum_sq, 1.0 / static_cast<double>(steps), 0.0, "mse");
    return g;
}

std::vector<diff::NodeId> VanillaLstmGraph::param_nodes() const {
    return {w_f, w_i, w_c, w_o, b_f, b_i, b_c, b_o, w_y, b_y};
}

void bind_params(diff::Runner& runner, const VanillaLstmGraph& g, const VanillaLstmParams& p) {
    if (p.hidden != g.hidden) throw std::invalid_argument("bind_params: hidden width mismatch");
    runner.bind(g.w_f, p.w_f);
    runner.bind(g.w_i, p.w_i);
    runner.bind(g.w_c, p.w_c);
    runner.bind(g.w_o, p.w_o);
    runner.bind(g.b_f, p.b_f);
    runner.bind(g.b_i, p.b_i);
    runner.bind(g.b_c, p.b_c);
    runner.bind(g.b_o, p.b_o);
    runner.bind(g.w_y, p.w_y);
    runner.bind(g.b_y, p.b_y);
}

void bind_sequence(diff::Runner& runner, const VanillaLstmGraph& g, std::span<const double> x,
                   std::span<const double> targets) {
    if (x.size() != g.steps || targets.size() != g.steps)
        throw std::invalid_argument("bind_sequence: sequence length mismatch");
    runner.bind(g.h0, Tensor::zeros({g.hidden}));
    runner.bind(g.c0, Tensor::zeros({g.hidden}));
    for (std::size_t t = 0; t < g.steps; ++t) {
        runner.bind(g.x[t], Tensor::scalar(x[t]));
        runner.bind(g.target[t], Tensor::scalar(targets[t]));
    }
}

namespace {

nlohmann::json tensor_to_json(const Tensor& t) {
    return {{"shape", t.shape()}, {"data", t.data()}};
}

Tensor tensor_from_json(const nlohmann::json& j) {
    return Tensor(j.at("shape").get<std::vector<std::size_t>>(),
                  j.at("data").get<std::vector<double>>());
}

}  // namespace

std::string vanilla_lstm_to_json(const VanillaLstmParams& p) {
    nlohmann::json j;
    j["kind"] = "lstm";
    j["hidden"] = p.hidden;
    j["seed"] = p.seed;
    const char* names[] = {"w_f", "w_i", "w_c", "w_o", "b_f", "b_i", "b_c", "b_o", "w_y", "b_y"};
    auto ts = p.tensors();
    for (std::size_t i = 0; i < ts.size(); ++i) j[names[i]] = tensor_to_json(*ts[i]);
    return j.dump(2) + "\n";
}

VanillaLstmParams vanilla_lstm_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.at("kind") != "lstm") throw data_error("vanilla_lstm_from_json: kind is not lstm");
    VanillaLstmParams p;
    p.hidden = j.at("hidden").get<std::size_t>();
    p.seed = j.at("seed").get<std::uint64_t>();
    const char* names[] = {"w_f", "w_i", "w_c", "w_o", "b_f", "b_i", "b_c", "b_o", "w_y", "b_y"};
    auto ts = p.tensors();
    for (std::size_t i = 0; i < ts.size(); ++i) *ts[i] = tensor_from_json(j.at(names[i]));
    return p;
}

}  // namespace volcast::cells
