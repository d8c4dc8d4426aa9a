#include "volcast/sigma_lstm.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "volcast/errors.hpp"
#include "volcast/rng.hpp"

namespace volcast::cells {

using diff::Tensor;

namespace {

Tensor uniform_matrix(SplitMix64& rng, std::size_t rows, std::size_t cols, double bound) {
    std::vector<double> data(rows * cols);
    for (double& v : data) v = (2.0 * rng.next_uniform() - 1.0) * bound;
    return Tensor::matrix(rows, cols, std::move(data));
}

Tensor uniform_vector(SplitMix64& rng, std::size_t n, double bound) {
    std::vector<double> data(n);
    for (double& v : data) v = (2.0 * rng.next_uniform() - 1.0) * bound;
    return Tensor::vector(std::move(data));
}

void require_finite(std::span<const double> xs, const char* what) {
    for (double v : xs)
        if (!std::isfinite(v)) throw numeric_error(std::string("sigma_lstm: non-finite ") + what);
}

}  // namespace

std::vector<Tensor*> SigmaLstmParams::tensors() {
    return {&w_f, &w_i, &w_c, &b_f, &b_i, &b_c, &w_o_raw, &w_h};
}

std::vector<const Tensor*> SigmaLstmParams::tensors() const {
    return {&w_f, &w_i, &w_c, &b_f, &b_i, &b_c, &w_o_raw, &w_h};
}

SigmaLstmState SigmaLstmState::zero(std::size_t hidden) {
    return {std::vector<double>(hidden, 0.0), std::vector<double>(hidden, 0.0)};
}

NoiseSequence make_noise(std::uint64_t seed, std::size_t steps, std::size_t hidden) {
    NoiseSequence noise{seed, steps, hidden, std::vector<double>(steps * hidden)};
    SplitMix64 rng(seed);
    for (double& v : noise.eps) v = rng.next_normal();
    return noise;
}

NoiseSequence zero_noise(std::size_t steps, std::size_t hidden) {
    return {0, steps, hidden, std::vector<double>(steps * hidden, 0.0)};
}

SigmaLstmParams init_sigma_lstm(int hidden, std::uint64_t seed) {
    if (hidden < 1) throw std::invalid_argument("init_sigma_lstm: hidden width must be >= 1");
    const auto h = static_cast<std::size_t>(hidden);
    const double bound = 1.0 / std::sqrt(static_cast<double>(h + 1));

    SplitMix64 rng(seed);
    SigmaLstmParams p;
    p.hidden = h;
    p.seed = seed;
    p.w_f = uniform_matrix(rng, h, h + 1, bound);
    p.w_i = uniform_matrix(rng, h, h + 1, bound);
    p.w_c = uniform_matrix(rng, h, h + 1, bound);
    p.b_f = Tensor::vector(std::vector<double>(h, 1.0));  // forget-gate bias trick
    p.b_i = Tensor::zeros({h});
    p.b_c = Tensor::zeros({h});
    // softplus(w_o_raw) == 0.1/H exactly at initialization
    const double raw = std::log(std::expm1(0.1 / static_cast<double>(h)));
    p.w_o_raw = Tensor::matrix(h, h, std::vector<double>(h * h, raw));
    p.w_h = uniform_vector(rng, h, bound);
    return p;
}

// The numeric path mirrors the graph ops (same kernels, same accumulation
// order) so a tape replay and this function agree bit for bit.
StepOutput sigma_lstm_step(const SigmaLstmParams& p, const SigmaLstmState& s, double x,
                           std::span<const double> eps_t) {
    const std::size_t h = p.hidden;
    if (s.h.size() != h || s.c.size() != h || eps_t.size() != h)
        throw std::invalid_argument("sigma_lstm_step: state/noise width mismatch");
    if (!std::isfinite(x)) throw numeric_error("sigma_lstm_step: non-finite input");
    require_finite(s.h, "state h");
    require_finite(s.c, "state c");
    require_finite(eps_t, "noise");

    std::vector<double> hx(h + 1);
    for (std::size_t j = 0; j < h; ++j) hx[j] = s.h[j];
    hx[h] = x;

    auto gate_preact = [&](const Tensor& w, const Tensor& b, std::size_t row) {
        double acc = 0.0;
        for (std::size_t ccol = 0; ccol < h + 1; ++ccol) acc += w.data()[row * (h + 1) + ccol] * hx[ccol];
        return acc + b[row];
    };

    StepOutput out;
    out.next.h.resize(h);
    out.next.c.resize(h);
    out.gate.resize(h);

    std::vector<double> c_sq(h);
    for (std::size_t j = 0; j < h; ++j) {
        double f = diff::logistic_value(gate_preact(p.w_f, p.b_f, j));
        double i = diff::logistic_value(gate_preact(p.w_i, p.b_i, j));
        double c_tilde = std::tanh(gate_preact(p.w_c, p.b_c, j));
        out.next.c[j] = f * s.c[j] + i * c_tilde;
        c_sq[j] = out.next.c[j] * out.next.c[j];
    }
    for (std::size_t j = 0; j < h; ++j) {
        double v = 0.0;
        for (std::size_t k = 0; k < h; ++k)
            v += diff::softplus_value(p.w_o_raw.data()[j * h + k]) * c_sq[k];
        v += kVarianceFloor;
        out.gate[j] = std::sqrt(v) * eps_t[j];
        out.next.h[j] = out.gate[j] * std::tanh(out.next.c[j]);
    }

    double r_hat = 0.0;
    for (std::size_t j = 0; j < h; ++j) r_hat += p.w_h[j] * out.next.h[j];
    out.r_hat = r_hat;

    double c_mean = 0.0;
    for (std::size_t j = 0; j < h; ++j) c_mean += out.next.c[j];
    c_mean /= static_cast<double>(h);
    double c_mean_sq = c_mean * c_mean;
    out.sigma2 = c_mean_sq > kVarianceFloor ? c_mean_sq : kVarianceFloor;
    return out;
}

SigmaLstmForward sigma_lstm_forward(const SigmaLstmParams& p, std::span<const double> returns,
                                    const NoiseSequence& noise) {
    if (returns.empty()) throw std::invalid_argument("sigma_lstm_forward: empty sequence");
    if (noise.steps != returns.size() || noise.hidden != p.hidden)
        throw std::invalid_argument("sigma_lstm_forward: noise shape " +
                                    std::to_string(noise.steps) + "x" +
                                    std::to_string(noise.hidden) + " does not match sequence");

    SigmaLstmForward out;
    out.sigma2.resize(returns.size());
    out.r_hat.resize(returns.size());
    SigmaLstmState state = SigmaLstmState::zero(p.hidden);
    double loglik = 0.0;
    for (std::size_t t = 0; t < returns.size(); ++t) {
        StepOutput step = sigma_lstm_step(p, state, returns[t], noise.row(t));
        out.sigma2[t] = step.sigma2;
        out.r_hat[t] = step.r_hat;
        loglik += -(std::log(step.sigma2) + (returns[t] * returns[t]) * (1.0 / step.sigma2));
        state = std::move(step.next);
    }
    out.loglik = loglik;
    return out;
}

SigmaLstmGraph build_sigma_lstm_graph(std::size_t hidden, std::size_t steps) {
    if (hidden < 1 || steps < 1)
        throw std::invalid_argument("build_sigma_lstm_graph: hidden and steps must be >= 1");
    SigmaLstmGraph g;
    g.hidden = hidden;
    g.steps = steps;
    diff::Graph& graph = g.graph;

    g.w_f = graph.leaf({hidden, hidden + 1}, "w_f");
    g.w_i = graph.leaf({hidden, hidden + 1}, "w_i");
    g.w_c = graph.leaf({hidden, hidden + 1}, "w_c");
    g.b_f = graph.leaf({hidden}, "b_f");
    g.b_i = graph.leaf({hidden}, "b_i");
    g.b_c = graph.leaf({hidden}, "b_c");
    g.w_o_raw = graph.leaf({hidden, hidden}, "w_o_raw");
    g.w_h = graph.leaf({hidden}, "w_h");
    g.h0 = graph.leaf({hidden}, "h0");
    g.c0 = graph.leaf({hidden}, "c0");

    diff::NodeId w_o_pos = graph.softplus(g.w_o_raw, "softplus(w_o_raw)");

    diff::NodeId h_prev = g.h0;
    diff::NodeId c_prev = g.c0;
    diff::NodeId loglik_sum = 0;
    for (std::size_t t = 0; t < steps; ++t) {
        const std::string st = std::to_string(t);
        diff::NodeId x_t = graph.leaf({}, "x" + st);
        diff::NodeId eps_t = graph.leaf({hidden}, "eps" + st);
        g.x.push_back(x_t);
        g.eps.push_back(eps_t);

        diff::NodeId hx = graph.concat(h_prev, x_t);
        diff::NodeId f = graph.sigmoid(graph.add(graph.matvec(g.w_f, hx), g.b_f), "f" + st);
        diff::NodeId i = graph.sigmoid(graph.add(graph.matvec(g.w_i, hx), g.b_i), "i" + st);
        diff::NodeId c_tilde = graph.tanh(graph.add(graph.matvec(g.w_c, hx), g.b_c), "c~" + st);
        diff::NodeId c = graph.add(graph.mul(f, c_prev), graph.mul(i, c_tilde), "c" + st);

        diff::NodeId variance =
            graph.affine(graph.matvec(w_o_pos, graph.square(c)), 1.0, kVarianceFloor, "v" + st);
        diff::NodeId gate = graph.mul(graph.sqrt(variance), eps_t, "o" + st);
        diff::NodeId h = graph.mul(gate, graph.tanh(c), "h" + st);
        g.r_hat.push_back(graph.dot(g.w_h, h, "r_hat" + st));

        diff::NodeId sigma2 =
            graph.floor_at(graph.square(graph.mean(c)), kVarianceFloor, "sigma2_" + st);
        g.sigma2.push_back(sigma2);

        diff::NodeId ratio = graph.mul(graph.square(x_t), graph.reciprocal(sigma2));
        diff::NodeId term =
            graph.affine(graph.add(graph.log(sigma2), ratio), -1.0, 0.0, "ll" + st);
        loglik_sum = t == 0 ? term : graph.add(loglik_sum, term);

        h_prev = h;
        c_prev = c;
    }
    g.loglik_sum = loglik_sum;
    g.mean_objective =
        graph.affine(loglik_sum, 1.0 / static_cast<double>(steps), 0.0, "mean_objective");
    return g;
}

std::vector<diff::NodeId> SigmaLstmGraph::param_nodes() const {
    return {w_f, w_i, w_c, b_f, b_i, b_c, w_o_raw, w_h};
}

void bind_params(diff::Runner& runner, const SigmaLstmGraph& g, const SigmaLstmParams& p) {
    if (p.hidden != g.hidden)
        throw std::invalid_argument("bind_params: hidden width mismatch");
    runner.bind(g.w_f, p.w_f);
    runner.bind(g.w_i, p.w_i);
    runner.bind(g.w_c, p.w_c);
    runner.bind(g.b_f, p.b_f);
    runner.bind(g.b_i, p.b_i);
    runner.bind(g.b_c, p.b_c);
    runner.bind(g.w_o_raw, p.w_o_raw);
    runner.bind(g.w_h, p.w_h);
}

void bind_sequence(diff::Runner& runner, const SigmaLstmGraph& g, std::span<const double> returns,
                   const NoiseSequence& noise) {
    if (returns.size() != g.steps || noise.steps != g.steps || noise.hidden != g.hidden)
        throw std::invalid_argument("bind_sequence: sequence shape mismatch");
    runner.bind(g.h0, Tensor::zeros({g.hidden}));
    runner.bind(g.c0, Tensor::zeros({g.hidden}));
    for (std::size_t t = 0; t < g.steps; ++t) {
        runner.bind(g.x[t], Tensor::scalar(returns[t]));
        std::span<const double> row = noise.row(t);
        runner.bind(g.eps[t], Tensor::vector({row.begin(), row.end()}));
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

std::string sigma_lstm_to_json(const SigmaLstmParams& p) {
    nlohmann::json j;
    j["kind"] = "sigma-lstm";
    j["hidden"] = p.hidden;
    j["seed"] = p.seed;
    j["w_f"] = tensor_to_json(p.w_f);
    j["w_i"] = tensor_to_json(p.w_i);
    j["w_c"] = tensor_to_json(p.w_c);
    j["b_f"] = tensor_to_json(p.b_f);
    j["b_i"] = tensor_to_json(p.b_i);
    j["b_c"] = tensor_to_json(p.b_c);
    j["w_o_raw"] = tensor_to_json(p.w_o_raw);
    j["w_h"] = tensor_to_json(p.w_h);
    return j.dump(2) + "\n";
}

SigmaLstmParams sigma_lstm_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.at("kind") != "sigma-lstm")
        throw data_error("sigma_lstm_from_json: kind is not sigma-lstm");
    SigmaLstmParams p;
    p.hidden = j.at("hidden").get<std::size_t>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.w_f = tensor_from_json(j.at("w_f"));
    p.w_i = tensor_from_json(j.at("w_i"));
    p.w_c = tensor_from_json(j.at("w_c"));
    p.b_f = tensor_from_json(j.at("b_f"));
    p.b_i = tensor_from_json(j.at("b_i"));
    p.b_c = tensor_from_json(j.at("b_c"));
    p.w_o_raw = tensor_from_json(j.at("w_o_raw"));
    p.w_h = tensor_from_json(j.at("w_h"));
    return p;
}

}  // namespace volcast::cells
