#include "volcast/train.hpp"

#include <cmath>

#include "volcast/errors.hpp"

namespace volcast::harness {

Adam::Adam(std::size_t n_params, double beta1, double beta2, double epsilon)
    : beta1_(beta1), beta2_(beta2), epsilon_(epsilon), m_(n_params, 0.0), v_(n_params, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grads, double lr) {
    if (params.size() != m_.size() || grads.size() != m_.size())
        throw std::invalid_argument("adam: parameter count mismatch");
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i] * grads[i];
        params[i] -= lr * (m_[i] / bc1) / (std::sqrt(v_[i] / bc2) + epsilon_);
    }
}

namespace {

// Gathers node gradients into one flat vector (clipped in place) and
// scatters parameter updates back, so Adam sees a single view.
struct FlatParams {
    std::vector<diff::Tensor*> tensors;
    std::size_t total = 0;

    explicit FlatParams(std::vector<diff::Tensor*> ts) : tensors(std::move(ts)) {
        for (diff::Tensor* t : tensors) total += t->size();
    }
    void to_flat(std::span<double> out) const {
        std::size_t k = 0;
        for (const diff::Tensor* t : tensors)
            for (std::size_t i = 0; i < t->size(); ++i) out[k++] = t->data()[i];
    }
    void from_flat(std::span<const double> in) {
        std::size_t k = 0;
        for (diff::Tensor* t : tensors)
            for (std::size_t i = 0; i < t->size(); ++i) t->data()[i] = in[k++];
    }
};

void clip_global_norm(std::span<double> grads, double max_norm) {
    double norm_sq = 0.0;
    for (double g : grads) norm_sq += g * g;
    double norm = std::sqrt(norm_sq);
    if (norm > max_norm && norm > 0.0) {
        double scale = max_norm / norm;
        for (double& g : grads) g *= scale;
    }
}

// Per-epoch, per-window noise seeds; the multiplier keeps (epoch, window)
// pairs collision-free for any realistic window count.
std::uint64_t derive_noise_seed(std::uint64_t base, std::size_t epoch, std::size_t window_index) {
    return base + 0x100000ULL + epoch * 1000003ULL + window_index;
}

}  // namespace

SigmaLstmTraining train_sigma_lstm(const TrainConfig& cfg, std::span<const double> returns) {
    if (cfg.window < 1) throw std::invalid_argument("train_sigma_lstm: window must be >= 1");
    if (returns.size() < cfg.window)
        throw std::invalid_argument("train_sigma_lstm: series shorter than one window (" +
                                    std::to_string(returns.size()) + " < " +
                                    std::to_string(cfg.window) + ")");

    SigmaLstmTraining out;
    out.params = cells::init_sigma_lstm(cfg.hidden, cfg.seed);
    if (cfg.epochs == 0) return out;

    const std::size_t n_windows = returns.size() / cfg.window;
    cells::SigmaLstmGraph graph = build_sigma_lstm_graph(out.params.hidden, cfg.window);
    diff::Runner runner(graph.graph);

    FlatParams flat(out.params.tensors());
    Adam adam(flat.total);
    std::vector<double> theta(flat.total), grad(flat.total);
    const std::vector<diff::NodeId> param_nodes = graph.param_nodes();

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        double epoch_objective = 0.0;
        for (std::size_t w = 0; w < n_windows; ++w) {
            std::span<const double> window = returns.subspan(w * cfg.window, cfg.window);
            cells::NoiseSequence noise = cells::make_noise(
                derive_noise_seed(cfg.seed, epoch, w), cfg.window, out.params.hidden);

            bind_params(runner, graph, out.params);
            bind_sequence(runner, graph, window, noise);
            runner.forward();
            double objective = runner.value(graph.mean_objective).item();
            if (!std::isfinite(objective))
                throw numeric_error("train_sigma_lstm: objective diverged at epoch " +
                                    std::to_string(epoch));
            epoch_objective += objective;

            runner.backward(graph.mean_objective);
            std::size_t k = 0;
            for (diff::NodeId node : param_nodes) {
                const diff::Tensor& g = runner.grad(node);
                // ascent on the objective = descent on its negation
                for (std::size_t i = 0; i < g.size(); ++i) grad[k++] = -g[i];
            }
            clip_global_norm(grad, cfg.grad_clip);
            flat.to_flat(theta);
            adam.step(theta, grad, cfg.learning_rate);
            flat.from_flat(theta);
        }
        out.objective_history.push_back(epoch_objective / static_cast<double>(n_windows));
    }
    return out;
}

VanillaLstmTraining train_vanilla_lstm(const TrainConfig& cfg, std::span<const double> inputs,
                                       std::span<const double> targets) {
    if (inputs.size() != targets.size())
        throw std::invalid_argument("train_vanilla_lstm: input/target length mismatch");
    if (cfg.window < 1) throw std::invalid_argument("train_vanilla_lstm: window must be >= 1");
    if (inputs.size() < cfg.window)
        throw std::invalid_argument("train_vanilla_lstm: series shorter than one window");

    VanillaLstmTraining out;
    out.params = cells::init_vanilla_lstm(cfg.hidden, cfg.seed);
    if (cfg.epochs == 0) return out;

    const std::size_t n_windows = inputs.size() / cfg.window;
    cells::VanillaLstmGraph graph = build_vanilla_lstm_graph(out.params.hidden, cfg.window);
    diff::Runner runner(graph.graph);

    FlatParams flat(out.params.tensors());
    Adam adam(flat.total);
    std::vector<double> theta(flat.total), grad(flat.total);
    const std::vector<diff::NodeId> param_nodes = graph.param_nodes();

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        double epoch_mse = 0.0;
        for (std::size_t w = 0; w < n_windows; ++w) {
            bind_params(runner, graph, out.params);
            bind_sequence(runner, graph, inputs.subspan(w * cfg.window, cfg.window),
                          targets.subspan(w * cfg.window, cfg.window));
            runner.forward();
            double mse = runner.value(graph.mse).item();
            if (!std::isfinite(mse))
                throw numeric_error("train_vanilla_lstm: loss diverged at epoch " +
                                    std::to_string(epoch));
            epoch_mse += mse;

            runner.backward(graph.mse);
            std::size_t k = 0;
            for (diff::NodeId node : param_nodes) {
                const diff::Tensor& g = runner.grad(node);
                for (std::size_t i = 0; i < g.size(); ++i) grad[k++] = g[i];
            }
            clip_global_norm(grad, cfg.grad_clip);
            flat.to_flat(theta);
            adam.step(theta, grad, cfg.learning_rate);
            flat.from_flat(theta);
        }
        out.mse_history.push_back(epoch_mse / static_cast<double>(n_windows));
    }
    return out;
}

}  // namespace volcast::harness
