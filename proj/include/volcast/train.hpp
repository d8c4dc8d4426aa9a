#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "volcast/sigma_lstm.hpp"
#include "volcast/vanilla_lstm.hpp"

namespace volcast::harness {

/// Adaptive-moment optimizer over a flat parameter view (decay 0.9/0.999,
/// bias-corrected, epsilon 1e-8).
class Adam {
public:
    explicit Adam(std::size_t n_params, double beta1 = 0.9, double beta2 = 0.999,
                  double epsilon = 1e-8);
    void step(std::span<double> params, std::span<const double> grads, double lr);

private:
    double beta1_, beta2_, epsilon_;
    std::vector<double> m_, v_;
    std::size_t t_ = 0;
};

struct TrainConfig {
    int hidden = 8;
    double learning_rate = 3e-3;
    std::size_t epochs = 50;
    std::size_t window = 22;   // BPTT truncation; sequences cut into
                               // non-overlapping stateless windows
    std::uint64_t seed = 1;
    double grad_clip = 5.0;    // global norm
};

struct SigmaLstmTraining {
    cells::SigmaLstmParams params;
    std::vector<double> objective_history;  // mean likelihood objective per epoch
};

/// Gradient ascent on the mean per-step likelihood objective. Fresh noise
/// is drawn every epoch and window from seeds derived off cfg.seed, so a
/// fixed seed reproduces the run exactly. Throws numeric_error naming the
/// epoch if the objective turns non-finite.
SigmaLstmTraining train_sigma_lstm(const TrainConfig& cfg, std::span<const double> returns);

struct VanillaLstmTraining {
    cells::VanillaLstmParams params;
    std::vector<double> mse_history;
};

/// Squared-error descent for the baseline cell on (input, next-target)
/// pairs, same windowing and clipping as the stochastic cell.
VanillaLstmTraining train_vanilla_lstm(const TrainConfig& cfg, std::span<const double> inputs,
                                       std::span<const double> targets);

}  // namespace volcast::harness
