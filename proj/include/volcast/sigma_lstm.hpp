#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "volcast/graph.hpp"
#include "volcast/tensor.hpp"

namespace volcast::cells {

/// Floor applied to every variance this cell reports: the likelihood takes
/// ln(sigma^2), and the squared mean of the cell state is exactly zero at
/// a zero state.
inline constexpr double kVarianceFloor = 1e-8;

/// Weights of the stochastic-output-gate cell. Gate matrices act on the
/// concatenated [h_{t-1}, x_t]; the output-gate variance map is
/// softplus(w_o_raw), elementwise positive, applied to the squared cell
/// state so the sampled gate has a valid variance.
struct SigmaLstmParams {
    std::size_t hidden = 0;
    std::uint64_t seed = 0;
    diff::Tensor w_f, w_i, w_c;  // hidden x (hidden+1)
    diff::Tensor b_f, b_i, b_c;  // hidden
    diff::Tensor w_o_raw;        // hidden x hidden (unconstrained)
    diff::Tensor w_h;            // hidden (return head)

    std::vector<diff::Tensor*> tensors();
    std::vector<const diff::Tensor*> tensors() const;
};

struct SigmaLstmState {
    std::vector<double> h;  // short-term memory
    std::vector<double> c;  // long-term volatility memory

    static SigmaLstmState zero(std::size_t hidden);
};

struct StepOutput {
    double r_hat = 0.0;
    double sigma2 = 0.0;             // max(mean(c)^2, floor)
    std::vector<double> gate;        // sampled output gate o_t
    SigmaLstmState next;
};

/// Reproducible standard-normal draws for the reparameterized gate,
/// one hidden-width row per step.
struct NoiseSequence {
    std::uint64_t seed = 0;
    std::size_t steps = 0;
    std::size_t hidden = 0;
    std::vector<double> eps;  // steps x hidden, row-major

    std::span<const double> row(std::size_t t) const {
        return {eps.data() + t * hidden, hidden};
    }
};

NoiseSequence make_noise(std::uint64_t seed, std::size_t steps, std::size_t hidden);
NoiseSequence zero_noise(std::size_t steps, std::size_t hidden);

/// Gate weights ~ uniform(-s, s) with s = 1/sqrt(hidden+1); forget bias
/// starts at +1; w_o_raw starts at softplus^{-1}(0.1/hidden).
SigmaLstmParams init_sigma_lstm(int hidden, std::uint64_t seed);

StepOutput sigma_lstm_step(const SigmaLstmParams& p, const SigmaLstmState& s, double x,
                           std::span<const double> eps_t);

struct SigmaLstmForward {
    std::vector<double> sigma2;
    std::vector<double> r_hat;
    double loglik = 0.0;  // Sum_t [ -ln sigma2_t - r_t^2 / sigma2_t ], to be maximized
};

/// Runs the cell over the return sequence from a zero state; sigma2[t] is
/// the in-sample (filtering) estimate aligned with r[t].
SigmaLstmForward sigma_lstm_forward(const SigmaLstmParams& p, std::span<const double> returns,
                                    const NoiseSequence& noise);

/// Unrolled training graph: rebind the parameter/sequence leaves on a
/// Runner and re-run forward/backward instead of rebuilding per window.
struct SigmaLstmGraph {
    diff::Graph graph;
    std::size_t hidden = 0;
    std::size_t steps = 0;
    diff::NodeId w_f, w_i, w_c, b_f, b_i, b_c, w_o_raw, w_h;
    diff::NodeId h0, c0;
    std::vector<diff::NodeId> x;       // scalar return leaf per step
    std::vector<diff::NodeId> eps;     // noise vector leaf per step
    std::vector<diff::NodeId> sigma2;  // variance estimate per step
    std::vector<diff::NodeId> r_hat;
    diff::NodeId loglik_sum;       // Sum_t of likelihood terms
    diff::NodeId mean_objective;   // loglik_sum / steps

    std::vector<diff::NodeId> param_nodes() const;
};

SigmaLstmGraph build_sigma_lstm_graph(std::size_t hidden, std::size_t steps);
void bind_params(diff::Runner& runner, const SigmaLstmGraph& g, const SigmaLstmParams& p);
void bind_sequence(diff::Runner& runner, const SigmaLstmGraph& g, std::span<const double> returns,
                   const NoiseSequence& noise);

/// JSON round trip (shapes, seed and raw weight values; bit-exact).
std::string sigma_lstm_to_json(const SigmaLstmParams& p);
SigmaLstmParams sigma_lstm_from_json(const std::string& text);

}  // namespace volcast::cells
