#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "volcast/graph.hpp"
#include "volcast/tensor.hpp"

namespace volcast::cells {

/// Standard LSTM with a deterministic sigmoid output gate and a linear
/// scalar head; the baseline the stochastic cell is measured against.
struct VanillaLstmParams {
    std::size_t hidden = 0;
    std::uint64_t seed = 0;
    diff::Tensor w_f, w_i, w_c, w_o;  // hidden x (hidden+1)
    diff::Tensor b_f, b_i, b_c, b_o;  // hidden
    diff::Tensor w_y;                 // hidden (head weights)
    diff::Tensor b_y;                 // scalar head bias

    std::vector<diff::Tensor*> tensors();
    std::vector<const diff::Tensor*> tensors() const;
};

VanillaLstmParams init_vanilla_lstm(int hidden, std::uint64_t seed);

struct VanillaLstmForward {
    std::vector<double> predictions;
    double mse = 0.0;
};

/// Runs the cell over x from a zero state; prediction at step t is the
/// linear head on h_t, scored against targets[t] by mean squared error.
VanillaLstmForward vanilla_lstm_forward(const VanillaLstmParams& p, std::span<const double> x,
                                        std::span<const double> targets);

/// Advances one step and returns the head output (used by the rolling
/// forecaster, which feeds observations incrementally).
struct VanillaState {
    std::vector<double> h;
    std::vector<double> c;
    static VanillaState zero(std::size_t hidden);
};
double vanilla_lstm_step(const VanillaLstmParams& p, VanillaState& state, double x);

struct VanillaLstmGraph {
    diff::Graph graph;
    std::size_t hidden = 0;
    std::size_t steps = 0;
    diff::NodeId w_f, w_i, w_c, w_o, b_f, b_i, b_c, b_o, w_y, b_y;
    diff::NodeId h0, c0;
    std::vector<diff::NodeId> x;
    std::vector<diff::NodeId> target;
    std::vector<diff::NodeId> prediction;
    diff::NodeId mse;

    std::vector<diff::NodeId> param_nodes() const;
};

VanillaLstmGraph build_vanilla_lstm_graph(std::size_t hidden, std::size_t steps);
void bind_params(diff::Runner& runner, const VanillaLstmGraph& g, const VanillaLstmParams& p);
void bind_sequence(diff::Runner& runner, const VanillaLstmGraph& g, std::span<const double> x,
                   std::span<const double> targets);

std::string vanilla_lstm_to_json(const VanillaLstmParams& p);
VanillaLstmParams vanilla_lstm_from_json(const std::string& text);

}  // namespace volcast::cells
