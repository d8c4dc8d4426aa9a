#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace volcast::opt {

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    std::size_t evals = 0;
    bool improved = false;  // fx strictly below f(x0)
};

/// Downhill simplex minimizer (reflection 1, expansion 2, contraction 0.5,
/// shrink 0.5). Fully deterministic: fixed initial simplex, fixed
/// tie-breaking, no randomness.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, double initial_step = 0.25,
                             std::size_t max_iter = 2000, double ftol = 1e-12);

}  // namespace volcast::opt
