#include "volcast/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace volcast::opt {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, double initial_step, std::size_t max_iter,
                             double ftol) {
    const std::size_t n = x0.size();
    const double f0 = f(x0);

    std::vector<std::vector<double>> simplex(n + 1, x0);
    std::vector<double> fx(n + 1);
    fx[0] = f0;
    for (std::size_t i = 0; i < n; ++i) {
        simplex[i + 1][i] += initial_step;
        fx[i + 1] = f(simplex[i + 1]);
    }
    std::size_t evals = n + 1;

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);

    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        // stable sort keeps vertex handling deterministic on ties
        std::stable_sort(order.begin(), order.end(),
                         [&fx](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
        std::size_t best = order[0], worst = order[n], second_worst = order[n - 1];

        if (std::abs(fx[worst] - fx[best]) <= ftol * (1.0 + std::abs(fx[best]))) break;

        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i <= n; ++i)
                if (i != worst) acc += simplex[i][j];
            centroid[j] = acc / static_cast<double>(n);
        }

        for (std::size_t j = 0; j < n; ++j) xr[j] = centroid[j] + (centroid[j] - simplex[worst][j]);
        double fr = f(xr);
        ++evals;

        if (fr < fx[best]) {
            for (std::size_t j = 0; j < n; ++j)
                xe[j] = centroid[j] + 2.0 * (centroid[j] - simplex[worst][j]);
            double fe = f(xe);
            ++evals;
            if (fe < fr) {
                simplex[worst] = xe;
                fx[worst] = fe;
            } else {
                simplex[worst] = xr;
                fx[worst] = fr;
            }
        } else if (fr < fx[second_worst]) {
            simplex[worst] = xr;
            fx[worst] = fr;
        } else {
            for (std::size_t j = 0; j < n; ++j)
                xc[j] = centroid[j] + 0.5 * (simplex[worst][j] - centroid[j]);
            double fc = f(xc);
            ++evals;
            if (fc < fx[worst]) {
                simplex[worst] = xc;
                fx[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t j = 0; j < n; ++j)
                        simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
                    fx[i] = f(simplex[i]);
                    ++evals;
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fx[i] < fx[best]) best = i;

    NelderMeadResult result;
    result.x = simplex[best];
    result.fx = fx[best];
    result.evals = evals;
    result.improved = fx[best] < f0;
    return result;
}

}  // namespace volcast::opt
