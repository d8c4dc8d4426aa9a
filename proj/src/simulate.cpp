#include "volcast/simulate.hpp"

#include <cmath>
#include <limits>

#include "volcast/errors.hpp"
#include "volcast/rng.hpp"

namespace volcast::simgen {

SimPath simulate_garch11(const econo::GarchParams& p, std::size_t n, std::uint64_t seed,
                         std::size_t burn_in) {
    econo::validate_garch_params(econo::GarchVariant::garch11, p);
    if (n < 1) throw std::invalid_argument("simulate_garch11: n must be >= 1");

    SplitMix64 rng(seed);
    SimPath path;
    path.params = p;
    path.seed = seed;
    path.returns.resize(n);
    path.true_sigma2.resize(n);

    double sigma2 = p.unconditional_variance();
    double r = 0.0;
    const std::size_t total = burn_in + n;
    for (std::size_t t = 0; t < total; ++t) {
        if (t > 0) sigma2 = p.omega + p.alpha * (r * r) + p.beta * sigma2;
        r = std::sqrt(sigma2) * rng.next_normal();
        if (t >= burn_in) {
            path.true_sigma2[t - burn_in] = sigma2;
            path.returns[t - burn_in] = r;
        }
    }
    return path;
}

std::vector<double> simulate_rv_from_path(const SimPath& path, double noise_scale,
                                          std::uint64_t seed) {
    if (noise_scale < 0.0)
        throw std::invalid_argument("simulate_rv_from_path: noise scale must be >= 0");
    SplitMix64 rng(seed);
    std::vector<double> rv(path.true_sigma2.size());
    for (std::size_t t = 0; t < rv.size(); ++t) {
        double sigma = std::sqrt(path.true_sigma2[t]);
        rv[t] = noise_scale == 0.0 ? sigma : sigma * std::exp(noise_scale * rng.next_normal());
    }
    return rv;
}

rvpipe::RvSeries to_rv_series(const SimPath& path, const std::vector<double>& rv,
                              std::int64_t start_date) {
    if (rv.size() != path.returns.size())
        throw std::invalid_argument("to_rv_series: rv/returns length mismatch");
    rvpipe::RvSeries out;
    out.dates.resize(rv.size());
    out.rv = rv;
    out.ret = path.returns;
    if (!out.ret.empty()) out.ret[0] = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < rv.size(); ++i)
        out.dates[i] = start_date + static_cast<std::int64_t>(i);
    return out;
}

}  // namespace volcast::simgen
