#pragma once

#include <cstdint>
#include <vector>

#include "volcast/garch.hpp"
#include "volcast/rv_pipeline.hpp"

namespace volcast::simgen {

struct SimPath {
    std::vector<double> returns;
    std::vector<double> true_sigma2;
    econo::GarchParams params;
    std::uint64_t seed = 0;
};

/// GARCH(1,1) sample path from the portable seeded generator. sigma2 starts
/// at the unconditional variance omega/(1-alpha-beta); burn_in steps are
/// generated and discarded before the n recorded ones.
SimPath simulate_garch11(const econo::GarchParams& p, std::size_t n, std::uint64_t seed,
                         std::size_t burn_in = 1000);

/// Noisy daily RV proxy: rv_t = sigma_t * exp(eta_t), eta ~ N(0, noise^2).
/// noise_scale = 0 returns the true sigma path exactly.
std::vector<double> simulate_rv_from_path(const SimPath& path, double noise_scale,
                                          std::uint64_t seed);

/// Packs a simulated path into the daily rv/ret schema with synthetic
/// consecutive dates starting at start_date (days since epoch).
rvpipe::RvSeries to_rv_series(const SimPath& path, const std::vector<double>& rv,
                              std::int64_t start_date = 10957);  // 2000-01-03

}  // namespace volcast::simgen
