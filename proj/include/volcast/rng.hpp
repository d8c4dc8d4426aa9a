#pragma once

#include <cstdint>

namespace volcast {

/// SplitMix64: state advances by the golden-gamma constant, output is the
/// finalizer mix. Chosen over std:: engines because the full stream is
/// integer-exact and reproducible from the published constants in any
/// language. Uniforms take the top 53 bits.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in (0, 1): 53-bit mantissa, zero remapped to 2^-53.
    double next_uniform() {
        double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        return u > 0.0 ? u : 0x1.0p-53;
    }

    /// Standard normal via the inverse CDF (rational approximation below).
    double next_normal() { return normal_inverse_cdf(next_uniform()); }

    /// Acklam's rational approximation to the standard normal quantile,
    /// relative error below 1.2e-9 everywhere. Fixed coefficients keep the
    /// draw sequence identical across implementations.
    static double normal_inverse_cdf(double p);

private:
    std::uint64_t state_;
};

}  // namespace volcast
