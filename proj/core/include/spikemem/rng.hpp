#pragma once

#include <cstdint>
#include <random>

namespace spikemem {

/// Quantile (inverse CDF) of the standard normal. Wichura's AS241 rational
/// approximation, |error| < 1e-15 over (0,1).
double normal_quantile(double p);

/// Standard normal CDF.
double normal_cdf(double x);

/// Seedable random stream threaded explicitly through every sampling
/// operation. All draws are derived from uniforms via inversion, so a given
/// seed reproduces bit-identical sequences for a given binary.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t index(std::uint64_t n) {
        // Rejection-free modulo bias is irrelevant at our n << 2^64, but use
        // Lemire's multiply-shift anyway; it is cheap and exact enough.
        return static_cast<std::uint64_t>(
            (static_cast<__uint128_t>(engine_()) * n) >> 64);
    }

    double normal(double mu, double sigma) {
        return mu + sigma * normal_quantile(positive_uniform());
    }

    /// Normal(mu, sigma) truncated to the open interval (lo, hi) by CDF
    /// inversion. Requires lo < hi; sigma = 0 returns mu clamped into [lo,hi].
    double truncated_normal(double mu, double sigma, double lo, double hi);

    std::uint64_t raw() { return engine_(); }

    /// Independent substream for task `stream_id` of a master seed
    /// (splitmix64 mixing, so neighboring ids decorrelate).
    static RandomStream derive(std::uint64_t seed, std::uint64_t stream_id);

private:
    double positive_uniform() {
        double u = uniform();
        while (u <= 0.0)
            u = uniform();
        return u;
    }

    std::mt19937_64 engine_;
};

} // namespace spikemem
