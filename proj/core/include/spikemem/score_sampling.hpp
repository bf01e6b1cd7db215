#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "spikemem/rng.hpp"
#include "spikemem/spike_train.hpp"

namespace spikemem {

/// Distribution of the spike count per period for a periodic Poisson process
/// with dead time tau0 after every spike:
///   P(N = n) = gamma (lambda (T - n tau0))^{n-1} / n!   for 0 <= n < T/tau0.
struct CountPMF {
    double lambda = 0.0;
    double period = 0.0;
    double tau0 = 1.0;
    std::vector<double> p; // p[n], normalized
    double log_gamma = 0.0; // log of the normalizing scale

    double expected_count() const;
};

CountPMF count_pmf(double lambda, double period, double tau0);

/// Draws one periodic train: count from the PMF, first spike uniform on
/// [0, T), remaining spikes via sorted uniforms on [0, T - n tau0] plus the
/// dead-time offsets, wrapped into [0, T).
SpikeTrain sample_spike_train(const CountPMF& pmf, RandomStream& rng);

/// L independent trains sharing the PMF's period.
SpikeScore sample_score(std::size_t num_neurons, const CountPMF& pmf,
                        RandomStream& rng);

/// Constraints on the first/last spike of a jittered train (the g0 / g_{n-1}
/// factors): `periodic` ties them across the period seam; `min_first` /
/// `max_last` bound them absolutely (times may lie outside [0, T) when the
/// caller works in an unwrapped frame).
struct JitterBoundary {
    bool periodic = true;
    std::optional<double> min_first;
    std::optional<double> max_last;

    static JitterBoundary free_ends() { return {false, {}, {}}; }
};

/// Gibbs sampler over spike positions: `sweeps` rounds of even-index then
/// odd-index updates, each a Gaussian centered on the *nominal* time with
/// std sigma_s, truncated to keep both neighbor gaps > tau0. Preserves the
/// spike count; sigma_s = 0 returns the input.
SpikeTrain jitter_train(const SpikeTrain& train, double tau0, double sigma_s,
                        int sweeps, RandomStream& rng,
                        const JitterBoundary& boundary = JitterBoundary{});

/// Same chain in an unwrapped frame: returns jittered times of a train whose
/// nominal spikes are `nominal` (strictly increasing, gaps >= tau0), without
/// wrapping. Used by the simulator for per-phase forced emissions.
std::vector<double> jitter_times(const std::vector<double>& nominal,
                                 double tau0, double sigma_s, int sweeps,
                                 RandomStream& rng,
                                 const JitterBoundary& boundary);

} // namespace spikemem
