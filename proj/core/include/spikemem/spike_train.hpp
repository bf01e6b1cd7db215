#pragma once

#include <cstddef>
#include <vector>

namespace spikemem {

/// One neuron's periodic firing times: sorted, in [0, period), with every
/// circular gap (including the wrap across the period seam) >= tau0.
struct SpikeTrain {
    double period = 0.0;
    std::vector<double> times;

    std::size_t count() const { return times.size(); }
    bool empty() const { return times.empty(); }
};

/// Smallest circular gap of a sorted train; +inf for empty trains and
/// `period` for single-spike trains.
double min_circular_gap(const SpikeTrain& train);

/// Throws InvariantError unless the train is sorted in [0, period) with all
/// circular gaps >= tau0 (up to slack for roundoff) and count < period/tau0.
void validate_train(const SpikeTrain& train, double tau0, double slack = 1e-12);

/// Per-neuron prescribed periodic trains sharing one period.
struct SpikeScore {
    double tau0 = 1.0;
    double period = 0.0;
    std::vector<SpikeTrain> trains;

    std::size_t size() const { return trains.size(); }
    std::size_t total_spikes() const;
};

void validate_score(const SpikeScore& score, double slack = 1e-12);

} // namespace spikemem
