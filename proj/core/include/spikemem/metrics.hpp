#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spikemem/simulator.hpp"
#include "spikemem/spike_train.hpp"

namespace spikemem {

/// Triangular matching kernel: 1 - 2|t|/tau0 on |t| <= tau0/2, else 0.
/// Covers at most one prescribed spike since spikes are >= tau0 apart.
double triangular_kernel(double t, double tau0);

/// Realized firings of one measurement window [t0, t0 + T + c), where the
/// per-neuron border adjustment c is the largest of {-tau0, 0, +tau0} that
/// keeps all pairwise circular distances (mod T) above tau0.
struct WindowedFirings {
    double t0 = 0.0;
    double period = 0.0;
    std::vector<std::vector<double>> times;
    std::vector<double> border_adjust;
};

WindowedFirings window_firings(const std::vector<std::vector<double>>& firings,
                               double t0, double period, double tau0);

/// Best cyclic alignment tau in [0, T): argmax of the summed kernel match
/// between windowed firings and the prescribed score over `subset`. The
/// objective is piecewise linear in tau; the maximum is taken exactly over
/// the breakpoint candidates (apexes and triangle edges), ties to smallest.
double best_alignment(const WindowedFirings& window, const SpikeScore& score,
                      std::span<const std::uint32_t> subset);

struct AccuracyReport {
    double precision = 0.0;
    double recall = 0.0;
    double tau_hat = 0.0;
    std::vector<std::uint32_t> neurons;      // evaluated subset
    std::vector<double> per_neuron_precision; // NaN where undefined
    std::vector<double> per_neuron_recall;
};

/// Precision and recall of the run against the score over one period
/// starting at t0, aligned by a shared tau-hat computed on `subset`.
/// Conventions: if every windowed set in the subset is empty, precision and
/// recall are zero; a neuron whose windowed set is empty contributes zero to
/// precision (unless its prescribed train is empty too, in which case it is
/// vacuous and excluded); neurons with empty prescribed trains are excluded
/// from the recall average.
AccuracyReport precision_recall(const SimRun& run, const SpikeScore& score,
                                double t0,
                                std::span<const std::uint32_t> subset);

AccuracyReport precision_recall(const SimRun& run, const SpikeScore& score,
                                double t0);

} // namespace spikemem
