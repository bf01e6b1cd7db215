#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spikemem/network.hpp"
#include "spikemem/spike_train.hpp"

namespace spikemem {

/// Firing times per neuron, indexed by neuron id. Times may lie anywhere on
/// the real axis; only spikes with t - d - s >= 0 contribute (causality).
using FiringHistory = std::vector<std::vector<double>>;

/// Membrane potential z_l(t) = sum_k w_k sum_s h(t - d_k - s) over the given
/// explicit history. Exact summation, no support truncation.
double potential(const Network& net, std::size_t neuron,
                 const FiringHistory& history, double t);

/// Time derivative of `potential`.
double potential_dot(const Network& net, std::size_t neuron,
                     const FiringHistory& history, double t);

/// Steady-state potential when every neuron fires its prescribed periodic
/// train forever (closed-form periodic pulse sums). `t` is interpreted
/// modulo the score period.
double potential_periodic(const Network& net, std::size_t neuron,
                          const SpikeScore& score, double t);

double potential_periodic_dot(const Network& net, std::size_t neuron,
                              const SpikeScore& score, double t);

/// Coefficient of synapse k in the steady-state potential (unit weight), and
/// its derivative: building blocks for the synthesis constraint rows.
double periodic_coefficient(const Network& net, std::size_t neuron,
                            std::size_t synapse, const SpikeScore& score,
                            double t);
double periodic_coefficient_dot(const Network& net, std::size_t neuron,
                                std::size_t synapse, const SpikeScore& score,
                                double t);

} // namespace spikemem
