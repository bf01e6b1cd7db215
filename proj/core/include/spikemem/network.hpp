#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "spikemem/rng.hpp"

namespace spikemem {

struct Synapse {
    std::uint32_t source = 0; // index of the presynaptic neuron
    double delay = 0.0;       // axonal delay, in [d_min, d_max]
    double weight = 0.0;
};

struct Neuron {
    std::vector<Synapse> synapses; // exactly K entries
};

/// Recurrent network with homogeneous parameters: every neuron has K inputs
/// drawn uniformly from the L neurons (self- and parallel connections
/// allowed), one kernel time constant beta, one nominal threshold theta0 and
/// one refractory period tau0. Weights start at zero and are filled in by
/// synthesis.
struct Network {
    std::vector<Neuron> neurons;
    double beta = 1.0;
    double theta0 = 1.0;
    double tau0 = 1.0;
    double d_min = 0.0;
    double d_max = 0.0;
    double sigma_theta = 0.0; // default threshold-noise level; SimConfig may override

    std::size_t size() const { return neurons.size(); }
    std::size_t inputs_per_neuron() const {
        return neurons.empty() ? 0 : neurons.front().synapses.size();
    }
};

void validate_network(const Network& net);

Network build_random_network(std::size_t num_neurons, std::size_t num_inputs,
                             double d_min, double d_max, double beta,
                             double theta0, double tau0, RandomStream& rng);

} // namespace spikemem
