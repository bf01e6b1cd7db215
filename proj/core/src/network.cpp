#include "spikemem/network.hpp"

#include "spikemem/errors.hpp"

namespace spikemem {

void validate_network(const Network& net) {
    if (net.neurons.empty())
        throw InvariantError("network: no neurons");
    if (!(net.beta > 0.0) || !(net.theta0 > 0.0) || !(net.tau0 > 0.0))
        throw InvariantError("network: beta, theta0, tau0 must be positive");
    if (!(net.d_min > 0.0) || !(net.d_min < net.d_max))
        throw InvariantError("network: need 0 < d_min < d_max");
    const std::size_t k = net.neurons.front().synapses.size();
    for (const auto& neuron : net.neurons) {
        if (neuron.synapses.size() != k)
            throw InvariantError("network: all neurons must have K synapses");
        for (const auto& syn : neuron.synapses) {
            if (syn.source >= net.neurons.size())
                throw InvariantError("network: synapse source out of range");
            if (syn.delay < net.d_min || syn.delay > net.d_max)
                throw InvariantError("network: delay outside [d_min, d_max]");
        }
    }
}

Network build_random_network(std::size_t num_neurons, std::size_t num_inputs,
                             double d_min, double d_max, double beta,
                             double theta0, double tau0, RandomStream& rng) {
    if (num_neurons < 1 || num_inputs < 1)
        throw ParameterError("build_random_network: need L, K >= 1");
    if (!(0.0 < d_min) || !(d_min < d_max))
        throw ParameterError("build_random_network: need 0 < d_min < d_max");
    if (!(beta > 0.0) || !(theta0 > 0.0) || !(tau0 > 0.0))
        throw ParameterError("build_random_network: beta, theta0, tau0 > 0");

    Network net;
    net.beta = beta;
    net.theta0 = theta0;
    net.tau0 = tau0;
    net.d_min = d_min;
    net.d_max = d_max;
    net.neurons.resize(num_neurons);
    for (auto& neuron : net.neurons) {
        neuron.synapses.resize(num_inputs);
        for (auto& syn : neuron.synapses) {
            syn.source = static_cast<std::uint32_t>(rng.index(num_neurons));
            syn.delay = rng.uniform(d_min, d_max);
            syn.weight = 0.0;
        }
    }
    return net;
}

} // namespace spikemem
