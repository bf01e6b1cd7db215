#include "spikemem/potential.hpp"

#include <cmath>

#include "spikemem/errors.hpp"
#include "spikemem/kernel.hpp"

namespace spikemem {

namespace {

template <typename Kernel>
double accumulate(const Network& net, std::size_t neuron,
                  const FiringHistory& history, double t, Kernel k) {
    if (neuron >= net.size())
        throw ParameterError("potential: neuron index out of range");
    double z = 0.0;
    for (const auto& syn : net.neurons[neuron].synapses) {
        if (syn.weight == 0.0)
            continue;
        double acc = 0.0;
        for (double s : history[syn.source])
            acc += k(t - syn.delay - s, net.beta);
        z += syn.weight * acc;
    }
    return z;
}

template <typename PerKernel>
double accumulate_periodic(const Network& net, std::size_t neuron,
                           const SpikeScore& score, double t, PerKernel k) {
    if (neuron >= net.size())
        throw ParameterError("potential_periodic: neuron index out of range");
    const double T = score.period;
    double z = 0.0;
    for (const auto& syn : net.neurons[neuron].synapses) {
        if (syn.weight == 0.0)
            continue;
        double acc = 0.0;
        for (double s : score.trains[syn.source].times) {
            double x = t - syn.delay - s;
            x -= T * std::floor(x / T);
            acc += k(x, T, net.beta);
        }
        z += syn.weight * acc;
    }
    return z;
}

} // namespace

double potential(const Network& net, std::size_t neuron,
                 const FiringHistory& history, double t) {
    return accumulate(net, neuron, history, t, kernel_h);
}

double potential_dot(const Network& net, std::size_t neuron,
                     const FiringHistory& history, double t) {
    return accumulate(net, neuron, history, t, kernel_h_dot);
}

double potential_periodic(const Network& net, std::size_t neuron,
                          const SpikeScore& score, double t) {
    return accumulate_periodic(net, neuron, score, t, periodic_kernel_sum);
}

double potential_periodic_dot(const Network& net, std::size_t neuron,
                              const SpikeScore& score, double t) {
    return accumulate_periodic(net, neuron, score, t, periodic_kernel_sum_dot);
}

double periodic_coefficient(const Network& net, std::size_t neuron,
                            std::size_t synapse, const SpikeScore& score,
                            double t) {
    const auto& syn = net.neurons[neuron].synapses[synapse];
    const double T = score.period;
    double acc = 0.0;
    for (double s : score.trains[syn.source].times) {
        double x = t - syn.delay - s;
        x -= T * std::floor(x / T);
        acc += periodic_kernel_sum(x, T, net.beta);
    }
    return acc;
}

double periodic_coefficient_dot(const Network& net, std::size_t neuron,
                                std::size_t synapse, const SpikeScore& score,
                                double t) {
    const auto& syn = net.neurons[neuron].synapses[synapse];
    const double T = score.period;
    double acc = 0.0;
    for (double s : score.trains[syn.source].times) {
        double x = t - syn.delay - s;
        x -= T * std::floor(x / T);
        acc += periodic_kernel_sum_dot(x, T, net.beta);
    }
    return acc;
}

} // namespace spikemem
