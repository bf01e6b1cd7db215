#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "spikemem/kernel.hpp"
#include "spikemem/network.hpp"
#include "spikemem/potential.hpp"
#include "spikemem/rng.hpp"
#include "spikemem/score_sampling.hpp"

using namespace spikemem;

namespace {

Network toy_network(RandomStream& rng, std::size_t L = 3, std::size_t K = 6) {
    Network net = build_random_network(L, K, 0.1, 5.0, 1.0, 1.0, 1.0, rng);
    for (auto& neuron : net.neurons)
        for (auto& syn : neuron.synapses)
            syn.weight = rng.uniform(-0.2, 0.2);
    return net;
}

} // namespace

TEST_CASE("no input spikes means zero potential") {
    RandomStream rng(1);
    const Network net = toy_network(rng);
    const FiringHistory empty(net.size());
    for (double t : {0.0, 1.0, 7.5})
        CHECK(potential(net, 0, empty, t) == 0.0);
}

TEST_CASE("a single spike peaks at weight after delay plus beta") {
    RandomStream rng(2);
    Network net = build_random_network(2, 1, 0.1, 5.0, 1.0, 1.0, 1.0, rng);
    auto& syn = net.neurons[0].synapses[0];
    syn.weight = 0.17;
    FiringHistory history(net.size());
    const double s = 3.1;
    history[syn.source] = {s};
    const double peak_time = s + syn.delay + net.beta;
    CHECK(potential(net, 0, history, peak_time) ==
          doctest::Approx(0.17).epsilon(1e-12));
    // bounded in magnitude by |w|
    for (double t = 0.0; t < 20.0; t += 0.01)
        CHECK(std::abs(potential(net, 0, history, t)) <= 0.17 + 1e-15);
}

TEST_CASE("superposition of two spikes") {
    RandomStream rng(3);
    Network net = build_random_network(1, 2, 0.1, 4.0, 1.0, 1.0, 1.0, rng);
    net.neurons[0].synapses[0].weight = 0.12;
    net.neurons[0].synapses[1].weight = -0.07;
    FiringHistory a(1), b(1), both(1);
    a[0] = {1.0};
    b[0] = {2.5};
    both[0] = {1.0, 2.5};
    for (double t = 0.0; t < 12.0; t += 0.37) {
        const double za = potential(net, 0, a, t);
        const double zb = potential(net, 0, b, t);
        CHECK(potential(net, 0, both, t) ==
              doctest::Approx(za + zb).epsilon(1e-12));
    }
}

TEST_CASE("causality: future spikes never matter") {
    RandomStream rng(4);
    const Network net = toy_network(rng);
    FiringHistory history(net.size());
    for (auto& h : history)
        h = {0.5, 2.0};
    const double t = 3.0;
    const double base = potential(net, 1, history, t);
    FiringHistory with_future = history;
    for (auto& h : with_future)
        h.push_back(t + 0.11); // d_min > 0, so t + eps can never reach t
    CHECK(potential(net, 1, with_future, t) == base);
    CHECK(potential_dot(net, 1, with_future, t) ==
          potential_dot(net, 1, history, t));
}

TEST_CASE("potential_dot matches central differences") {
    RandomStream rng(5);
    const Network net = toy_network(rng, 4, 10);
    FiringHistory history(net.size());
    RandomStream spikes(6);
    for (auto& h : history)
        for (int i = 0; i < 5; ++i)
            h.push_back(spikes.uniform(0.0, 8.0));
    for (auto& h : history)
        std::sort(h.begin(), h.end());
    const double eps = 1e-6;
    for (double t : {2.2, 5.9, 9.4}) {
        const double fd = (potential(net, 2, history, t + eps) -
                           potential(net, 2, history, t - eps)) /
                          (2 * eps);
        const double an = potential_dot(net, 2, history, t);
        CHECK(an == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("linearity in the weight vector") {
    RandomStream rng(7);
    Network net = toy_network(rng, 2, 5);
    FiringHistory history(net.size());
    history[0] = {0.3, 1.9};
    history[1] = {0.8};
    const double t = 4.0;
    const double z1 = potential(net, 0, history, t);
    for (auto& syn : net.neurons[0].synapses)
        syn.weight *= 2.5;
    CHECK(potential(net, 0, history, t) ==
          doctest::Approx(2.5 * z1).epsilon(1e-12));
}

TEST_CASE("periodic potential equals explicit periodic history") {
    RandomStream rng(8);
    Network net = toy_network(rng, 3, 8);
    const CountPMF pmf = count_pmf(0.25, 12.0, 1.0);
    SpikeScore score = sample_score(3, pmf, rng);

    // materialize enough past periods to cover the kernel support
    const double reach = net.d_max + kernel_cutoff(net.beta, 1e-14);
    const int images = static_cast<int>(reach / score.period) + 2;
    const double t = 7.3;
    FiringHistory history(net.size());
    for (std::size_t ell = 0; ell < 3; ++ell)
        for (int j = -images; j <= 0; ++j)
            for (double s : score.trains[ell].times)
                history[ell].push_back(s + j * score.period);

    CHECK(potential_periodic(net, 1, score, t) ==
          doctest::Approx(potential(net, 1, history, t)).epsilon(1e-10));
    CHECK(potential_periodic_dot(net, 1, score, t) ==
          doctest::Approx(potential_dot(net, 1, history, t)).epsilon(1e-8));

    // per-synapse coefficients against unit-weight potential evaluation
    for (std::size_t k = 0; k < net.inputs_per_neuron(); ++k) {
        Network unit = net;
        for (auto& syn : unit.neurons[1].synapses)
            syn.weight = 0.0;
        unit.neurons[1].synapses[k].weight = 1.0;
        CHECK(periodic_coefficient(net, 1, k, score, t) ==
              doctest::Approx(potential_periodic(unit, 1, score, t))
                  .epsilon(1e-12));
    }
}
