#include <benchmark/benchmark.h>

#include "spikemem/experiments.hpp"
#include "spikemem/kernel.hpp"
#include "spikemem/metrics.hpp"
#include "spikemem/score_sampling.hpp"
#include "spikemem/simulator.hpp"
#include "spikemem/stability.hpp"
#include "spikemem/synthesis.hpp"

using namespace spikemem;

namespace {

static void BM_kernel_h(benchmark::State& state) {
    double t = 0.0;
    for (auto _ : state) {
        t += 0.001;
        if (t > 20.0)
            t = 0.0;
        benchmark::DoNotOptimize(kernel_h(t, 1.0));
    }
}
BENCHMARK(BM_kernel_h);

static void BM_periodic_kernel_sum(benchmark::State& state) {
    double x = 0.0;
    for (auto _ : state) {
        x += 0.001;
        if (x > 49.0)
            x = 0.0;
        benchmark::DoNotOptimize(periodic_kernel_sum(x, 50.0, 1.0));
    }
}
BENCHMARK(BM_periodic_kernel_sum);

static void BM_count_pmf(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(count_pmf(0.2, 50.0, 1.0));
}
BENCHMARK(BM_count_pmf);

static void BM_sample_train(benchmark::State& state) {
    const CountPMF pmf = count_pmf(0.2, 50.0, 1.0);
    RandomStream rng(1);
    for (auto _ : state)
        benchmark::DoNotOptimize(sample_spike_train(pmf, rng));
}
BENCHMARK(BM_sample_train);

static void BM_gibbs_jitter(benchmark::State& state) {
    const CountPMF pmf = count_pmf(0.2, 50.0, 1.0);
    RandomStream rng(2);
    SpikeTrain train = sample_spike_train(pmf, rng);
    while (train.count() < 5)
        train = sample_spike_train(pmf, rng);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            jitter_train(train, 1.0, 0.1, static_cast<int>(state.range(0)),
                         rng));
    state.SetItemsProcessed(state.iterations() * state.range(0) *
                            static_cast<std::int64_t>(train.count()));
}
BENCHMARK(BM_gibbs_jitter)->Arg(100)->Arg(1000);

static void BM_accumulator_add_eval(benchmark::State& state) {
    PulseAccumulator acc(1.0);
    double t = 0.0;
    for (auto _ : state) {
        t += 0.013;
        acc.add_pulse(t, 0.05);
        benchmark::DoNotOptimize(acc.value(t + 0.5));
    }
}
BENCHMARK(BM_accumulator_add_eval);

static void BM_find_next_crossing(benchmark::State& state) {
    PulseAccumulator acc(1.0);
    RandomStream rng(3);
    double t = 0.0;
    for (int i = 0; i < 200; ++i) {
        t += rng.uniform(0.0, 0.05);
        acc.add_pulse(t, rng.uniform(-0.2, 0.2));
    }
    for (auto _ : state)
        benchmark::DoNotOptimize(
            find_next_crossing(acc, 0.8, t, t + 2.0, 1e-9));
}
BENCHMARK(BM_find_next_crossing);

struct DeskInstance {
    Instance instance;
    ExperimentConfig config;
};

const DeskInstance& desk_instance() {
    static const DeskInstance cached = [] {
        DeskInstance d;
        d.config = ExperimentConfig::desk();
        d.config.num_neurons = 16;
        d.config.num_inputs = 300;
        d.config.period = 20.0;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            auto stream = RandomStream::derive(2024 + seed, 0);
            d.instance = make_instance(d.config, stream);
            if (d.instance.feasible)
                break;
        }
        return d;
    }();
    return cached;
}

static void BM_synthesize_neuron(benchmark::State& state) {
    const auto& d = desk_instance();
    RandomStream rng(4);
    const auto system = build_constraints(
        d.instance.network, 0,
        std::span<const SpikeScore>(&d.instance.score, 1),
        d.config.template_params());
    for (auto _ : state)
        benchmark::DoNotOptimize(
            solve_weights(system, d.config.template_params(), rng));
}
BENCHMARK(BM_synthesize_neuron)->Unit(benchmark::kMillisecond);

static void BM_simulate_period(benchmark::State& state) {
    const auto& d = desk_instance();
    if (!d.instance.feasible) {
        state.SkipWithError("no feasible instance");
        return;
    }
    for (auto _ : state) {
        SimConfig sim;
        sim.horizon = d.config.period * static_cast<double>(state.range(0));
        sim.sigma_theta = 0.1;
        sim.init = InitMode::exact_score;
        auto rng = RandomStream::derive(7, 7);
        benchmark::DoNotOptimize(
            simulate(d.instance.network, sim, d.instance.score, rng));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_simulate_period)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_monodromy(benchmark::State& state) {
    const auto& d = desk_instance();
    if (!d.instance.feasible) {
        state.SkipWithError("no feasible instance");
        return;
    }
    const auto seq = jitter_coefficients(d.instance.network, d.instance.score);
    for (auto _ : state)
        benchmark::DoNotOptimize(monodromy(seq));
    state.SetLabel("N=" + std::to_string(seq.order.size()));
}
BENCHMARK(BM_monodromy)->Unit(benchmark::kMillisecond);

static void BM_precision_recall(benchmark::State& state) {
    const auto& d = desk_instance();
    if (!d.instance.feasible) {
        state.SkipWithError("no feasible instance");
        return;
    }
    SimConfig sim;
    sim.horizon = 6 * d.config.period;
    sim.sigma_theta = 0.1;
    sim.init = InitMode::exact_score;
    auto rng = RandomStream::derive(8, 8);
    const SimRun run = simulate(d.instance.network, sim, d.instance.score, rng);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            precision_recall(run, d.instance.score, 4 * d.config.period));
}
BENCHMARK(BM_precision_recall)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
