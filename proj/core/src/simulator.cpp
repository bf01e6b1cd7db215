#include "spikemem/simulator.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "spikemem/errors.hpp"
#include "spikemem/kernel.hpp"
#include "spikemem/score_sampling.hpp"

namespace spikemem {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
} // namespace

std::vector<double> SimRun::times(std::size_t neuron) const {
    std::vector<double> out;
    out.reserve(firings[neuron].size());
    for (const auto& f : firings[neuron])
        out.push_back(f.time);
    return out;
}

std::size_t SimRun::total_firings() const {
    std::size_t n = 0;
    for (const auto& v : firings)
        n += v.size();
    return n;
}

std::optional<double> find_next_crossing(const PulseAccumulator& state,
                                         double theta, double t_from,
                                         double t_to, double tol) {
    if (!(t_to >= t_from))
        return std::nullopt;
    if (state.value(t_from) >= theta)
        return t_from;

    const double beta = state.beta();
    // Sole interior extremum of the inter-arrival potential: v* = beta + B/A.
    double t_star = -kInf;
    if (state.sum_a() != 0.0)
        t_star = state.t_ref() + beta + state.sum_b() / state.sum_a();

    // Beyond the extremum the potential decays monotonically toward zero,
    // so a finite far end suffices even for t_to = inf.
    const double cap = std::max(t_from, t_star) + 60.0 * beta;
    const double end = std::min(t_to, cap);
    if (!(end > t_from))
        return std::nullopt;

    auto bisect = [&](double lo, double hi) {
        // invariant: z(lo) < theta <= z(hi)
        while (hi - lo > tol) {
            const double mid = 0.5 * (lo + hi);
            if (state.value(mid) >= theta)
                hi = mid;
            else
                lo = mid;
        }
        return hi;
    };

    double seg_lo = t_from;
    if (t_star > t_from && t_star < end) {
        if (state.value(t_star) >= theta)
            return bisect(seg_lo, t_star);
        seg_lo = t_star;
    }
    if (state.value(end) >= theta)
        return bisect(seg_lo, end);
    return std::nullopt;
}

namespace {

enum class EventKind : std::uint8_t {
    phase = 0,
    arrival = 1,
    forced = 2,
    check = 3
};

struct Event {
    double time;
    std::uint64_t seq;
    std::uint64_t epoch;
    double weight;
    std::uint32_t neuron;
    EventKind kind;
};

// Total order: time, then kind, then neuron, then insertion sequence. The
// simulation is bit-reproducible because ties never depend on queue internals.
struct EventOrder {
    bool operator()(const Event& a, const Event& b) const {
        if (a.time != b.time)
            return a.time > b.time;
        if (a.kind != b.kind)
            return a.kind > b.kind;
        if (a.neuron != b.neuron)
            return a.neuron > b.neuron;
        return a.seq > b.seq;
    }
};

struct Target {
    std::uint32_t neuron;
    double delay;
    double weight;
};

struct NeuronState {
    PulseAccumulator acc;
    double refractory_end = -kInf;
    double theta = 0.0;
    std::uint64_t epoch = 0;
    bool forced_mode = false;
    std::priority_queue<double, std::vector<double>, std::greater<>> pending;
    std::vector<Firing> out;
};

class Engine {
public:
    Engine(const Network& net, const SimConfig& config,
           std::span<const SpikeScore> scores, RandomStream& rng)
        : net_(net), config_(config), scores_(scores), rng_(rng) {}

    SimRun run() {
        const std::size_t L = net_.size();
        states_.reserve(L);
        for (std::size_t i = 0; i < L; ++i)
            states_.emplace_back(NeuronState{PulseAccumulator(net_.beta)});
        fanout_.assign(L, {});
        for (std::uint32_t ell = 0; ell < L; ++ell)
            for (const auto& syn : net_.neurons[ell].synapses)
                if (syn.weight != 0.0)
                    fanout_[syn.source].push_back(
                        Target{ell, syn.delay, syn.weight});

        crossing_tol_ = config_.crossing_tol * net_.tau0;

        // Threshold in effect before the first firing: a fresh draw at t = 0.
        for (auto& st : states_)
            st.theta = rng_.normal(net_.theta0, config_.sigma_theta);

        if (config_.init == InitMode::exact_score)
            seed_history(scores_[0]);

        if (config_.forcing) {
            forced_sorted_ = config_.forcing->forced;
            std::sort(forced_sorted_.begin(), forced_sorted_.end());
            for (auto f : forced_sorted_)
                if (f >= L)
                    throw ParameterError("simulate: forced index out of range");
            for (const auto& ph : config_.forcing->schedule)
                push({ph.begin, seq_++, 0, 0.0, 0, EventKind::phase});
            // Forced neurons fall back to autonomous once the schedule ends.
            if (!config_.forcing->schedule.empty())
                push({config_.forcing->schedule.back().end, seq_++, 0, 0.0, 0,
                      EventKind::phase});
        }

        // Arm every neuron at t = 0 (or at its refractory end from history).
        for (std::uint32_t ell = 0; ell < L; ++ell) {
            auto& st = states_[ell];
            push({std::max(0.0, st.refractory_end), seq_++, st.epoch, 0.0, ell,
                  EventKind::check});
        }

        while (!queue_.empty()) {
            const Event ev = queue_.top();
            if (ev.time >= config_.horizon)
                break;
            queue_.pop();
            dispatch(ev);
        }

        SimRun run;
        run.horizon = config_.horizon;
        run.firings.resize(L);
        for (std::size_t i = 0; i < L; ++i)
            run.firings[i] = std::move(states_[i].out);
        if (config_.forcing)
            run.phases = config_.forcing->schedule;
        return run;
    }

private:
    void push(const Event& ev) { queue_.push(ev); }

    // Prescribed firings on (-d_max - t_cut, 0) become history: pulses that
    // already arrived go into the running sums, pulses still in flight are
    // queued. Refractory state carries over from the last history firing.
    void seed_history(const SpikeScore& score) {
        const double window = net_.d_max + kernel_cutoff(net_.beta, 1e-10);
        const double T = score.period;
        for (std::uint32_t src = 0; src < net_.size(); ++src) {
            const auto& times = score.trains[src].times;
            if (times.empty())
                continue;
            states_[src].refractory_end = times.back() - T + net_.tau0;
            for (double s0 : times) {
                for (double s = s0 - T; s > -window; s -= T) {
                    for (const auto& tgt : fanout_[src]) {
                        const double arrival = s + tgt.delay;
                        if (arrival <= 0.0)
                            states_[tgt.neuron].acc.add_pulse(arrival,
                                                              tgt.weight);
                        else
                            push({arrival, seq_++, 0, tgt.weight, tgt.neuron,
                                  EventKind::arrival});
                    }
                }
            }
        }
        // Per-neuron pending arrivals for the queued history deliveries.
        std::vector<Event> stash;
        stash.reserve(queue_.size());
        while (!queue_.empty()) {
            stash.push_back(queue_.top());
            queue_.pop();
        }
        for (const auto& ev : stash) {
            if (ev.kind == EventKind::arrival)
                states_[ev.neuron].pending.push(ev.time);
            queue_.push(ev);
        }
    }

    void dispatch(const Event& ev) {
        switch (ev.kind) {
        case EventKind::arrival:
            on_arrival(ev);
            break;
        case EventKind::check:
            on_check(ev);
            break;
        case EventKind::forced:
            fire(ev.neuron, ev.time, /*forced=*/true);
            break;
        case EventKind::phase:
            on_phase(ev.time);
            break;
        }
    }

    void on_arrival(const Event& ev) {
        auto& st = states_[ev.neuron];
        if (!st.pending.empty())
            st.pending.pop();
        st.acc.add_pulse(ev.time, ev.weight);
        if (st.forced_mode)
            return;
        if (ev.time >= st.refractory_end) {
            ++st.epoch; // crossing candidates computed before this pulse die
            scan(ev.neuron, ev.time);
        }
    }

    void on_check(const Event& ev) {
        auto& st = states_[ev.neuron];
        if (ev.epoch != st.epoch || st.forced_mode)
            return;
        const double t = std::max(ev.time, st.refractory_end);
        if (st.acc.value(t) >= st.theta)
            fire(ev.neuron, t, /*forced=*/false);
        else
            scan(ev.neuron, t);
    }

    // Crossing search with the current pulse set, valid up to this neuron's
    // next known arrival (that arrival triggers a fresh scan).
    void scan(std::uint32_t neuron, double t_from) {
        auto& st = states_[neuron];
        const double until = st.pending.empty() ? kInf : st.pending.top();
        const auto hit =
            find_next_crossing(st.acc, st.theta, t_from, until, crossing_tol_);
        if (hit)
            push({*hit, seq_++, st.epoch, 0.0, neuron, EventKind::check});
    }

    void fire(std::uint32_t neuron, double t, bool forced) {
        auto& st = states_[neuron];
        if (t < st.refractory_end - 1e-9 * net_.tau0)
            throw InternalError("simulate: scheduled refractory violation");
        st.out.push_back({t, forced ? kNaN : st.theta, forced});
        st.refractory_end = t + net_.tau0;
        ++st.epoch;
        if (!forced) {
            st.theta = rng_.normal(net_.theta0, config_.sigma_theta);
            push({st.refractory_end, seq_++, st.epoch, 0.0, neuron,
                  EventKind::check});
        }
        for (const auto& tgt : fanout_[neuron]) {
            const double arrival = t + tgt.delay;
            push({arrival, seq_++, 0, tgt.weight, tgt.neuron,
                  EventKind::arrival});
            states_[tgt.neuron].pending.push(arrival);
        }
    }

    void on_phase(double t) {
        const auto& forcing = *config_.forcing;
        const Phase* phase = nullptr;
        for (const auto& ph : forcing.schedule)
            if (ph.begin == t)
                phase = &ph;

        for (std::uint32_t ell : forced_sorted_) {
            auto& st = states_[ell];
            ++st.epoch;
            if (phase != nullptr && phase->mode == PhaseMode::forced) {
                st.forced_mode = true;
                schedule_forced(ell, *phase);
            } else if (st.forced_mode) {
                // Re-enter autonomous mode with history intact and a fresh
                // threshold draw; the suspended threshold process restarts.
                st.forced_mode = false;
                st.theta = rng_.normal(net_.theta0, config_.sigma_theta);
                push({std::max(t, st.refractory_end), seq_++, st.epoch, 0.0,
                      ell, EventKind::check});
            } else {
                push({std::max(t, st.refractory_end), seq_++, st.epoch, 0.0,
                      ell, EventKind::check});
            }
        }
    }

    // Emits a jittered copy of the prescribed train inside [begin, end),
    // first spike constrained past the neuron's own refractory end.
    void schedule_forced(std::uint32_t ell, const Phase& phase) {
        const auto& forcing = *config_.forcing;
        const auto& score = scores_[phase.score_index];
        std::vector<double> nominal = score.trains[ell].times;
        if (nominal.empty())
            return;
        const double min_first =
            std::max(states_[ell].refractory_end - phase.begin, 0.0);
        JitterBoundary boundary = JitterBoundary::free_ends();
        boundary.min_first = min_first;
        boundary.max_last = phase.end - phase.begin;

        std::vector<double> emitted;
        while (!nominal.empty()) {
            // Drop leading spikes that cannot clear the refractory constraint
            // (the neuron fired too close to the phase switch). Practically
            // unreachable at default parameters.
            const double cap = nominal.size() > 1 ? nominal[1] - net_.tau0
                                                  : *boundary.max_last;
            if (min_first < cap) {
                emitted = jitter_times(nominal, net_.tau0, forcing.sigma_s,
                                       forcing.gibbs_sweeps, rng_, boundary);
                break;
            }
            nominal.erase(nominal.begin());
        }
        for (double s : emitted) {
            const double t = phase.begin + s;
            if (t >= phase.begin && t < phase.end &&
                t >= states_[ell].refractory_end)
                push({t, seq_++, 0, 0.0, ell, EventKind::forced});
        }
    }

    const Network& net_;
    const SimConfig& config_;
    std::span<const SpikeScore> scores_;
    RandomStream& rng_;

    std::priority_queue<Event, std::vector<Event>, EventOrder> queue_;
    std::vector<NeuronState> states_;
    std::vector<std::vector<Target>> fanout_;
    std::vector<std::uint32_t> forced_sorted_;
    std::uint64_t seq_ = 0;
    double crossing_tol_ = 1e-9;
};

void validate_schedule(const std::vector<Phase>& schedule) {
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (!(schedule[i].end > schedule[i].begin))
            throw ParameterError("simulate: empty phase");
        if (i > 0 && schedule[i].begin < schedule[i - 1].end)
            throw ParameterError("simulate: overlapping phases");
    }
}

} // namespace

SimRun simulate(const Network& net, const SimConfig& config,
                std::span<const SpikeScore> scores, RandomStream& rng) {
    validate_network(net);
    if (!(config.horizon > 0.0))
        throw ParameterError("simulate: horizon must be positive");
    if (config.sigma_theta < 0.0)
        throw ParameterError("simulate: sigma_theta must be >= 0");
    if (config.init == InitMode::exact_score) {
        if (scores.empty())
            throw ParameterError("simulate: exact-score init needs a score");
        validate_score(scores[0], 1e-9 * scores[0].period);
    }
    if (config.forcing) {
        if (scores.empty())
            throw ParameterError("simulate: forcing needs scores");
        validate_schedule(config.forcing->schedule);
        for (const auto& ph : config.forcing->schedule)
            if (ph.mode == PhaseMode::forced && ph.score_index >= scores.size())
                throw ParameterError("simulate: phase score index out of range");
    }

    Engine engine(net, config, scores, rng);
    SimRun run = engine.run();

    for (const auto& f : run.firings)
        for (std::size_t i = 1; i < f.size(); ++i)
            if (f[i].time - f[i - 1].time < net.tau0 * (1.0 - 1e-9))
                throw InternalError("simulate: refractory invariant violated");
    return run;
}

SimRun simulate(const Network& net, const SimConfig& config,
                const SpikeScore& score, RandomStream& rng) {
    return simulate(net, config, std::span<const SpikeScore>(&score, 1), rng);
}

} // namespace spikemem
