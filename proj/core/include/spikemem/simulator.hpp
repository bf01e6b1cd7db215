#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "spikemem/network.hpp"
#include "spikemem/rng.hpp"
#include "spikemem/spike_train.hpp"

namespace spikemem {

/// Running-sum representation of a neuron's potential. All pulses share one
/// beta, so between arrivals
///     z(t) = (e^{1-v/beta}/beta) * (v*sum_a - sum_b),   v = t - t_ref,
/// with sum_a = sum w_i e^{u_i/beta}, sum_b = sum w_i u_i e^{u_i/beta} over
/// arrived pulses (u_i = arrival - t_ref). Adding a pulse and evaluating are
/// O(1); rebasing keeps the exponentials conditioned.
class PulseAccumulator {
public:
    explicit PulseAccumulator(double beta = 1.0) : beta_(beta) {}

    void add_pulse(double arrival, double weight) {
        if (arrival - t_ref_ > 8.0 * beta_)
            rebase(arrival);
        const double u = arrival - t_ref_;
        const double e = std::exp(u / beta_) * weight;
        sum_a_ += e;
        sum_b_ += u * e;
    }

    void rebase(double new_ref) {
        const double shift = new_ref - t_ref_;
        const double decay = std::exp(-shift / beta_);
        sum_b_ = (sum_b_ - shift * sum_a_) * decay;
        sum_a_ *= decay;
        t_ref_ = new_ref;
    }

    /// Valid for t at or after the latest added arrival.
    double value(double t) const {
        const double v = t - t_ref_;
        return std::exp(1.0 - v / beta_) / beta_ * (v * sum_a_ - sum_b_);
    }

    double derivative(double t) const {
        const double v = t - t_ref_;
        return std::exp(1.0 - v / beta_) / beta_ *
               (sum_a_ - (v * sum_a_ - sum_b_) / beta_);
    }

    double beta() const { return beta_; }
    double sum_a() const { return sum_a_; }
    double sum_b() const { return sum_b_; }
    double t_ref() const { return t_ref_; }

private:
    double beta_;
    double sum_a_ = 0.0;
    double sum_b_ = 0.0;
    double t_ref_ = 0.0;
};

/// Earliest t in [t_from, t_to] with state.value(t) >= theta, located to
/// absolute tolerance `tol`. Exact up to that tolerance: between arrivals the
/// potential has a single interior extremum, so bracketing on the monotone
/// pieces cannot skip a crossing. Returns a time whose potential is >= theta.
std::optional<double> find_next_crossing(const PulseAccumulator& state,
                                         double theta, double t_from,
                                         double t_to, double tol);

enum class InitMode { exact_score, quiet };
enum class PhaseMode { autonomous, forced };

struct Phase {
    double begin = 0.0;
    double end = 0.0;
    PhaseMode mode = PhaseMode::autonomous;
    std::uint32_t score_index = 0; // score emitted by forced neurons
};

struct Forcing {
    std::vector<std::uint32_t> forced; // forceable neuron indices
    std::vector<Phase> schedule;       // disjoint, ascending
    double sigma_s = 0.0;
    int gibbs_sweeps = 1000;
};

struct SimConfig {
    double horizon = 0.0;
    double sigma_theta = 0.0;
    InitMode init = InitMode::exact_score;
    std::optional<Forcing> forcing;
    double crossing_tol = 1e-9; // in units of tau0
};

struct Firing {
    double time = 0.0;
    double threshold = 0.0; // NaN for forced emissions
    bool forced = false;
};

struct SimRun {
    double horizon = 0.0;
    std::vector<std::vector<Firing>> firings; // per neuron, ascending
    std::vector<Phase> phases;

    std::vector<double> times(std::size_t neuron) const;
    std::size_t total_firings() const;
};

/// Event-driven simulation. scores[0] provides the exact-score initial
/// history; forced phases reference scores by index. A neuron fires at the
/// earliest t with z(t) >= theta and t >= last firing + tau0; each firing
/// redraws theta from N(theta0, sigma_theta^2). Forced neurons ignore their
/// input and emit per-phase Gibbs-jittered copies of their prescribed train
/// (threshold bookkeeping suspended while forced).
SimRun simulate(const Network& net, const SimConfig& config,
                std::span<const SpikeScore> scores, RandomStream& rng);

SimRun simulate(const Network& net, const SimConfig& config,
                const SpikeScore& score, RandomStream& rng);

} // namespace spikemem
