#include "spikemem/score_sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spikemem/errors.hpp"

namespace spikemem {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
} // namespace

double CountPMF::expected_count() const {
    double e = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n)
        e += static_cast<double>(n) * p[n];
    return e;
}

CountPMF count_pmf(double lambda, double period, double tau0) {
    if (!(lambda > 0.0) || tau0 < 0.0 || !(period > tau0))
        throw ParameterError("count_pmf: need lambda > 0 and period > tau0 >= 0");

    // Largest n with n < T/tau0 (support excludes n = T/tau0 itself).
    // tau0 = 0 is the plain Poisson limit: the support is unbounded, so it
    // is truncated where the tail mass becomes negligible.
    std::size_t n_max;
    if (tau0 > 0.0) {
        auto fits = [&](std::size_t n) {
            return static_cast<double>(n) * tau0 < period;
        };
        n_max = static_cast<std::size_t>(period / tau0);
        while (n_max > 0 && !fits(n_max))
            --n_max;
    } else {
        const double mean = lambda * period;
        n_max = static_cast<std::size_t>(mean + 40.0 * std::sqrt(mean) + 64.0);
    }

    // Log-space weights log[(lambda (T - n tau0))^{n-1} / n!] to survive
    // large lambda*T.
    std::vector<double> lw(n_max + 1);
    for (std::size_t n = 0; n <= n_max; ++n) {
        const double free_len = period - static_cast<double>(n) * tau0;
        lw[n] = (static_cast<double>(n) - 1.0) * std::log(lambda * free_len) -
                std::lgamma(static_cast<double>(n) + 1.0);
    }
    const double m = *std::max_element(lw.begin(), lw.end());
    double z = 0.0;
    for (double v : lw)
        z += std::exp(v - m);
    const double lse = m + std::log(z);

    CountPMF pmf;
    pmf.lambda = lambda;
    pmf.period = period;
    pmf.tau0 = tau0;
    pmf.log_gamma = -lse;
    pmf.p.resize(n_max + 1);
    for (std::size_t n = 0; n <= n_max; ++n)
        pmf.p[n] = std::exp(lw[n] - lse);
    return pmf;
}

namespace {

std::size_t draw_count(const CountPMF& pmf, RandomStream& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t n = 0; n < pmf.p.size(); ++n) {
        acc += pmf.p[n];
        if (u < acc)
            return n;
    }
    return pmf.p.size() - 1;
}

} // namespace

SpikeTrain sample_spike_train(const CountPMF& pmf, RandomStream& rng) {
    const double T = pmf.period;
    const double tau0 = pmf.tau0;

    for (int attempt = 0; attempt < 64; ++attempt) {
        const std::size_t n = draw_count(pmf, rng);
        SpikeTrain train;
        train.period = T;
        if (n == 0)
            return train;

        const double s0 = rng.uniform(0.0, T);
        const double free_len = T - static_cast<double>(n) * tau0;
        std::vector<double> u(n - 1);
        for (auto& v : u)
            v = rng.uniform(0.0, free_len);
        std::sort(u.begin(), u.end());

        train.times.resize(n);
        train.times[0] = s0;
        for (std::size_t i = 1; i < n; ++i)
            train.times[i] = s0 + static_cast<double>(i) * tau0 + u[i - 1];
        for (auto& t : train.times)
            if (t >= T)
                t -= T;
        std::sort(train.times.begin(), train.times.end());

        // The construction already guarantees all circular gaps >= tau0
        // (u_{n-1} <= T - n tau0 bounds the occupied span by T - tau0);
        // resample on the measure-zero fp boundary just in case.
        if (min_circular_gap(train) >= tau0 - 1e-12 * T) {
            validate_train(train, tau0, 1e-12 * T);
            return train;
        }
    }
    throw InternalError("sample_spike_train: persistent refractory violation");
}

SpikeScore sample_score(std::size_t num_neurons, const CountPMF& pmf,
                        RandomStream& rng) {
    if (num_neurons == 0)
        throw ParameterError("sample_score: need at least one neuron");
    SpikeScore score;
    score.tau0 = pmf.tau0;
    score.period = pmf.period;
    score.trains.reserve(num_neurons);
    for (std::size_t i = 0; i < num_neurons; ++i)
        score.trains.push_back(sample_spike_train(pmf, rng));
    return score;
}

namespace {

// One Gibbs update of position k with neighbors fixed.
void update_position(std::vector<double>& s, const std::vector<double>& nominal,
                     std::size_t k, double tau0, double sigma,
                     RandomStream& rng, const JitterBoundary& boundary,
                     double period) {
    const std::size_t n = s.size();
    double lo = -kInf;
    double hi = kInf;
    if (k > 0)
        lo = s[k - 1] + tau0;
    else if (boundary.periodic)
        lo = s[n - 1] - period + tau0;
    if (k + 1 < n)
        hi = s[k + 1] - tau0;
    else if (boundary.periodic)
        hi = s[0] + period - tau0;
    if (k == 0 && boundary.min_first)
        lo = std::max(lo, *boundary.min_first);
    if (k + 1 == n && boundary.max_last)
        hi = std::min(hi, *boundary.max_last);

    if (!(lo < hi))
        throw InvariantError("jitter: infeasible truncation interval");
    if (lo == -kInf && hi == kInf) {
        s[k] = rng.normal(nominal[k], sigma);
        return;
    }
    s[k] = rng.truncated_normal(nominal[k], sigma, lo, hi);
}

void gibbs_sweeps(std::vector<double>& s, const std::vector<double>& nominal,
                  double tau0, double sigma, int sweeps, RandomStream& rng,
                  const JitterBoundary& boundary, double period) {
    const std::size_t n = s.size();
    for (int m = 0; m < sweeps; ++m) {
        for (std::size_t k = 0; k < n; k += 2)
            update_position(s, nominal, k, tau0, sigma, rng, boundary, period);
        for (std::size_t k = 1; k < n; k += 2)
            update_position(s, nominal, k, tau0, sigma, rng, boundary, period);
    }
}

} // namespace

std::vector<double> jitter_times(const std::vector<double>& nominal,
                                 double tau0, double sigma_s, int sweeps,
                                 RandomStream& rng,
                                 const JitterBoundary& boundary) {
    if (sigma_s < 0.0 || sweeps < 1)
        throw ParameterError("jitter_times: need sigma_s >= 0 and sweeps >= 1");
    if (boundary.periodic)
        throw ParameterError("jitter_times: periodic boundary needs jitter_train");
    std::vector<double> s = nominal;
    if (sigma_s == 0.0 || s.empty())
        return s;
    gibbs_sweeps(s, nominal, tau0, sigma_s, sweeps, rng, boundary, 0.0);
    return s;
}

SpikeTrain jitter_train(const SpikeTrain& train, double tau0, double sigma_s,
                        int sweeps, RandomStream& rng,
                        const JitterBoundary& boundary) {
    if (sigma_s < 0.0 || sweeps < 1)
        throw ParameterError("jitter_train: need sigma_s >= 0 and sweeps >= 1");
    validate_train(train, tau0, 1e-9 * train.period);
    if (sigma_s == 0.0 || train.empty())
        return train;

    std::vector<double> s = train.times;
    gibbs_sweeps(s, train.times, tau0, sigma_s, sweeps, rng, boundary,
                 train.period);
    SpikeTrain out;
    out.period = train.period;
    out.times = std::move(s);
    for (auto& t : out.times)
        t -= train.period * std::floor(t / train.period);
    std::sort(out.times.begin(), out.times.end());
    validate_train(out, tau0, 1e-9 * train.period);
    return out;
}

} // namespace spikemem
