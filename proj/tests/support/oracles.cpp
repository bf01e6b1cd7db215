#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spikemem/kernel.hpp"
#include "spikemem/potential.hpp"

namespace spikemem::oracle {

std::optional<double> scan_crossing(const PulseAccumulator& state, double theta,
                                    double t_from, double t_to,
                                    double grid_step, double tol) {
    if (state.value(t_from) >= theta)
        return t_from;
    double prev = t_from;
    for (double t = t_from + grid_step; t <= t_to + 0.5 * grid_step;
         t += grid_step) {
        const double clipped = std::min(t, t_to);
        if (state.value(clipped) >= theta) {
            double lo = prev, hi = clipped;
            while (hi - lo > tol) {
                const double mid = 0.5 * (lo + hi);
                if (state.value(mid) >= theta)
                    hi = mid;
                else
                    lo = mid;
            }
            return hi;
        }
        prev = clipped;
        if (clipped == t_to)
            break;
    }
    return std::nullopt;
}

namespace {

// First upward crossing of theta0 near the nominal firing time, polished to
// machine precision with bisection followed by Newton steps. The scan starts
// inside the pre-firing zone, where the template keeps the potential below
// theta0; further left (the previous spike's refractory window) the
// potential is unconstrained and can sit above threshold.
double crossing_near(const Network& net, std::size_t neuron,
                     const FiringHistory& history, double nominal,
                     double theta0) {
    const double start = nominal - 0.15 * net.tau0;
    const double step = 1e-3 * net.tau0;
    double lo = start;
    double hi = start;
    bool found = false;
    for (double t = start; t <= nominal + 0.25 * net.tau0; t += step) {
        if (potential(net, neuron, history, t) >= theta0) {
            hi = t;
            found = true;
            break;
        }
        lo = t;
    }
    if (!found)
        throw std::runtime_error("fd oracle: no crossing near nominal time");
    for (int i = 0; i < 60 && hi - lo > 1e-13; ++i) {
        const double mid = 0.5 * (lo + hi);
        (potential(net, neuron, history, mid) >= theta0 ? hi : lo) = mid;
    }
    double t = hi;
    for (int i = 0; i < 3; ++i) {
        const double z = potential(net, neuron, history, t);
        const double zd = potential_dot(net, neuron, history, t);
        if (zd <= 0.0)
            break;
        t -= (z - theta0) / zd;
    }
    return t;
}

} // namespace

double fd_jitter_sensitivity(const Network& net, const SpikeScore& score,
                             const GlobalFiringOrder& order, std::size_t n,
                             std::size_t lag, double delta) {
    const std::size_t N = order.size();
    const double T = score.period;
    const std::size_t target_neuron = order.owner[n];
    const double s_n = order.times[n];

    // the perturbed occurrence: the lag-th predecessor in the global order
    const std::size_t raw = n + N - lag;
    const std::size_t pred = raw % N;
    const double pred_time = order.times[pred] - (raw < N ? T : 0.0);
    const std::size_t pred_neuron = order.owner[pred];

    const double reach = net.d_max + kernel_cutoff(net.beta, 1e-14) + T;
    FiringHistory base(net.size());
    for (std::size_t src = 0; src < net.size(); ++src)
        for (double s : score.trains[src].times)
            for (double img = s - std::ceil((s_n + reach) / T) * T;
                 img <= s_n; img += T)
                if (img > s_n - reach)
                    base[src].push_back(img);
    for (auto& h : base)
        std::sort(h.begin(), h.end());

    FiringHistory shifted = base;
    bool hit = false;
    for (double& t : shifted[pred_neuron])
        if (std::abs(t - pred_time) < 1e-9) {
            t += delta;
            hit = true;
        }
    if (!hit)
        throw std::runtime_error("fd oracle: predecessor occurrence not found");

    const double t0 = crossing_near(net, target_neuron, base, s_n, net.theta0);
    const double t1 =
        crossing_near(net, target_neuron, shifted, s_n, net.theta0);
    return (t1 - t0) / delta;
}

} // namespace spikemem::oracle
