#include "spikemem/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "spikemem/errors.hpp"

namespace spikemem {

double triangular_kernel(double t, double tau0) {
    const double a = std::abs(t);
    if (a > 0.5 * tau0)
        return 0.0;
    return 1.0 - 2.0 * a / tau0;
}

namespace {

double circular_distance(double a, double b, double period) {
    double d = a - b;
    d -= period * std::floor(d / period);
    return std::min(d, period - d);
}

// (kappa * x)(u) for the periodic prescribed train: at most one triangle is
// nonzero, so this is the kernel at the circularly nearest prescribed spike.
double score_match(const SpikeTrain& train, double u, double tau0) {
    if (train.empty())
        return 0.0;
    const double T = train.period;
    double x = u - T * std::floor(u / T);
    const auto& ts = train.times;
    auto it = std::lower_bound(ts.begin(), ts.end(), x);
    double best = T;
    if (it != ts.end())
        best = std::min(best, std::abs(*it - x));
    if (it != ts.begin())
        best = std::min(best, std::abs(x - *(it - 1)));
    // wrap to both ends
    best = std::min(best, x + T - ts.back());
    best = std::min(best, ts.front() + T - x);
    return triangular_kernel(best, tau0);
}

bool window_admissible(const std::vector<double>& times, double period,
                       double tau0) {
    for (std::size_t i = 0; i < times.size(); ++i)
        for (std::size_t j = i + 1; j < times.size(); ++j)
            if (circular_distance(times[i], times[j], period) <= tau0)
                return false;
    return true;
}

} // namespace

WindowedFirings window_firings(const std::vector<std::vector<double>>& firings,
                               double t0, double period, double tau0) {
    WindowedFirings out;
    out.t0 = t0;
    out.period = period;
    out.times.resize(firings.size());
    out.border_adjust.resize(firings.size());
    for (std::size_t ell = 0; ell < firings.size(); ++ell) {
        double chosen = -tau0;
        std::vector<double> best;
        for (double c : {tau0, 0.0, -tau0}) {
            std::vector<double> in_window;
            for (double t : firings[ell])
                if (t >= t0 && t < t0 + period + c)
                    in_window.push_back(t);
            if (window_admissible(in_window, period, tau0)) {
                chosen = c;
                best = std::move(in_window);
                break;
            }
            if (c == -tau0)
                best = std::move(in_window); // none admissible: keep smallest
        }
        out.times[ell] = std::move(best);
        out.border_adjust[ell] = chosen;
    }
    return out;
}

double best_alignment(const WindowedFirings& window, const SpikeScore& score,
                      std::span<const std::uint32_t> subset) {
    const double T = score.period;
    const double tau0 = score.tau0;

    auto objective = [&](double tau) {
        double total = 0.0;
        for (auto ell : subset)
            for (double s : window.times[ell])
                total += score_match(score.trains[ell], s - tau, tau0);
        return total;
    };

    // The objective is piecewise linear in tau; its maximum is attained at a
    // breakpoint, i.e. where some realized spike meets a triangle apex or
    // edge of its prescribed train.
    std::vector<double> candidates;
    double anchor = std::numeric_limits<double>::infinity();
    for (auto ell : subset) {
        const auto& prescribed = score.trains[ell].times;
        for (double s : window.times[ell]) {
            anchor = std::min(anchor, s);
            for (double p : prescribed)
                for (double off : {0.0, -0.5 * tau0, 0.5 * tau0}) {
                    double tau = s - p + off;
                    tau -= T * std::floor(tau / T);
                    candidates.push_back(tau);
                }
        }
    }
    if (candidates.empty())
        return 0.0;

    double best_val = -1.0;
    for (double tau : candidates)
        best_val = std::max(best_val, objective(tau));

    // The argmax is generically a plateau (flat stretches trade per-neuron
    // matches against each other at constant total), so the selected point
    // must not depend on where the score's origin happens to fall. Ties are
    // resolved by the smallest offset from the earliest windowed spike: a
    // global time shift moves both equally and selects the same alignment.
    double best_tau = candidates.front();
    double best_phase = std::numeric_limits<double>::infinity();
    for (double tau : candidates) {
        if (objective(tau) < best_val - 1e-12)
            continue;
        double phase = anchor - tau;
        phase -= T * std::floor(phase / T);
        if (phase < best_phase) {
            best_phase = phase;
            best_tau = tau;
        }
    }
    return best_tau;
}

AccuracyReport precision_recall(const SimRun& run, const SpikeScore& score,
                                double t0,
                                std::span<const std::uint32_t> subset) {
    if (subset.empty())
        throw ParameterError("precision_recall: empty neuron subset");
    if (t0 + score.period + score.tau0 > run.horizon)
        throw ParameterError("precision_recall: window exceeds run horizon");
    for (auto ell : subset)
        if (ell >= run.firings.size())
            throw ParameterError("precision_recall: neuron index out of range");

    std::vector<std::vector<double>> per_neuron(run.firings.size());
    for (auto ell : subset)
        per_neuron[ell] = run.times(ell);
    const WindowedFirings window =
        window_firings(per_neuron, t0, score.period, score.tau0);

    AccuracyReport report;
    report.neurons.assign(subset.begin(), subset.end());

    std::size_t realized_total = 0;
    for (auto ell : subset)
        realized_total += window.times[ell].size();
    if (realized_total == 0) {
        // Stalled network: precision is defined to be zero (and no prescribed
        // spike is matched, so recall is zero too).
        report.per_neuron_precision.assign(
            subset.size(), std::numeric_limits<double>::quiet_NaN());
        report.per_neuron_recall = report.per_neuron_precision;
        return report;
    }

    report.tau_hat = best_alignment(window, score, subset);

    double pr_sum = 0.0, rc_sum = 0.0;
    std::size_t pr_terms = 0, rc_terms = 0;
    for (auto ell : subset) {
        const auto& realized = window.times[ell];
        const auto& prescribed = score.trains[ell];
        double match = 0.0;
        for (double s : realized)
            match += score_match(prescribed, s - report.tau_hat, score.tau0);

        double pr_term = std::numeric_limits<double>::quiet_NaN();
        double rc_term = std::numeric_limits<double>::quiet_NaN();
        if (!realized.empty()) {
            pr_term = match / static_cast<double>(realized.size());
            pr_sum += pr_term;
            ++pr_terms;
        } else if (!prescribed.empty()) {
            // Silent neuron with prescribed content: counts as zero precision.
            pr_term = 0.0;
            pr_sum += 0.0;
            ++pr_terms;
        } // else: nothing prescribed, nothing realized: vacuous, excluded.
        if (!prescribed.empty()) {
            rc_term = match / static_cast<double>(prescribed.count());
            rc_sum += rc_term;
            ++rc_terms;
        }
        report.per_neuron_precision.push_back(pr_term);
        report.per_neuron_recall.push_back(rc_term);
    }
    report.precision = pr_terms > 0 ? pr_sum / static_cast<double>(pr_terms) : 0.0;
    report.recall = rc_terms > 0 ? rc_sum / static_cast<double>(rc_terms) : 0.0;
    return report;
}

AccuracyReport precision_recall(const SimRun& run, const SpikeScore& score,
                                double t0) {
    std::vector<std::uint32_t> all(run.firings.size());
    std::iota(all.begin(), all.end(), 0u);
    return precision_recall(run, score, t0, all);
}

} // namespace spikemem
