#include "spikemem/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spikemem/errors.hpp"

namespace spikemem {

namespace {

// Lower regularized incomplete gamma by series (x < a + 1).
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-15)
            break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized incomplete gamma by continued fraction (x >= a + 1).
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny)
            d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15)
            break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace

double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0)
        throw ParameterError("regularized_gamma_q: need a > 0, x >= 0");
    if (x == 0.0)
        return 1.0;
    if (x < a + 1.0)
        return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi_square_pvalue(double statistic, int dof) {
    if (dof <= 0)
        throw ParameterError("chi_square_pvalue: dof must be positive");
    return regularized_gamma_q(0.5 * dof, 0.5 * statistic);
}

double chi_square_test(std::span<const double> observed,
                       std::span<const double> expected, double min_expected,
                       int extra_constraints) {
    if (observed.size() != expected.size() || observed.empty())
        throw ParameterError("chi_square_test: size mismatch");
    // Pool sparse bins (scanning from the right, where tails live).
    std::vector<double> obs(observed.begin(), observed.end());
    std::vector<double> exp(expected.begin(), expected.end());
    std::vector<double> obs_pooled, exp_pooled;
    double o_acc = 0.0, e_acc = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        o_acc += obs[i];
        e_acc += exp[i];
        if (e_acc >= min_expected) {
            obs_pooled.push_back(o_acc);
            exp_pooled.push_back(e_acc);
            o_acc = e_acc = 0.0;
        }
    }
    if (e_acc > 0.0) {
        if (exp_pooled.empty()) {
            obs_pooled.push_back(o_acc);
            exp_pooled.push_back(e_acc);
        } else {
            obs_pooled.back() += o_acc;
            exp_pooled.back() += e_acc;
        }
    }
    const int dof =
        static_cast<int>(obs_pooled.size()) - 1 - extra_constraints;
    if (dof <= 0)
        return 1.0;
    double stat = 0.0;
    for (std::size_t i = 0; i < obs_pooled.size(); ++i) {
        const double diff = obs_pooled[i] - exp_pooled[i];
        stat += diff * diff / exp_pooled[i];
    }
    return chi_square_pvalue(stat, dof);
}

double ks_test(std::vector<double> samples,
               const std::function<double(double)>& cdf) {
    if (samples.empty())
        throw ParameterError("ks_test: no samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max(d, std::max(std::abs(f - lo), std::abs(hi - f)));
    }
    const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
    double p = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        const double term =
            sign * 2.0 * std::exp(-2.0 * j * j * lambda * lambda);
        p += term;
        if (std::abs(term) < 1e-12)
            break;
        sign = -sign;
    }
    return std::clamp(p, 0.0, 1.0);
}

double median(std::vector<double> values) {
    if (values.empty())
        return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2]
                      : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

Summary summarize(std::vector<double> values) {
    Summary s;
    if (values.empty()) {
        s.min = s.med = s.max = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    std::sort(values.begin(), values.end());
    s.min = values.front();
    s.max = values.back();
    const std::size_t n = values.size();
    s.med = n % 2 == 1 ? values[n / 2]
                       : 0.5 * (values[n / 2 - 1] + values[n / 2]);
    return s;
}

LogisticFit fit_logistic_decreasing(
    std::span<const std::pair<double, double>> points) {
    if (points.size() < 2)
        throw ParameterError("fit_logistic_decreasing: need >= 2 points");
    LogisticFit fit;

    double t_min = points[0].first, t_max = points[0].first;
    bool any_low = false, any_high = false;
    for (const auto& [t, p] : points) {
        t_min = std::min(t_min, t);
        t_max = std::max(t_max, t);
        if (p > 0.5)
            any_high = true;
        if (p < 0.5)
            any_low = true;
    }
    if (!any_low || !any_high) {
        fit.crossover_is_bound = true;
        fit.b = any_high ? t_max : t_min; // feasible everywhere: b beyond grid
        fit.a = 0.0;
        return fit;
    }

    auto sse = [&](double a, double b) {
        double acc = 0.0;
        for (const auto& [t, p] : points) {
            const double model = 1.0 / (1.0 + std::exp(a * (t - b)));
            acc += (p - model) * (p - model);
        }
        return acc;
    };

    // Deterministic coarse grid, then coordinate refinement.
    const double span = std::max(t_max - t_min, 1e-9);
    double best_a = 1.0, best_b = 0.5 * (t_min + t_max);
    double best = std::numeric_limits<double>::infinity();
    for (int ia = 0; ia < 40; ++ia) {
        const double a = 0.02 * std::pow(1000.0, ia / 39.0); // 0.02 .. 20
        for (int ib = 0; ib <= 160; ++ib) {
            const double b =
                t_min - 0.25 * span + 1.5 * span * ib / 160.0;
            const double v = sse(a, b);
            if (v < best) {
                best = v;
                best_a = a;
                best_b = b;
            }
        }
    }
    double step_a = best_a * 0.25, step_b = span / 160.0;
    for (int round = 0; round < 60; ++round) {
        bool improved = false;
        for (const double da : {-step_a, step_a}) {
            if (best_a + da > 0.0 && sse(best_a + da, best_b) < best) {
                best = sse(best_a + da, best_b);
                best_a += da;
                improved = true;
            }
        }
        for (const double db : {-step_b, step_b}) {
            if (sse(best_a, best_b + db) < best) {
                best = sse(best_a, best_b + db);
                best_b += db;
                improved = true;
            }
        }
        if (!improved) {
            step_a *= 0.5;
            step_b *= 0.5;
            if (step_a < 1e-9 && step_b < 1e-9)
                break;
        }
    }
    fit.a = best_a;
    fit.b = best_b;
    fit.sse = best;
    return fit;
}

} // namespace spikemem
