#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace spikemem {

/// Upper regularized incomplete gamma Q(a, x).
double regularized_gamma_q(double a, double x);

/// p-value of a chi-square statistic with `dof` degrees of freedom.
double chi_square_pvalue(double statistic, int dof);

/// Pearson chi-square test of observed counts against expected counts.
/// Bins with expected count below `min_expected` are pooled from the tail.
/// Returns the p-value; dof = bins - 1 - extra_constraints.
double chi_square_test(std::span<const double> observed,
                       std::span<const double> expected,
                       double min_expected = 5.0, int extra_constraints = 0);

/// One-sample Kolmogorov-Smirnov test against a CDF; asymptotic p-value.
double ks_test(std::vector<double> samples,
               const std::function<double(double)>& cdf);

struct Summary {
    double min = 0.0, med = 0.0, max = 0.0;
};
Summary summarize(std::vector<double> values);
double median(std::vector<double> values);

/// Least-squares fit of a decreasing logistic p(T) = 1/(1 + exp(a (T - b)))
/// to empirical points; `b` is the 50% crossover. Degenerate data (all
/// points on one side of 0.5) reports the nearest grid bound instead.
struct LogisticFit {
    double a = 0.0;
    double b = 0.0;
    double sse = 0.0;
    bool crossover_is_bound = false;
};
LogisticFit fit_logistic_decreasing(
    std::span<const std::pair<double, double>> points);

} // namespace spikemem
