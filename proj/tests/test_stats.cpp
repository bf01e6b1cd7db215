#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <utility>
#include <vector>

#include "spikemem/rng.hpp"
#include "spikemem/stats.hpp"

using namespace spikemem;

TEST_CASE("chi-square p-values against known quantiles") {
    // chi2(0.95; 3) = 7.8147, chi2(0.99; 10) = 23.209
    CHECK(chi_square_pvalue(7.8147, 3) == doctest::Approx(0.05).epsilon(1e-3));
    CHECK(chi_square_pvalue(23.209, 10) == doctest::Approx(0.01).epsilon(1e-3));
    CHECK(chi_square_pvalue(0.0, 5) == doctest::Approx(1.0));
}

TEST_CASE("chi-square test accepts true distribution, rejects wrong one") {
    RandomStream rng(1);
    std::vector<double> expected = {500, 300, 150, 50};
    std::vector<double> observed(4, 0.0);
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform();
        observed[u < 0.5 ? 0 : u < 0.8 ? 1 : u < 0.95 ? 2 : 3] += 1.0;
    }
    CHECK(chi_square_test(observed, expected) > 0.01);
    std::vector<double> wrong = {250, 250, 250, 250};
    CHECK(chi_square_test(observed, wrong) < 1e-6);
}

TEST_CASE("ks test on uniform samples") {
    RandomStream rng(2);
    std::vector<double> good, bad;
    for (int i = 0; i < 5000; ++i) {
        good.push_back(rng.uniform());
        bad.push_back(std::pow(rng.uniform(), 1.3));
    }
    auto unit_cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
    CHECK(ks_test(std::move(good), unit_cdf) > 0.01);
    CHECK(ks_test(std::move(bad), unit_cdf) < 1e-6);
}

TEST_CASE("summary ordering") {
    const Summary s = summarize({3.0, 1.0, 2.0, 5.0});
    CHECK(s.min == 1.0);
    CHECK(s.med == 2.5);
    CHECK(s.max == 5.0);
    CHECK(median({4.0, 1.0, 9.0}) == 4.0);
}

TEST_CASE("logistic fit recovers a step location") {
    // synthetic step data: feasible below T = 35, infeasible above
    std::vector<std::pair<double, double>> pts;
    for (double t = 10.0; t <= 60.0; t += 5.0)
        pts.emplace_back(t, t < 35.0 ? 1.0 : 0.0);
    const LogisticFit fit = fit_logistic_decreasing(pts);
    CHECK_FALSE(fit.crossover_is_bound);
    CHECK(std::abs(fit.b - 35.0) <= 5.0); // within grid spacing
}

TEST_CASE("logistic fit recovers smooth logistic parameters") {
    std::vector<std::pair<double, double>> pts;
    for (double t = 20.0; t <= 80.0; t += 4.0)
        pts.emplace_back(t, 1.0 / (1.0 + std::exp(0.3 * (t - 47.0))));
    const LogisticFit fit = fit_logistic_decreasing(pts);
    CHECK(fit.b == doctest::Approx(47.0).epsilon(0.02));
    CHECK(fit.a == doctest::Approx(0.3).epsilon(0.05));
}

TEST_CASE("degenerate fits report bounds") {
    std::vector<std::pair<double, double>> all_ones = {{10, 1.0}, {20, 1.0}};
    auto fit = fit_logistic_decreasing(all_ones);
    CHECK(fit.crossover_is_bound);
    CHECK(fit.b == 20.0);
    std::vector<std::pair<double, double>> all_zero = {{10, 0.0}, {20, 0.0}};
    fit = fit_logistic_decreasing(all_zero);
    CHECK(fit.crossover_is_bound);
    CHECK(fit.b == 10.0);
}
