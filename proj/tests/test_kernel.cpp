#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spikemem/kernel.hpp"
#include "spikemem/rng.hpp"

using namespace spikemem;

TEST_CASE("pulse shape") {
    CHECK(kernel_h(0.0, 1.0) == 0.0);
    CHECK(kernel_h(-0.5, 1.0) == 0.0);
    for (double beta : {0.3, 1.0, 2.5}) {
        CHECK(kernel_h(beta, beta) == doctest::Approx(1.0).epsilon(1e-15));
        for (double t = 0.0; t < 10.0 * beta; t += 0.01 * beta)
            CHECK(kernel_h(t, beta) <= 1.0 + 1e-15);
    }
    // h(2 beta) = 2/e, high-precision
    CHECK(kernel_h(2.0, 1.0) ==
          doctest::Approx(0.7357588823428847).epsilon(1e-12));
}

TEST_CASE("pulse derivative") {
    CHECK(kernel_h_dot(1.0, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(kernel_h_dot(0.0, 1.0) ==
          doctest::Approx(std::exp(1.0)).epsilon(1e-14));
    CHECK(kernel_h_dot(0.0, 2.0) ==
          doctest::Approx(std::exp(1.0) / 2.0).epsilon(1e-14));
    for (double beta : {0.5, 1.0, 3.0}) {
        const double eps = 1e-6 * beta;
        for (double t : {0.5 * beta, 1.5 * beta, 4.0 * beta}) {
            const double fd =
                (kernel_h(t + eps, beta) - kernel_h(t - eps, beta)) / (2 * eps);
            CHECK(kernel_h_dot(t, beta) == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("support cutoff") {
    for (double beta : {0.5, 1.0, 2.0}) {
        const double t_cut = kernel_cutoff(beta);
        CHECK(kernel_h(t_cut, beta) == doctest::Approx(1e-10).epsilon(1e-6));
        CHECK(t_cut / beta == doctest::Approx(27.33).epsilon(0.001));
        CHECK(kernel_h(t_cut * 1.0000001, beta) < 1e-10);
    }
}

TEST_CASE("periodic pulse sum matches brute-force images") {
    RandomStream rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const double beta = rng.uniform(0.3, 3.0);
        const double period = rng.uniform(4.0, 80.0);
        const double x = rng.uniform(0.0, period);
        double brute = 0.0;
        for (int j = 0; j < 4000; ++j) {
            const double term = kernel_h(x + j * period, beta);
            brute += term;
            if (j > 2 && term < 1e-18)
                break;
        }
        CHECK(periodic_kernel_sum(x, period, beta) ==
              doctest::Approx(brute).epsilon(1e-12));

        double brute_dot = 0.0;
        for (int j = 0; j < 4000; ++j) {
            const double term = kernel_h_dot(x + j * period, beta);
            brute_dot += term;
            if (j > 2 && std::abs(term) < 1e-18)
                break;
        }
        CHECK(periodic_kernel_sum_dot(x, period, beta) ==
              doctest::Approx(brute_dot).epsilon(1e-10));
    }
}

TEST_CASE("periodic sum derivative consistency") {
    for (double x : {0.1, 0.9, 3.7}) {
        const double eps = 1e-7;
        const double fd = (periodic_kernel_sum(x + eps, 10.0, 1.0) -
                           periodic_kernel_sum(x - eps, 10.0, 1.0)) /
                          (2 * eps);
        CHECK(periodic_kernel_sum_dot(x, 10.0, 1.0) ==
              doctest::Approx(fd).epsilon(1e-6));
    }
}
