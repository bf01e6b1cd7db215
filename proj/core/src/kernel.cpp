#include "spikemem/kernel.hpp"

#include <cmath>

#include "spikemem/errors.hpp"

namespace spikemem {

double kernel_h(double t, double beta) {
    if (t < 0.0)
        return 0.0;
    const double u = t / beta;
    return u * std::exp(1.0 - u);
}

double kernel_h_dot(double t, double beta) {
    if (t < 0.0)
        return 0.0;
    const double u = t / beta;
    return (1.0 - u) * std::exp(1.0 - u) / beta;
}

double kernel_cutoff(double beta, double tol) {
    if (!(beta > 0.0) || !(tol > 0.0) || !(tol < 1.0))
        throw ParameterError("kernel_cutoff: need beta > 0 and tol in (0,1)");
    // Solve u e^{1-u} = tol on the decaying branch: u = 1 - log(tol) + log(u).
    double u = 1.0 - std::log(tol);
    for (int i = 0; i < 64; ++i) {
        const double next = 1.0 - std::log(tol) + std::log(u);
        if (std::abs(next - u) < 1e-14 * u) {
            u = next;
            break;
        }
        u = next;
    }
    return u * beta;
}

// sum_j h(x + jT) = e^{1-x/b}/b * sum_j (x + jT) r^j   with r = e^{-T/b}
//                 = e^{1-x/b}/b * (x/(1-r) + T r/(1-r)^2)
double periodic_kernel_sum(double x, double period, double beta) {
    if (!(period > 0.0) || !(beta > 0.0))
        throw ParameterError("periodic_kernel_sum: need period, beta > 0");
    if (x < 0.0 || x >= period)
        x -= period * std::floor(x / period);
    const double r = std::exp(-period / beta);
    const double one_minus_r = 1.0 - r;
    return std::exp(1.0 - x / beta) * (x + period * r / one_minus_r) /
           (beta * one_minus_r);
}

double periodic_kernel_sum_dot(double x, double period, double beta) {
    if (!(period > 0.0) || !(beta > 0.0))
        throw ParameterError("periodic_kernel_sum_dot: need period, beta > 0");
    if (x < 0.0 || x >= period)
        x -= period * std::floor(x / period);
    const double r = std::exp(-period / beta);
    const double one_minus_r = 1.0 - r;
    const double s = x + period * r / one_minus_r;
    return std::exp(1.0 - x / beta) * (1.0 - s / beta) / (beta * one_minus_r);
}

} // namespace spikemem
