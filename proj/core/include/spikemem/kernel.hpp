#pragma once

namespace spikemem {

/// Synaptic pulse h(t) = (t/beta) exp(1 - t/beta) for t >= 0, else 0.
/// Peaks at t = beta with h(beta) = 1.
double kernel_h(double t, double beta);

/// dh/dt; equals e/beta at t -> 0+ and 0 at the peak t = beta.
double kernel_h_dot(double t, double beta);

/// Support cutoff: smallest t_cut > beta with h(t_cut) = tol (default 1e-10,
/// t_cut ~ 26.9 beta). Beyond it a pulse contributes less than tol*|w|.
double kernel_cutoff(double beta, double tol = 1e-10);

/// Steady-state periodic pulse sum sum_{j>=0} h(x + jT) for x in [0, T),
/// evaluated in closed form (geometric series in exp(-T/beta)).
double periodic_kernel_sum(double x, double period, double beta);

/// d/dx of periodic_kernel_sum.
double periodic_kernel_sum_dot(double x, double period, double beta);

} // namespace spikemem
