#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "spikemem/network.hpp"
#include "spikemem/spike_train.hpp"

namespace spikemem {

/// All prescribed firings of one period merged into one global order
/// (simultaneous firings break ties by neuron index).
struct GlobalFiringOrder {
    double period = 0.0;
    std::vector<double> times;         // ascending, in [0, period)
    std::vector<std::uint32_t> owner;  // firing neuron per entry

    std::size_t size() const { return times.size(); }
    static GlobalFiringOrder from_score(const SpikeScore& score);
};

/// Linearized jitter propagation: row n holds a_{n,n'} = the normalized
/// sensitivity of firing n to its n'-th predecessor (lag 1..N, influence
/// beyond one period neglected). Every row sums to one by construction.
struct JitterMatrixSeq {
    GlobalFiringOrder order;
    Eigen::MatrixXd rows; // N x N; rows(n, j) = a_{n, j+1}
};

/// Builds the a_{n,n'} from the synthesized weights at the nominal firing
/// times. Throws InvariantError when a firing's total slope is not positive
/// (degenerate crossing; the minimum-slope template condition prevents this,
/// so hitting it is a diagnostic).
JitterMatrixSeq jitter_coefficients(const Network& net, const SpikeScore& score);

/// Companion matrix A_n of row n (first row = coefficients, then a shifted
/// identity) -- exposed for oracle tests.
Eigen::MatrixXd companion_matrix(const JitterMatrixSeq& seq, std::size_t n);

/// Ordered product of one period's companion matrices, exploiting their
/// shift structure (one dot-product row plus a row shift per factor).
Eigen::MatrixXd monodromy(const JitterMatrixSeq& seq);

struct LeadingEigenvalues {
    double phi1 = 0.0;       // largest |eigenvalue|
    double phi2 = 0.0;       // second largest; 0 for 1x1 systems
    double ones_residual = 0.0; // |Phi*1 - 1|_inf (all-ones eigenvector check)
    bool converged = false;
};

LeadingEigenvalues leading_eigenvalues(const Eigen::MatrixXd& phi);

struct StabilityReport {
    std::size_t spikes_per_period = 0;
    double log10_phi1 = 0.0;
    double log10_phi2 = 0.0;
    double ones_residual = 0.0;
    bool pass = false; // |phi1| = 1 (tol 1e-9) and |phi2| < 1
};

StabilityReport stability_report(const Network& net, const SpikeScore& score,
                                 double tol = 1e-9);

} // namespace spikemem
