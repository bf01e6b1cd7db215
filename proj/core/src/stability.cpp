#include "spikemem/stability.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>

#include "spikemem/errors.hpp"
#include "spikemem/kernel.hpp"

namespace spikemem {

GlobalFiringOrder GlobalFiringOrder::from_score(const SpikeScore& score) {
    GlobalFiringOrder order;
    order.period = score.period;
    struct Entry {
        double time;
        std::uint32_t owner;
    };
    std::vector<Entry> entries;
    entries.reserve(score.total_spikes());
    for (std::uint32_t ell = 0; ell < score.trains.size(); ++ell)
        for (double t : score.trains[ell].times)
            entries.push_back({t, ell});
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.time != b.time)
            return a.time < b.time;
        return a.owner < b.owner;
    });
    order.times.reserve(entries.size());
    order.owner.reserve(entries.size());
    for (const auto& e : entries) {
        order.times.push_back(e.time);
        order.owner.push_back(e.owner);
    }
    return order;
}

JitterMatrixSeq jitter_coefficients(const Network& net,
                                    const SpikeScore& score) {
    validate_network(net);
    JitterMatrixSeq seq;
    seq.order = GlobalFiringOrder::from_score(score);
    const std::size_t N = seq.order.size();
    if (N == 0)
        throw ParameterError("jitter_coefficients: empty score");
    const double T = score.period;
    seq.rows.setZero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));

    // Per target neuron, group its synapses by source for the K(n,n') sums.
    std::vector<std::vector<std::pair<double, double>>> by_source(net.size());
    for (std::uint32_t ell = 0; ell < net.size(); ++ell) {
        if (score.trains[ell].empty())
            continue;
        for (auto& v : by_source)
            v.clear();
        for (const auto& syn : net.neurons[ell].synapses)
            if (syn.weight != 0.0)
                by_source[syn.source].emplace_back(syn.delay, syn.weight);

        for (std::size_t n = 0; n < N; ++n) {
            if (seq.order.owner[n] != ell)
                continue;
            const double s_n = seq.order.times[n];
            double total = 0.0;
            for (std::size_t lag = 1; lag <= N; ++lag) {
                const std::size_t raw = n + N - lag;
                const std::size_t pred = raw % N;
                const double wrap = (raw < N) ? T : 0.0;
                const double s_pred = seq.order.times[pred] - wrap;
                double slope = 0.0;
                for (const auto& [delay, weight] :
                     by_source[seq.order.owner[pred]])
                    slope += weight * kernel_h_dot(s_n - delay - s_pred,
                                                   net.beta);
                seq.rows(static_cast<Eigen::Index>(n),
                         static_cast<Eigen::Index>(lag - 1)) = slope;
                total += slope;
            }
            if (!(total > 0.0))
                throw InvariantError(
                    "jitter_coefficients: non-positive crossing slope "
                    "(degenerate firing) at spike " +
                    std::to_string(n));
            seq.rows.row(static_cast<Eigen::Index>(n)) /= total;
        }
    }
    return seq;
}

Eigen::MatrixXd companion_matrix(const JitterMatrixSeq& seq, std::size_t n) {
    const auto N = seq.rows.rows();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(N, N);
    a.row(0) = seq.rows.row(static_cast<Eigen::Index>(n));
    a.block(1, 0, N - 1, N - 1).setIdentity();
    return a;
}

Eigen::MatrixXd monodromy(const JitterMatrixSeq& seq) {
    const auto N = seq.rows.rows();
    Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(N, N);
    Eigen::RowVectorXd top(N);
    for (Eigen::Index n = 0; n < N; ++n) {
        top.noalias() = seq.rows.row(n) * phi;
        // A_n * phi: new top row, remaining rows shift down by one.
        for (Eigen::Index r = N - 1; r >= 1; --r)
            phi.row(r) = phi.row(r - 1);
        phi.row(0) = top;
    }
    return phi;
}

LeadingEigenvalues leading_eigenvalues(const Eigen::MatrixXd& phi) {
    LeadingEigenvalues out;
    const auto N = phi.rows();
    out.ones_residual =
        (phi * Eigen::VectorXd::Ones(N) - Eigen::VectorXd::Ones(N))
            .cwiseAbs()
            .maxCoeff();
    if (N == 1) {
        out.phi1 = std::abs(phi(0, 0));
        out.phi2 = 0.0;
        out.converged = true;
        return out;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(phi, false);
    if (solver.info() != Eigen::Success)
        return out; // converged stays false: solver-limit
    std::vector<double> magnitudes(static_cast<std::size_t>(N));
    for (Eigen::Index i = 0; i < N; ++i)
        magnitudes[static_cast<std::size_t>(i)] =
            std::abs(solver.eigenvalues()(i));
    std::sort(magnitudes.rbegin(), magnitudes.rend());
    out.phi1 = magnitudes[0];
    out.phi2 = magnitudes[1];
    out.converged = true;
    return out;
}

StabilityReport stability_report(const Network& net, const SpikeScore& score,
                                 double tol) {
    const auto seq = jitter_coefficients(net, score);
    const auto phi = monodromy(seq);
    const auto eig = leading_eigenvalues(phi);
    StabilityReport report;
    report.spikes_per_period = seq.order.size();
    report.log10_phi1 = std::log10(eig.phi1);
    report.log10_phi2 = std::log10(eig.phi2);
    report.ones_residual = eig.ones_residual;
    report.pass = eig.converged && std::abs(eig.phi1 - 1.0) <= tol &&
                  eig.phi2 < 1.0;
    return report;
}

} // namespace spikemem
