#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "spikemem/network.hpp"
#include "spikemem/qp.hpp"
#include "spikemem/rng.hpp"
#include "spikemem/spike_train.hpp"

namespace spikemem {

enum class Regularization { none, l1, l2 };

/// Parameters of the weight template: a neuron's steady-state potential must
/// cross theta0 exactly at the prescribed firing times, stay below theta0 on
/// the approach, stay below theta_r away from firings, and rise with slope
/// at least thetadot_s through every firing zone, with |w_k| <= w_b.
struct TemplateParams {
    double eps_s = 0.2;        // firing-zone half-width
    double theta_r = 0.0;      // silent-region ceiling
    double thetadot_s = 2.0;   // minimum slope through the firing zone
    double w_b = 0.2;          // weight bound
    Regularization nu = Regularization::l2;
    double dt = 0.02;          // constraint grid step
    double margin = 1e-6;      // slack standing in for strict inequalities
    double feas_tol = 1e-8;    // accepted constraint violation on re-check
    int max_iterations = 0;    // 0 = solver default
    // Pin the potential to theta0 exactly at the prescribed firing times
    // (crossing rows become equalities). The noise-free network then
    // reproduces the score with the firing times themselves, which the
    // linearized jitter analysis assumes.
    bool pin_crossings = true;

    static TemplateParams defaults(double theta0, double tau0);
};

enum class SynthesisStatus { feasible, infeasible, solver_limit };

enum class RowKind : std::uint8_t { fire, pre_fire, silent, slope, box };

/// One neuron's discretized template in ">= rhs" normal form: column i of
/// `normals` dotted with the weight vector must be >= rhs(i), except the
/// first `num_equalities` columns which must hold with equality.
struct ConstraintSystem {
    std::size_t neuron = 0;
    int num_equalities = 0;
    Eigen::MatrixXd normals; // K x M
    Eigen::VectorXd rhs;     // M
    std::vector<RowKind> kinds;
    std::vector<double> times;      // constraint time (box rows: synapse index)
    std::vector<std::uint32_t> score_index;

    std::size_t count(RowKind kind) const;
    /// Worst satisfied margin of a weight vector over all rows (equalities
    /// contribute -|residual|).
    double margin(std::span<const double> weights) const;
};

ConstraintSystem build_constraints(const Network& net, std::size_t neuron,
                                   std::span<const SpikeScore> scores,
                                   const TemplateParams& params);

struct SynthesisResult {
    SynthesisStatus status = SynthesisStatus::infeasible;
    std::vector<double> weights;
    double worst_margin = 0.0;   // min over rows of (lhs - rhs), theta0 units
    double objective = 0.0;      // sum_k |w_k|^nu (NaN for Regularization::none)
    double optimality_gap = 0.0; // certified relative gap (l1 proximal bound)
    int iterations = 0;
};

/// Solves the template for one neuron. The random stream is consumed only in
/// feasibility-only mode (nu = none), which returns the Euclidean projection
/// of a random +-w_b box vertex onto the feasible set.
SynthesisResult solve_weights(const ConstraintSystem& system,
                              const TemplateParams& params, RandomStream& rng);

struct NetworkSynthesis {
    Network network; // weights filled in iff all_feasible
    std::vector<SynthesisResult> per_neuron;
    bool all_feasible = false;
};

/// Independent per-neuron build+solve over the whole network. Weights are
/// written back only when every neuron is feasible. `early_exit` stops at the
/// first infeasible neuron (capacity sweeps).
NetworkSynthesis synthesize_network(const Network& net,
                                    std::span<const SpikeScore> scores,
                                    const TemplateParams& params,
                                    RandomStream& rng, bool early_exit = false);

NetworkSynthesis synthesize_network(const Network& net, const SpikeScore& score,
                                    const TemplateParams& params,
                                    RandomStream& rng, bool early_exit = false);

/// Re-checks every discretized constraint by direct potential evaluation on a
/// `refine`-times finer grid, independent of the solver path. Returns the
/// worst margin in theta0 units. With refine > 1, points within one coarse
/// cell of a region edge are skipped: the continuous-time potential is
/// allowed to blend into the neighboring regime there.
double recheck_worst_margin(const Network& weighted_net, std::size_t neuron,
                            std::span<const SpikeScore> scores,
                            const TemplateParams& params, int refine = 1);

/// Sparse text dump for external cross-checks: header, then one
/// "row col value" triple per nonzero, then the rhs block. Rows are the
/// constraints in ">= rhs" form, columns the K synapse weights.
void dump_constraints(const ConstraintSystem& system, std::ostream& os);

} // namespace spikemem
