#pragma once

#include <Eigen/Dense>
#include <vector>

namespace spikemem {

enum class QpStatus { optimal, infeasible, iteration_limit };

struct QpResult {
    Eigen::VectorXd x;
    QpStatus status = QpStatus::iteration_limit;
    int iterations = 0;
    double objective = 0.0;         // 0.5 |x|^2 + linear . x
    std::vector<int> active;        // indices of binding constraints
};

/// Dual active-set method (Goldfarb-Idnani) for the strictly convex QP
///     min 0.5 x'x + linear'x   s.t.   normals.col(i)' x  (= / >=)  rhs(i),
/// where the first `num_equalities` columns are equality constraints (always
/// active, unconstrained duals) and the rest are inequalities. `normals` is
/// n x m, one column per constraint; columns should be roughly unit-norm for
/// the violation tolerance to be meaningful. Starts from the unconstrained
/// minimum and adds the most violated constraint until primal feasible;
/// detects infeasible systems exactly (dual ray).
QpResult solve_least_norm_qp(const Eigen::MatrixXd& normals,
                             const Eigen::VectorXd& rhs,
                             const Eigen::VectorXd& linear,
                             int num_equalities = 0, int max_iterations = 0,
                             double violation_tol = 1e-10);

} // namespace spikemem
