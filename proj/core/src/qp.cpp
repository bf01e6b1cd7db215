#include "spikemem/qp.hpp"

#include <cmath>
#include <limits>

#include "spikemem/errors.hpp"

namespace spikemem {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Plane rotation zeroing b in (a, b); returns (c, s) with
// [c s; -s c] [a; b] = [r; 0].
struct Givens {
    double c, s;
    static Givens make(double a, double b) {
        if (b == 0.0)
            return {1.0, 0.0};
        const double r = std::hypot(a, b);
        return {a / r, b / r};
    }
};

} // namespace

QpResult solve_least_norm_qp(const Eigen::MatrixXd& normals,
                             const Eigen::VectorXd& rhs,
                             const Eigen::VectorXd& linear,
                             int num_equalities, int max_iterations,
                             double violation_tol) {
    const int n = static_cast<int>(normals.rows());
    const int m = static_cast<int>(normals.cols());
    if (rhs.size() != m || linear.size() != n)
        throw ParameterError("solve_least_norm_qp: dimension mismatch");
    if (num_equalities < 0 || num_equalities > m)
        throw ParameterError("solve_least_norm_qp: bad equality count");
    if (max_iterations <= 0)
        max_iterations = 50 * n + 10 * m + 1000;

    QpResult res;
    res.x = -linear; // unconstrained minimum of 0.5|x|^2 + linear.x
    if (m == 0) {
        res.status = QpStatus::optimal;
        res.objective = -0.5 * linear.squaredNorm();
        return res;
    }

    // Active-set factorization: N = J * [R; 0] with J orthogonal (n x n)
    // and R upper triangular (q x q).
    Eigen::MatrixXd J = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
    std::vector<int> active;
    std::vector<double> dual;
    std::vector<char> active_is_eq;
    std::vector<char> is_active(m, 0);
    int q = 0;

    Eigen::VectorXd d(n), z(n), r(n);
    Eigen::VectorXd slack(m);

    auto add_to_factorization = [&](const Eigen::VectorXd& dvec) {
        // dvec = J^T np with its tail rotated onto entry q by the caller.
        R.col(q).head(q + 1) = dvec.head(q + 1);
    };

    auto rotate_tail = [&](Eigen::VectorXd& dvec) {
        for (int j = n - 1; j > q; --j) {
            const Givens g = Givens::make(dvec(j - 1), dvec(j));
            const double a = dvec(j - 1), b = dvec(j);
            dvec(j - 1) = g.c * a + g.s * b;
            dvec(j) = 0.0;
            for (int row = 0; row < n; ++row) {
                const double ja = J(row, j - 1), jb = J(row, j);
                J(row, j - 1) = g.c * ja + g.s * jb;
                J(row, j) = -g.s * ja + g.c * jb;
            }
        }
    };

    auto drop_constraint = [&](int l) {
        is_active[static_cast<std::size_t>(active[l])] = 0;
        active.erase(active.begin() + l);
        dual.erase(dual.begin() + l);
        active_is_eq.erase(active_is_eq.begin() + l);
        // Shift R columns left past l, then restore triangularity.
        for (int j = l; j < q - 1; ++j)
            R.col(j).head(q) = R.col(j + 1).head(q);
        R.col(q - 1).head(q).setZero();
        --q;
        for (int j = l; j < q; ++j) {
            const Givens g = Givens::make(R(j, j), R(j + 1, j));
            // Rows j, j+1 of R across remaining columns.
            for (int col = j; col < q; ++col) {
                const double a = R(j, col), b = R(j + 1, col);
                R(j, col) = g.c * a + g.s * b;
                R(j + 1, col) = -g.s * a + g.c * b;
            }
            // Same rotation on columns j, j+1 of J (J <- J * G^T).
            for (int row = 0; row < n; ++row) {
                const double a = J(row, j), b = J(row, j + 1);
                J(row, j) = g.c * a + g.s * b;
                J(row, j + 1) = -g.s * a + g.c * b;
            }
        }
    };

    // Equality constraints first: step onto each hyperplane, keep it active
    // forever with an unconstrained dual.
    for (int i = 0; i < num_equalities; ++i) {
        const auto np = normals.col(i);
        d.noalias() = J.transpose() * np;
        if (q < n)
            z.noalias() = J.rightCols(n - q) * d.tail(n - q);
        else
            z.setZero();
        const double znp = z.dot(np);
        const double s_i = np.dot(res.x) - rhs(i);
        if (znp <= 1e-14 * (1.0 + np.squaredNorm())) {
            // dependent on previous equalities: consistent -> redundant
            if (std::abs(s_i) <= violation_tol)
                continue;
            res.status = QpStatus::infeasible;
            res.objective = 0.5 * res.x.squaredNorm() + linear.dot(res.x);
            res.active = active;
            return res;
        }
        const double t = -s_i / znp;
        res.x += t * z;
        if (q > 0) {
            r.head(q) = R.topLeftCorner(q, q)
                            .triangularView<Eigen::Upper>()
                            .solve(d.head(q));
            for (int k = 0; k < q; ++k)
                dual[static_cast<std::size_t>(k)] -= t * r(k);
        }
        rotate_tail(d);
        add_to_factorization(d);
        active.push_back(i);
        dual.push_back(t);
        active_is_eq.push_back(1);
        is_active[static_cast<std::size_t>(i)] = 1;
        ++q;
    }

    int iter = 0;
    while (true) {
        // Most violated inactive constraint.
        slack.noalias() = normals.transpose() * res.x;
        slack -= rhs;
        int ip = -1;
        double worst = -violation_tol;
        for (int i = 0; i < m; ++i) {
            if (!is_active[static_cast<std::size_t>(i)] && slack(i) < worst) {
                worst = slack(i);
                ip = i;
            }
        }
        if (ip < 0) {
            res.status = QpStatus::optimal;
            break;
        }

        const auto np = normals.col(ip);
        double u_plus = 0.0;

        while (true) {
            if (++iter > max_iterations) {
                res.status = QpStatus::iteration_limit;
                res.iterations = iter;
                res.objective = 0.5 * res.x.squaredNorm() + linear.dot(res.x);
                res.active = active;
                return res;
            }

            d.noalias() = J.transpose() * np;
            // Primal direction: component of np outside span of active normals.
            if (q < n)
                z.noalias() = J.rightCols(n - q) * d.tail(n - q);
            else
                z.setZero();
            // Dual direction: R r = d_1.
            if (q > 0)
                r.head(q) = R.topLeftCorner(q, q)
                                .triangularView<Eigen::Upper>()
                                .solve(d.head(q));

            double t1 = kInf;
            int l = -1;
            for (int k = 0; k < q; ++k) {
                if (active_is_eq[static_cast<std::size_t>(k)])
                    continue; // equalities never block or drop
                if (r(k) > 1e-14) {
                    const double step = dual[static_cast<std::size_t>(k)] / r(k);
                    if (step < t1) {
                        t1 = step;
                        l = k;
                    }
                }
            }

            const double znp = z.dot(np);
            double t2 = kInf;
            if (znp > 1e-14 * (1.0 + np.squaredNorm())) {
                const double s_ip = np.dot(res.x) - rhs(ip);
                t2 = -s_ip / znp;
            }

            const double t = std::min(t1, t2);
            if (t == kInf) {
                res.status = QpStatus::infeasible;
                res.iterations = iter;
                res.objective = 0.5 * res.x.squaredNorm() + linear.dot(res.x);
                res.active = active;
                return res;
            }

            if (t2 == kInf) {
                // Dual-only step: move duals, drop the blocking constraint.
                for (int k = 0; k < q; ++k)
                    dual[static_cast<std::size_t>(k)] -= t * r(k);
                u_plus += t;
                drop_constraint(l);
                continue;
            }

            res.x += t * z;
            for (int k = 0; k < q; ++k)
                dual[static_cast<std::size_t>(k)] -= t * r(k);
            u_plus += t;

            if (t == t2) {
                // Full step: ip becomes active.
                rotate_tail(d);
                add_to_factorization(d);
                active.push_back(ip);
                dual.push_back(u_plus);
                active_is_eq.push_back(0);
                is_active[static_cast<std::size_t>(ip)] = 1;
                ++q;
                break;
            }
            // Partial step: drop blocker, stay on the same entering constraint.
            drop_constraint(l);
        }
    }

    res.iterations = iter;
    res.objective = 0.5 * res.x.squaredNorm() + linear.dot(res.x);
    res.active = active;
    return res;
}

} // namespace spikemem
