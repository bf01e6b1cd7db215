#include "spikemem/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "spikemem/errors.hpp"
#include "spikemem/kernel.hpp"
#include "spikemem/potential.hpp"
#include "spikemem/thread_pool.hpp"

namespace spikemem {

TemplateParams TemplateParams::defaults(double theta0, double tau0) {
    TemplateParams p;
    p.eps_s = 0.2 * tau0;
    p.theta_r = 0.0;
    p.thetadot_s = 2.0 * theta0 / tau0;
    p.w_b = 0.2 * theta0;
    p.nu = Regularization::l2;
    p.dt = tau0 / 50.0;
    p.margin = 1e-6 * theta0;
    p.feas_tol = 1e-8 * theta0;
    return p;
}

std::size_t ConstraintSystem::count(RowKind kind) const {
    return static_cast<std::size_t>(
        std::count(kinds.begin(), kinds.end(), kind));
}

namespace {

constexpr double kBoundaryEps = 1e-12; // relative to the period

struct GridRegions {
    std::vector<std::uint8_t> pre;    // z <= theta0 - margin
    std::vector<std::uint8_t> silent; // z <= theta_r (- margin)
    std::vector<std::uint8_t> slope;  // zdot >= thetadot_s + margin'
};

// Region membership on the periodic grid t_i = i * (T/G). Intervals around
// each firing are open; grid points within eps of an endpoint resolve as
// outside. Pre-fire rows stand off the firing instant by half a cell, since
// the potential legitimately reaches theta0 exactly at the firing time.
GridRegions classify_grid(const SpikeTrain& train, double tau0, double eps_s,
                          std::size_t grid_points, double step) {
    const double T = train.period;
    const double eps = kBoundaryEps * T;
    GridRegions regions;
    regions.pre.assign(grid_points, 0);
    regions.silent.assign(grid_points, 1);
    regions.slope.assign(grid_points, 0);

    auto mark_open = [&](std::vector<std::uint8_t>& mask, double lo, double hi,
                         std::uint8_t value) {
        // grid indices with lo < t < hi, modulo T
        const auto i_first = static_cast<long>(std::floor((lo + eps) / step)) + 1;
        const auto i_last = static_cast<long>(std::ceil((hi - eps) / step)) - 1;
        for (long i = i_first; i <= i_last; ++i) {
            long j = i % static_cast<long>(grid_points);
            if (j < 0)
                j += static_cast<long>(grid_points);
            mask[static_cast<std::size_t>(j)] = value;
        }
    };

    for (double s : train.times) {
        mark_open(regions.silent, s - eps_s, s + tau0, 0);
        mark_open(regions.slope, s - eps_s, s + eps_s, 1);
        // (s - eps_s, s - step/2]: the upper end is closed, so nudge it.
        mark_open(regions.pre, s - eps_s, s - 0.5 * step + 2.0 * eps, 1);
    }
    return regions;
}

// Adds per-synapse steady-state potential values and derivatives on the grid
// into val(k, i), dot(k, i). Incremental exponentials: one multiply per grid
// step per (synapse, source spike) instead of an exp() call.
void fill_grids(const Network& net, std::size_t neuron, const SpikeScore& score,
                std::size_t grid_points, double step, Eigen::MatrixXd& val,
                Eigen::MatrixXd& dot) {
    const double T = score.period;
    const double beta = net.beta;
    const double r = std::exp(-T / beta);
    const double amp = std::exp(1.0) / (beta * (1.0 - r));
    const double c2 = T * r / (1.0 - r);
    const double decay = std::exp(-step / beta);
    const double wrap = std::exp(T / beta);

    const auto& synapses = net.neurons[neuron].synapses;
    val.setZero(static_cast<Eigen::Index>(synapses.size()),
                static_cast<Eigen::Index>(grid_points));
    dot.setZero(static_cast<Eigen::Index>(synapses.size()),
                static_cast<Eigen::Index>(grid_points));

    for (std::size_t k = 0; k < synapses.size(); ++k) {
        const auto& syn = synapses[k];
        for (double s : score.trains[syn.source].times) {
            double x = -syn.delay - s;
            x -= T * std::floor(x / T);
            double e = amp * std::exp(-x / beta);
            for (std::size_t i = 0; i < grid_points; ++i) {
                const double term = e * (x + c2);
                val(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) += term;
                dot(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) +=
                    e - term / beta;
                x += step;
                e *= decay;
                if (x >= T) {
                    x -= T;
                    e *= wrap;
                }
            }
        }
    }
}

std::size_t grid_count(double period, double dt) {
    return std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(period / dt)));
}

} // namespace

ConstraintSystem build_constraints(const Network& net, std::size_t neuron,
                                   std::span<const SpikeScore> scores,
                                   const TemplateParams& params) {
    if (neuron >= net.size())
        throw ParameterError("build_constraints: neuron index out of range");
    if (scores.empty())
        throw ParameterError("build_constraints: need at least one score");
    if (!(params.dt > 0.0) || !(params.eps_s > 0.0))
        throw ParameterError("build_constraints: need dt, eps_s > 0");

    const std::size_t K = net.inputs_per_neuron();
    const double theta0 = net.theta0;
    const double tau0 = net.tau0;
    const double slope_margin = params.margin / tau0;

    std::vector<GridRegions> regions(scores.size());
    std::vector<std::size_t> grids(scores.size());
    std::vector<double> steps(scores.size());
    std::size_t fire_rows = 0, grid_rows = 0;
    for (std::size_t q = 0; q < scores.size(); ++q) {
        const auto& score = scores[q];
        grids[q] = grid_count(score.period, params.dt);
        steps[q] = score.period / static_cast<double>(grids[q]);
        regions[q] = classify_grid(score.trains[neuron], tau0, params.eps_s,
                                   grids[q], steps[q]);
        fire_rows += score.trains[neuron].count();
        grid_rows += score.trains[neuron].count(); // exact slope rows
        for (std::size_t i = 0; i < grids[q]; ++i)
            grid_rows += (regions[q].pre[i] ? 1u : 0u) +
                         (regions[q].silent[i] ? 1u : 0u) +
                         (regions[q].slope[i] ? 1u : 0u);
    }

    ConstraintSystem sys;
    sys.neuron = neuron;
    sys.num_equalities = params.pin_crossings ? static_cast<int>(fire_rows) : 0;
    const std::size_t M = fire_rows + grid_rows + 2 * K;
    sys.normals.resize(static_cast<Eigen::Index>(K),
                       static_cast<Eigen::Index>(M));
    sys.rhs.resize(static_cast<Eigen::Index>(M));
    sys.kinds.reserve(M);
    sys.times.reserve(M);
    sys.score_index.reserve(M);

    std::size_t col = 0;
    auto emit = [&](RowKind kind, double time, std::uint32_t q, double rhs) {
        sys.rhs(static_cast<Eigen::Index>(col)) = rhs;
        sys.kinds.push_back(kind);
        sys.times.push_back(time);
        sys.score_index.push_back(q);
        return static_cast<Eigen::Index>(col++);
    };

    // Crossing rows z(s) = theta0 first (equalities when pinned).
    for (std::uint32_t q = 0; q < scores.size(); ++q)
        for (double s : scores[q].trains[neuron].times) {
            const auto c = emit(RowKind::fire, s, q, theta0);
            for (std::size_t k = 0; k < K; ++k)
                sys.normals(static_cast<Eigen::Index>(k), c) =
                    periodic_coefficient(net, neuron, k, scores[q], s);
        }

    Eigen::MatrixXd val, dot;
    for (std::uint32_t q = 0; q < scores.size(); ++q) {
        const auto& score = scores[q];
        const auto& train = score.trains[neuron];
        const bool silent_neuron = train.empty();
        fill_grids(net, neuron, score, grids[q], steps[q], val, dot);
        // Exact slope rows at the firing instants.
        for (double s : train.times) {
            const auto c =
                emit(RowKind::slope, s, q, params.thetadot_s + slope_margin);
            for (std::size_t k = 0; k < K; ++k)
                sys.normals(static_cast<Eigen::Index>(k), c) =
                    periodic_coefficient_dot(net, neuron, k, score, s);
        }
        for (std::size_t i = 0; i < grids[q]; ++i) {
            const double t = static_cast<double>(i) * steps[q];
            const auto gi = static_cast<Eigen::Index>(i);
            if (regions[q].pre[i]) {
                const auto c = emit(RowKind::pre_fire, t, q,
                                    -(theta0 - params.margin));
                sys.normals.col(c) = -val.col(gi);
            }
            if (regions[q].silent[i]) {
                const double bound = silent_neuron
                                         ? params.theta_r
                                         : params.theta_r - params.margin;
                const auto c = emit(RowKind::silent, t, q, -bound);
                sys.normals.col(c) = -val.col(gi);
            }
            if (regions[q].slope[i]) {
                const auto c = emit(RowKind::slope, t, q,
                                    params.thetadot_s + slope_margin);
                sys.normals.col(c) = dot.col(gi);
            }
        }
    }

    // |w_k| <= w_b as two one-sided rows per synapse.
    for (std::size_t k = 0; k < K; ++k) {
        auto c = emit(RowKind::box, static_cast<double>(k), 0, -params.w_b);
        sys.normals.col(c).setZero();
        sys.normals(static_cast<Eigen::Index>(k), c) = 1.0;
        c = emit(RowKind::box, static_cast<double>(k), 0, -params.w_b);
        sys.normals.col(c).setZero();
        sys.normals(static_cast<Eigen::Index>(k), c) = -1.0;
    }
    if (col != M)
        throw InternalError("build_constraints: row count mismatch");
    return sys;
}

double ConstraintSystem::margin(std::span<const double> weights) const {
    if (static_cast<Eigen::Index>(weights.size()) != normals.rows())
        throw ParameterError("ConstraintSystem::margin: weight size mismatch");
    const Eigen::Map<const Eigen::VectorXd> w(weights.data(),
                                              static_cast<Eigen::Index>(
                                                  weights.size()));
    const Eigen::VectorXd slack = normals.transpose() * w - rhs;
    double worst = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < slack.size(); ++i) {
        const double m = i < num_equalities ? -std::abs(slack(i)) : slack(i);
        worst = std::min(worst, m);
    }
    return worst;
}

namespace {

// Column-normalized copy for the solver; zero columns are resolved here
// (vacuous for ">= rhs" with rhs <= 0 or "= 0", certainly infeasible
// otherwise). The first `num_equalities` input columns are equalities and
// stay in front.
struct NormalizedSystem {
    Eigen::MatrixXd normals;
    Eigen::VectorXd rhs;
    std::vector<int> kept; // original column indices
    int num_equalities = 0;
    bool infeasible_row = false;
};

NormalizedSystem normalize_columns(const Eigen::MatrixXd& normals,
                                   const Eigen::VectorXd& rhs,
                                   int num_equalities) {
    NormalizedSystem out;
    const auto m = normals.cols();
    out.kept.reserve(static_cast<std::size_t>(m));
    std::vector<Eigen::Index> cols;
    for (Eigen::Index i = 0; i < m; ++i) {
        const bool is_eq = i < num_equalities;
        const double norm = normals.col(i).norm();
        if (norm < 1e-300) {
            if (is_eq ? rhs(i) != 0.0 : rhs(i) > 0.0)
                out.infeasible_row = true;
            continue;
        }
        if (is_eq)
            ++out.num_equalities;
        cols.push_back(i);
    }
    out.normals.resize(normals.rows(), static_cast<Eigen::Index>(cols.size()));
    out.rhs.resize(static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        const double norm = normals.col(cols[j]).norm();
        out.normals.col(static_cast<Eigen::Index>(j)) =
            normals.col(cols[j]) / norm;
        out.rhs(static_cast<Eigen::Index>(j)) = rhs(cols[j]) / norm;
        out.kept.push_back(static_cast<int>(cols[j]));
    }
    return out;
}

SynthesisStatus to_status(QpStatus s) {
    switch (s) {
    case QpStatus::optimal:
        return SynthesisStatus::feasible;
    case QpStatus::infeasible:
        return SynthesisStatus::infeasible;
    default:
        return SynthesisStatus::solver_limit;
    }
}

} // namespace

SynthesisResult solve_weights(const ConstraintSystem& system,
                              const TemplateParams& params, RandomStream& rng) {
    const auto K = system.normals.rows();
    SynthesisResult res;

    if (params.nu == Regularization::l1) {
        // Split variables y = (p; m), w = p - m, with sum(p + m) minimized
        // plus a proximal 0.5*eps*|y|^2 whose relative optimality gap is
        // bounded by 0.5*eps*w_b <= 1e-6.
        const double eps = 2e-6 / params.w_b;
        const double sq = std::sqrt(eps);
        const auto M = system.normals.cols();
        const Eigen::Index n2 = 2 * K;
        const Eigen::Index m2 = M + K + 2 * K;
        Eigen::MatrixXd normals = Eigen::MatrixXd::Zero(n2, m2);
        Eigen::VectorXd rhs(m2);
        normals.topRows(K).leftCols(M) = system.normals;
        normals.bottomRows(K).leftCols(M) = -system.normals;
        rhs.head(M) = system.rhs;
        for (Eigen::Index k = 0; k < K; ++k) {
            normals(k, M + k) = -1.0; // p_k + m_k <= w_b
            normals(K + k, M + k) = -1.0;
            rhs(M + k) = -params.w_b;
        }
        for (Eigen::Index k = 0; k < n2; ++k) {
            normals(k, M + K + k) = 1.0; // p, m >= 0
            rhs(M + K + k) = 0.0;
        }
        // x = sqrt(eps) * y turns the proximal objective into 0.5|x|^2.
        normals /= sq;
        const Eigen::VectorXd linear = Eigen::VectorXd::Constant(n2, 1.0 / sq);
        auto normalized =
            normalize_columns(normals, rhs, system.num_equalities);
        if (normalized.infeasible_row) {
            res.status = SynthesisStatus::infeasible;
            return res;
        }
        // Violations are checked on unit columns; divide the tolerance by
        // the largest original column norm so the original-unit slack meets
        // the feasibility contract.
        double max_norm = 1.0;
        for (Eigen::Index i = 0; i < normals.cols(); ++i)
            max_norm = std::max(max_norm, normals.col(i).norm());
        const double tol = std::max(0.2 * params.feas_tol / max_norm, 1e-15);
        const QpResult qp = solve_least_norm_qp(
            normalized.normals, normalized.rhs, linear,
            normalized.num_equalities, params.max_iterations, tol);
        res.status = to_status(qp.status);
        res.iterations = qp.iterations;
        if (res.status == SynthesisStatus::feasible) {
            const Eigen::VectorXd y = qp.x / sq;
            Eigen::VectorXd w1(K);
            for (Eigen::Index k = 0; k < K; ++k)
                w1(k) = y(k) - y(K + k);
            // The eps-scaled solve carries ~1e-8 constraint residue; project
            // back onto the feasible set in the well-conditioned original
            // system (nearest feasible point to w1, same l1 value up to the
            // certified gap).
            auto direct = normalize_columns(system.normals, system.rhs,
                                            system.num_equalities);
            const QpResult proj = solve_least_norm_qp(
                direct.normals, direct.rhs, -w1, direct.num_equalities,
                params.max_iterations);
            const Eigen::VectorXd w =
                proj.status == QpStatus::optimal ? proj.x : w1;
            res.weights.assign(w.data(), w.data() + w.size());
            double obj = 0.0;
            for (Eigen::Index k = 0; k < K; ++k)
                obj += std::abs(w(k));
            res.objective = obj;
            res.optimality_gap = 0.5 * eps * params.w_b;
            res.worst_margin = system.margin(res.weights);
        }
        return res;
    }

    Eigen::VectorXd linear = Eigen::VectorXd::Zero(K);
    if (params.nu == Regularization::none) {
        for (Eigen::Index k = 0; k < K; ++k)
            linear(k) = (rng.uniform() < 0.5 ? 1.0 : -1.0) * -params.w_b;
    }
    auto normalized =
        normalize_columns(system.normals, system.rhs, system.num_equalities);
    if (normalized.infeasible_row) {
        res.status = SynthesisStatus::infeasible;
        return res;
    }
    double max_norm = 1.0;
    for (Eigen::Index i = 0; i < system.normals.cols(); ++i)
        max_norm = std::max(max_norm, system.normals.col(i).norm());
    const double tol = std::max(0.2 * params.feas_tol / max_norm, 1e-15);
    const QpResult qp = solve_least_norm_qp(normalized.normals, normalized.rhs,
                                            linear, normalized.num_equalities,
                                            params.max_iterations, tol);
    res.status = to_status(qp.status);
    res.iterations = qp.iterations;
    if (res.status == SynthesisStatus::feasible) {
        res.weights.assign(qp.x.data(), qp.x.data() + qp.x.size());
        if (params.nu == Regularization::l2) {
            res.objective = qp.x.squaredNorm();
            res.optimality_gap = 0.0;
        } else {
            res.objective = std::numeric_limits<double>::quiet_NaN();
            res.optimality_gap = std::numeric_limits<double>::quiet_NaN();
        }
        res.worst_margin = system.margin(res.weights);
    }
    return res;
}

double recheck_worst_margin(const Network& weighted_net, std::size_t neuron,
                            std::span<const SpikeScore> scores,
                            const TemplateParams& params, int refine) {
    if (refine < 1)
        throw ParameterError("recheck_worst_margin: refine >= 1");
    const double theta0 = weighted_net.theta0;
    const double tau0 = weighted_net.tau0;
    const double slope_floor = params.thetadot_s + params.margin / tau0;
    double worst = std::numeric_limits<double>::infinity();
    auto take = [&](double margin) { worst = std::min(worst, margin); };

    for (const auto& score : scores) {
        const auto& train = score.trains[neuron];
        const std::size_t coarse = grid_count(score.period, params.dt);
        const double coarse_step = score.period / static_cast<double>(coarse);
        const std::size_t fine = coarse * static_cast<std::size_t>(refine);
        const double step = score.period / static_cast<double>(fine);
        const double guard = refine > 1 ? coarse_step : 0.0;
        const bool silent_neuron = train.empty();
        const double eps = kBoundaryEps * score.period;

        for (double s : train.times) {
            const double z = potential_periodic(weighted_net, neuron, score, s);
            take(params.pin_crossings ? -std::abs(z - theta0) : z - theta0);
            take(potential_periodic_dot(weighted_net, neuron, score, s) -
                 slope_floor);
        }
        auto circ = [&](double t, double lo, double hi) {
            // is t in (lo, hi) modulo the period?
            double d = t - lo;
            d -= score.period * std::floor(d / score.period);
            return d > eps && d < (hi - lo) - eps;
        };
        for (std::size_t i = 0; i < fine; ++i) {
            const double t = static_cast<double>(i) * step;
            bool in_pre = false, in_slope = false, excluded = false;
            for (double s : train.times) {
                if (circ(t, s - params.eps_s + guard,
                         s - 0.5 * coarse_step + 2.0 * eps))
                    in_pre = true;
                if (circ(t, s - params.eps_s + guard, s + params.eps_s - guard))
                    in_slope = true;
                if (circ(t, s - params.eps_s - guard, s + tau0 + guard))
                    excluded = true;
            }
            if (in_pre || !excluded) {
                const double z = potential_periodic(weighted_net, neuron, score, t);
                if (in_pre)
                    take(theta0 - params.margin - z);
                if (!excluded)
                    take((silent_neuron ? params.theta_r
                                        : params.theta_r - params.margin) -
                         z);
            }
            if (in_slope)
                take(potential_periodic_dot(weighted_net, neuron, score, t) -
                     slope_floor);
        }
    }
    for (const auto& syn : weighted_net.neurons[neuron].synapses)
        take(params.w_b - std::abs(syn.weight));
    return worst;
}

NetworkSynthesis synthesize_network(const Network& net,
                                    std::span<const SpikeScore> scores,
                                    const TemplateParams& params,
                                    RandomStream& rng, bool early_exit) {
    NetworkSynthesis out;
    out.network = net;
    out.per_neuron.resize(net.size());
    const std::uint64_t base = rng.raw();

    std::vector<char> done(net.size(), 0);
    bool stop = false;
    for (std::size_t ell = 0; ell < net.size() && !stop; ++ell) {
        auto stream = RandomStream::derive(base, ell);
        const auto system = build_constraints(net, ell, scores, params);
        out.per_neuron[ell] = solve_weights(system, params, stream);
        done[ell] = 1;
        if (early_exit &&
            out.per_neuron[ell].status != SynthesisStatus::feasible)
            stop = true;
    }

    out.all_feasible =
        std::all_of(out.per_neuron.begin(), out.per_neuron.end(),
                    [](const SynthesisResult& r) {
                        return r.status == SynthesisStatus::feasible;
                    }) &&
        std::all_of(done.begin(), done.end(), [](char c) { return c != 0; });

    if (out.all_feasible) {
        for (std::size_t ell = 0; ell < net.size(); ++ell) {
            auto& neuron = out.network.neurons[ell];
            const auto& w = out.per_neuron[ell].weights;
            for (std::size_t k = 0; k < neuron.synapses.size(); ++k)
                neuron.synapses[k].weight = w[k];
        }
    }
    return out;
}

NetworkSynthesis synthesize_network(const Network& net, const SpikeScore& score,
                                    const TemplateParams& params,
                                    RandomStream& rng, bool early_exit) {
    return synthesize_network(net, std::span<const SpikeScore>(&score, 1),
                              params, rng, early_exit);
}

void dump_constraints(const ConstraintSystem& system, std::ostream& os) {
    const auto K = system.normals.rows();
    const auto M = system.normals.cols();
    std::size_t nnz = 0;
    for (Eigen::Index c = 0; c < M; ++c)
        for (Eigen::Index r = 0; r < K; ++r)
            if (system.normals(r, c) != 0.0)
                ++nnz;
    os << "spikemem-constraints 1\n";
    os << "neuron " << system.neuron << "\n";
    os << "rows " << M << " cols " << K << " nnz " << nnz << " equalities "
       << system.num_equalities << "\n";
    os << "# row col coeff   (row . w >= rhs; the first `equalities` rows "
          "hold with equality)\n";
    os.precision(17);
    for (Eigen::Index c = 0; c < M; ++c)
        for (Eigen::Index r = 0; r < K; ++r)
            if (system.normals(r, c) != 0.0)
                os << c << " " << r << " " << system.normals(r, c) << "\n";
    os << "# row kind score time rhs   (kind: 0 fire, 1 pre, 2 silent, 3 "
          "slope, 4 box)\n";
    os << "bounds\n";
    for (Eigen::Index c = 0; c < M; ++c) {
        os << c << " " << static_cast<int>(system.kinds[static_cast<std::size_t>(c)])
           << " " << system.score_index[static_cast<std::size_t>(c)] << " "
           << system.times[static_cast<std::size_t>(c)] << " " << system.rhs(c)
           << "\n";
    }
}

} // namespace spikemem
