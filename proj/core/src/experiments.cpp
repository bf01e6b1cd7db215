#include "spikemem/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "spikemem/errors.hpp"
#include "spikemem/metrics.hpp"
#include "spikemem/score_sampling.hpp"
#include "spikemem/serialization.hpp"
#include "spikemem/stability.hpp"
#include "spikemem/stats.hpp"
#include "spikemem/thread_pool.hpp"

namespace spikemem {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t task_id(std::uint64_t family, std::uint64_t a, std::uint64_t b) {
    return (family * 1000003ull + a) * 1000003ull + b;
}

std::vector<std::pair<std::string, std::string>> config_meta(
    const ExperimentConfig& c) {
    std::vector<std::pair<std::string, std::string>> meta;
    auto add = [&](const char* k, double v) {
        meta.emplace_back(k, format_double(v));
    };
    add("L", static_cast<double>(c.num_neurons));
    add("K", static_cast<double>(c.num_inputs));
    add("beta", c.beta);
    add("d_min", c.d_min);
    add("d_max", c.d_max);
    add("theta0", c.theta0);
    add("tau0", c.tau0);
    add("sigma_theta", c.sigma_theta);
    add("T", c.period);
    add("lambda", c.lambda);
    add("eps_s", c.eps_s);
    add("theta_r", c.theta_r);
    add("thetadot_s", c.thetadot_s);
    add("w_b", c.w_b);
    meta.emplace_back("nu", c.nu == Regularization::l2   ? "2"
                            : c.nu == Regularization::l1 ? "1"
                                                         : "none");
    add("dt", c.dt);
    add("repetitions", static_cast<double>(c.repetitions));
    add("seed", static_cast<double>(c.seed));
    return meta;
}

std::vector<std::uint32_t> all_neurons(std::size_t n) {
    std::vector<std::uint32_t> v(n);
    std::iota(v.begin(), v.end(), 0u);
    return v;
}

// Deterministic size-m random subset (Fisher-Yates prefix), returned sorted.
std::vector<std::uint32_t> random_subset(std::size_t n, std::size_t m,
                                         RandomStream& rng) {
    std::vector<std::uint32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0u);
    for (std::size_t i = 0; i < m && i + 1 < n; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.index(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(m);
    std::sort(idx.begin(), idx.end());
    return idx;
}

void append_summary_row(ResultTable& table, const std::string& label,
                        std::vector<double> values) {
    const Summary s = summarize(std::move(values));
    table.row_labels.push_back(label);
    table.rows.push_back({s.min, s.med, s.max});
}

} // namespace

ExperimentConfig ExperimentConfig::defaults() { return ExperimentConfig{}; }

ExperimentConfig ExperimentConfig::desk() {
    ExperimentConfig c;
    c.num_neurons = 50;
    c.repetitions = 20;
    return c;
}

TemplateParams ExperimentConfig::template_params() const {
    TemplateParams p = TemplateParams::defaults(theta0, tau0);
    p.eps_s = eps_s;
    p.theta_r = theta_r;
    p.thetadot_s = thetadot_s;
    p.w_b = w_b;
    p.nu = nu;
    p.dt = dt;
    return p;
}

const ResultTable& ExperimentResult::table(const std::string& name) const {
    for (const auto& t : tables)
        if (t.name == name)
            return t;
    throw ParameterError("ExperimentResult: no table named " + name);
}

Instance make_instance(const ExperimentConfig& config, RandomStream& stream,
                       bool early_exit, std::size_t extra_memories) {
    Instance inst;
    const CountPMF pmf = count_pmf(config.lambda, config.period, config.tau0);
    inst.score = sample_score(config.num_neurons, pmf, stream);
    for (std::size_t i = 0; i < extra_memories; ++i)
        inst.extra_scores.push_back(
            sample_score(config.num_neurons, pmf, stream));

    Network net = build_random_network(config.num_neurons, config.num_inputs,
                                       config.d_min, config.d_max, config.beta,
                                       config.theta0, config.tau0, stream);
    net.sigma_theta = config.sigma_theta;

    std::vector<SpikeScore> scores;
    scores.push_back(inst.score);
    for (const auto& s : inst.extra_scores)
        scores.push_back(s);
    NetworkSynthesis synth = synthesize_network(
        net, std::span<const SpikeScore>(scores.data(), scores.size()),
        config.template_params(), stream, early_exit);
    inst.network = std::move(synth.network);
    inst.feasible = synth.all_feasible;
    inst.synthesis = std::move(synth.per_neuron);
    return inst;
}

NoiseMeasurement measure_noise_run(const Instance& instance,
                                   const ExperimentConfig& config,
                                   double sigma_theta,
                                   RandomStream& sim_stream) {
    if (!instance.feasible)
        throw ParameterError("measure_noise_run: infeasible instance");
    SimConfig sim;
    sim.horizon = (config.measure_period + 1) * config.period + 2.0 * config.tau0;
    sim.sigma_theta = sigma_theta;
    sim.init = InitMode::exact_score;
    const SimRun run = simulate(instance.network, sim, instance.score, sim_stream);

    NoiseMeasurement m;
    const auto early = precision_recall(run, instance.score,
                                        config.early_period * config.period);
    const auto late = precision_recall(run, instance.score,
                                       config.measure_period * config.period);
    m.pr_early = early.precision;
    m.rc_early = early.recall;
    m.pr = late.precision;
    m.rc = late.recall;
    return m;
}

ExperimentResult run_noise_experiment(const ExperimentConfig& config) {
    struct Rec {
        bool feasible = false;
        NoiseMeasurement m;
    };
    std::vector<Rec> recs(static_cast<std::size_t>(config.repetitions));
    parallel_for(recs.size(), config.threads, [&](std::size_t rep) {
        auto stream = RandomStream::derive(config.seed, task_id(1, 0, rep));
        const Instance inst = make_instance(config, stream);
        recs[rep].feasible = inst.feasible;
        if (inst.feasible) {
            auto sim_stream =
                RandomStream::derive(config.seed, task_id(2, 0, rep));
            recs[rep].m =
                measure_noise_run(inst, config, config.sigma_theta, sim_stream);
        }
    });

    ExperimentResult result;
    result.kind = "noise";
    ResultTable records;
    records.name = "records";
    records.columns = {"rep", "feasible", "pr_early", "rc_early", "pr", "rc"};
    records.meta = config_meta(config);
    std::vector<double> pr, rc, pr_early, rc_early;
    for (std::size_t rep = 0; rep < recs.size(); ++rep) {
        const auto& r = recs[rep];
        if (r.feasible) {
            records.rows.push_back({static_cast<double>(rep), 1.0, r.m.pr_early,
                                    r.m.rc_early, r.m.pr, r.m.rc});
            pr.push_back(r.m.pr);
            rc.push_back(r.m.rc);
            pr_early.push_back(r.m.pr_early);
            rc_early.push_back(r.m.rc_early);
        } else {
            records.rows.push_back(
                {static_cast<double>(rep), 0.0, kNaN, kNaN, kNaN, kNaN});
        }
    }
    ResultTable summary;
    summary.name = "summary";
    summary.columns = {"min", "med", "max"};
    append_summary_row(summary, "pr", pr);
    append_summary_row(summary, "rc", rc);
    append_summary_row(summary, "pr_early", pr_early);
    append_summary_row(summary, "rc_early", rc_early);
    result.tables.push_back(std::move(records));
    result.tables.push_back(std::move(summary));
    return result;
}

ExperimentResult run_capacity_sweep(const ExperimentConfig& config,
                                    std::span<const double> period_grid,
                                    std::span<const std::size_t> input_grid) {
    if (period_grid.empty() || input_grid.empty())
        throw ParameterError("run_capacity_sweep: empty grid");

    struct Point {
        std::size_t k_index, t_index;
    };
    std::vector<Point> points;
    for (std::size_t ki = 0; ki < input_grid.size(); ++ki)
        for (std::size_t ti = 0; ti < period_grid.size(); ++ti)
            points.push_back({ki, ti});

    const auto reps = static_cast<std::size_t>(config.repetitions);
    std::vector<std::vector<char>> feasible(points.size(),
                                            std::vector<char>(reps, 0));
    parallel_for(points.size() * reps, config.threads, [&](std::size_t job) {
        const std::size_t pi = job / reps;
        const std::size_t rep = job % reps;
        ExperimentConfig local = config;
        local.num_inputs = input_grid[points[pi].k_index];
        local.period = period_grid[points[pi].t_index];
        auto stream =
            RandomStream::derive(config.seed, task_id(3, pi, rep));
        const Instance inst =
            make_instance(local, stream, /*early_exit=*/true);
        feasible[pi][rep] = inst.feasible ? 1 : 0;
    });

    ExperimentResult result;
    result.kind = "capacity";
    ResultTable curves;
    curves.name = "curves";
    curves.columns = {"K", "T", "feasible_prob", "repetitions"};
    curves.meta = config_meta(config);
    curves.meta.emplace_back("plot_x", "T");
    curves.meta.emplace_back("plot_y", "feasible_prob");
    curves.meta.emplace_back("plot_series", "K");
    for (std::size_t pi = 0; pi < points.size(); ++pi) {
        double frac = 0.0;
        for (char f : feasible[pi])
            frac += f;
        frac /= static_cast<double>(reps);
        curves.rows.push_back(
            {static_cast<double>(input_grid[points[pi].k_index]),
             period_grid[points[pi].t_index], frac,
             static_cast<double>(reps)});
    }

    ResultTable fits;
    fits.name = "fits";
    fits.columns = {"K", "a", "crossover", "crossover_is_bound", "sse"};
    for (std::size_t ki = 0; ki < input_grid.size(); ++ki) {
        std::vector<std::pair<double, double>> pts;
        for (std::size_t pi = 0; pi < points.size(); ++pi)
            if (points[pi].k_index == ki)
                pts.emplace_back(curves.rows[pi][1], curves.rows[pi][2]);
        const LogisticFit fit = fit_logistic_decreasing(pts);
        fits.rows.push_back({static_cast<double>(input_grid[ki]), fit.a, fit.b,
                             fit.crossover_is_bound ? 1.0 : 0.0, fit.sse});
    }
    result.tables.push_back(std::move(curves));
    result.tables.push_back(std::move(fits));
    return result;
}

ExperimentResult run_ablation(const ExperimentConfig& config,
                              AblationAxis axis) {
    struct Variant {
        double thetadot_s, w_b;
        Regularization nu;
        double code_a, code_b; // table identifiers
    };
    std::vector<Variant> variants;
    if (axis == AblationAxis::slope) {
        for (double level : {0.0, 1.0, 2.0})
            variants.push_back({level * config.theta0 / config.tau0, config.w_b,
                                config.nu, level, 0.0});
    } else {
        for (double wb : {0.2, 0.5})
            for (auto nu : {Regularization::none, Regularization::l1,
                            Regularization::l2})
                variants.push_back({config.thetadot_s, wb * config.theta0, nu,
                                    wb,
                                    nu == Regularization::none ? 0.0
                                    : nu == Regularization::l1 ? 1.0
                                                               : 2.0});
    }
    const std::vector<double> noise_levels = {0.05, 0.10, 0.15};
    const auto reps = static_cast<std::size_t>(config.repetitions);

    struct Rec {
        bool feasible = false;
        bool degenerate = false;
        double log10_phi1 = kNaN, log10_phi2 = kNaN;
        std::vector<NoiseMeasurement> by_noise;
    };
    std::vector<std::vector<Rec>> recs(variants.size(),
                                       std::vector<Rec>(reps));

    parallel_for(variants.size() * reps, config.threads, [&](std::size_t job) {
        const std::size_t vi = job / reps;
        const std::size_t rep = job % reps;
        ExperimentConfig local = config;
        local.thetadot_s = variants[vi].thetadot_s;
        local.w_b = variants[vi].w_b;
        local.nu = variants[vi].nu;
        auto stream = RandomStream::derive(config.seed, task_id(4, vi, rep));
        const Instance inst = make_instance(local, stream);
        Rec& rec = recs[vi][rep];
        rec.feasible = inst.feasible;
        if (!inst.feasible)
            return;
        try {
            const StabilityReport sr =
                stability_report(inst.network, inst.score);
            rec.log10_phi1 = sr.log10_phi1;
            rec.log10_phi2 = sr.log10_phi2;
        } catch (const InvariantError&) {
            rec.degenerate = true; // non-positive crossing slope
        }
        rec.by_noise.resize(noise_levels.size());
        for (std::size_t ni = 0; ni < noise_levels.size(); ++ni) {
            auto sim_stream = RandomStream::derive(
                config.seed, task_id(5, vi * 100 + ni, rep));
            rec.by_noise[ni] = measure_noise_run(
                inst, local, noise_levels[ni] * config.theta0, sim_stream);
        }
    });

    ExperimentResult result;
    result.kind = axis == AblationAxis::slope ? "ablation_slope"
                                              : "ablation_regularization";
    ResultTable records;
    records.name = "records";
    records.columns = axis == AblationAxis::slope
                          ? std::vector<std::string>{"thetadot_s", "nu_unused",
                                                     "sigma_theta", "rep",
                                                     "feasible", "pr", "rc"}
                          : std::vector<std::string>{"w_b", "nu", "sigma_theta",
                                                     "rep", "feasible", "pr",
                                                     "rc"};
    records.meta = config_meta(config);
    ResultTable spectra;
    spectra.name = "spectra";
    spectra.columns = axis == AblationAxis::slope
                          ? std::vector<std::string>{"thetadot_s", "nu_unused",
                                                     "rep", "feasible",
                                                     "degenerate", "log10_phi1",
                                                     "log10_phi2"}
                          : std::vector<std::string>{"w_b", "nu", "rep",
                                                     "feasible", "degenerate",
                                                     "log10_phi1", "log10_phi2"};
    ResultTable summary;
    summary.name = "summary";
    summary.columns = {"min", "med", "max"};

    for (std::size_t vi = 0; vi < variants.size(); ++vi) {
        const auto& v = variants[vi];
        std::vector<double> phi1, phi2;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            const Rec& rec = recs[vi][rep];
            spectra.rows.push_back({v.code_a, v.code_b,
                                    static_cast<double>(rep),
                                    rec.feasible ? 1.0 : 0.0,
                                    rec.degenerate ? 1.0 : 0.0, rec.log10_phi1,
                                    rec.log10_phi2});
            if (rec.feasible && !rec.degenerate) {
                phi1.push_back(rec.log10_phi1);
                phi2.push_back(rec.log10_phi2);
            }
            for (std::size_t ni = 0; ni < noise_levels.size(); ++ni) {
                const double pr =
                    rec.feasible ? rec.by_noise[ni].pr : kNaN;
                const double rc =
                    rec.feasible ? rec.by_noise[ni].rc : kNaN;
                records.rows.push_back({v.code_a, v.code_b, noise_levels[ni],
                                        static_cast<double>(rep),
                                        rec.feasible ? 1.0 : 0.0, pr, rc});
            }
        }
        std::ostringstream tag;
        if (axis == AblationAxis::slope)
            tag << "slope=" << v.code_a;
        else
            tag << "w_b=" << v.code_a << " nu=" << v.code_b;
        append_summary_row(summary, tag.str() + " log10_phi1", phi1);
        append_summary_row(summary, tag.str() + " log10_phi2", phi2);
        for (std::size_t ni = 0; ni < noise_levels.size(); ++ni) {
            std::vector<double> pr, rc;
            for (std::size_t rep = 0; rep < reps; ++rep)
                if (recs[vi][rep].feasible) {
                    pr.push_back(recs[vi][rep].by_noise[ni].pr);
                    rc.push_back(recs[vi][rep].by_noise[ni].rc);
                }
            std::ostringstream n;
            n << tag.str() << " sigma=" << noise_levels[ni];
            append_summary_row(summary, n.str() + " pr", pr);
            append_summary_row(summary, n.str() + " rc", rc);
        }
    }
    result.tables.push_back(std::move(records));
    result.tables.push_back(std::move(spectra));
    result.tables.push_back(std::move(summary));
    return result;
}

namespace {

struct GroupMetrics {
    double pr = kNaN, rc = kNaN;
};

GroupMetrics group_metrics(const SimRun& run, const SpikeScore& score,
                           double t0, std::span<const std::uint32_t> subset) {
    GroupMetrics g;
    if (subset.empty())
        return g;
    const auto rep = precision_recall(run, score, t0, subset);
    g.pr = rep.precision;
    g.rc = rep.recall;
    return g;
}

} // namespace

ExperimentResult run_recall_experiment(const ExperimentConfig& config,
                                       double alpha, double sigma_s,
                                       RecallMode mode) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw ParameterError("run_recall_experiment: alpha in (0, 1]");
    const int recall_measure = 10; // steady-state read-out pr(10T)
    const auto reps = static_cast<std::size_t>(config.repetitions);
    const std::size_t L = config.num_neurons;
    const auto forced_count = static_cast<std::size_t>(
        std::llround(alpha * static_cast<double>(L)));

    ExperimentResult result;
    result.kind = mode == RecallMode::quiet_start ? "recall_quiet"
                                                  : "recall_switching";

    if (mode == RecallMode::quiet_start) {
        struct Rec {
            bool feasible = false;
            GroupMetrics forced, autonomous, all;
        };
        std::vector<Rec> recs(reps);
        parallel_for(reps, config.threads, [&](std::size_t rep) {
            auto stream =
                RandomStream::derive(config.seed, task_id(6, 0, rep));
            const Instance inst = make_instance(config, stream);
            recs[rep].feasible = inst.feasible;
            if (!inst.feasible)
                return;
            auto sim_stream =
                RandomStream::derive(config.seed, task_id(7, 0, rep));
            const auto forced =
                random_subset(L, forced_count, sim_stream);
            std::vector<std::uint32_t> autonomous;
            for (std::uint32_t ell = 0; ell < L; ++ell)
                if (!std::binary_search(forced.begin(), forced.end(), ell))
                    autonomous.push_back(ell);

            SimConfig sim;
            sim.horizon =
                (recall_measure + 1) * config.period + 2.0 * config.tau0;
            sim.sigma_theta = config.sigma_theta;
            sim.init = InitMode::quiet;
            Forcing forcing;
            forcing.forced = forced;
            forcing.sigma_s = sigma_s;
            forcing.gibbs_sweeps = config.gibbs_sweeps;
            for (int j = 0; j <= recall_measure; ++j)
                forcing.schedule.push_back(Phase{j * config.period,
                                                 (j + 1) * config.period,
                                                 PhaseMode::forced, 0});
            sim.forcing = std::move(forcing);

            const SimRun run =
                simulate(inst.network, sim, inst.score, sim_stream);
            const double t0 = recall_measure * config.period;
            recs[rep].forced = group_metrics(run, inst.score, t0, forced);
            recs[rep].autonomous =
                group_metrics(run, inst.score, t0, autonomous);
            recs[rep].all =
                group_metrics(run, inst.score, t0, all_neurons(L));
        });

        ResultTable records;
        records.name = "records";
        records.columns = {"rep", "feasible", "group", "pr", "rc"};
        records.meta = config_meta(config);
        records.meta.emplace_back("alpha", format_double(alpha));
        records.meta.emplace_back("sigma_s", format_double(sigma_s));
        ResultTable summary;
        summary.name = "summary";
        summary.columns = {"min", "med", "max"};
        const char* group_names[3] = {"forced", "autonomous", "all"};
        for (int g = 0; g < 3; ++g) {
            std::vector<double> pr, rc;
            for (std::size_t rep = 0; rep < reps; ++rep) {
                const auto& rec = recs[rep];
                const GroupMetrics& m = g == 0   ? rec.forced
                                        : g == 1 ? rec.autonomous
                                                 : rec.all;
                records.rows.push_back({static_cast<double>(rep),
                                        rec.feasible ? 1.0 : 0.0,
                                        static_cast<double>(g), m.pr, m.rc});
                if (rec.feasible && !std::isnan(m.pr)) {
                    pr.push_back(m.pr);
                    rc.push_back(m.rc);
                }
            }
            append_summary_row(summary, std::string(group_names[g]) + " pr", pr);
            append_summary_row(summary, std::string(group_names[g]) + " rc", rc);
        }
        result.tables.push_back(std::move(records));
        result.tables.push_back(std::move(summary));
        return result;
    }

    // Switching between two memorized scores: phases of duration T,
    // prompting R, then running free, then prompting B, then free again.
    const std::vector<int> pattern = {1, 1, 0, 0, 2, 2, 0, 0}; // 0 auto, 1 R, 2 B
    struct PeriodRec {
        double mode = 0.0;
        GroupMetrics vs_r, vs_b;
    };
    struct Rec {
        bool feasible = false;
        std::vector<PeriodRec> periods;
    };
    std::vector<Rec> recs(reps);
    parallel_for(reps, config.threads, [&](std::size_t rep) {
        auto stream = RandomStream::derive(config.seed, task_id(8, 0, rep));
        const Instance inst =
            make_instance(config, stream, false, /*extra_memories=*/1);
        recs[rep].feasible = inst.feasible;
        if (!inst.feasible)
            return;
        auto sim_stream = RandomStream::derive(config.seed, task_id(9, 0, rep));
        const auto forced = random_subset(L, forced_count, sim_stream);

        SimConfig sim;
        sim.horizon =
            static_cast<double>(pattern.size()) * config.period +
            2.0 * config.tau0;
        sim.sigma_theta = config.sigma_theta;
        sim.init = InitMode::quiet;
        Forcing forcing;
        forcing.forced = forced;
        forcing.sigma_s = sigma_s;
        forcing.gibbs_sweeps = config.gibbs_sweeps;
        for (std::size_t j = 0; j < pattern.size(); ++j) {
            Phase ph;
            ph.begin = static_cast<double>(j) * config.period;
            ph.end = ph.begin + config.period;
            ph.mode = pattern[j] == 0 ? PhaseMode::autonomous : PhaseMode::forced;
            ph.score_index = pattern[j] == 2 ? 1 : 0;
            forcing.schedule.push_back(ph);
        }
        sim.forcing = std::move(forcing);

        std::vector<SpikeScore> scores{inst.score, inst.extra_scores[0]};
        const SimRun run = simulate(
            inst.network, sim,
            std::span<const SpikeScore>(scores.data(), scores.size()),
            sim_stream);

        recs[rep].periods.resize(pattern.size());
        const auto everyone = all_neurons(L);
        for (std::size_t j = 0; j < pattern.size(); ++j) {
            const double t0 = static_cast<double>(j) * config.period;
            recs[rep].periods[j].mode = pattern[j];
            recs[rep].periods[j].vs_r =
                group_metrics(run, scores[0], t0, everyone);
            recs[rep].periods[j].vs_b =
                group_metrics(run, scores[1], t0, everyone);
        }
    });

    ResultTable periods;
    periods.name = "periods";
    periods.columns = {"rep",  "period", "mode", "pr_R",
                       "rc_R", "pr_B",   "rc_B"};
    periods.meta = config_meta(config);
    periods.meta.emplace_back("alpha", format_double(alpha));
    periods.meta.emplace_back("sigma_s", format_double(sigma_s));
    periods.meta.emplace_back("plot_x", "period");
    periods.meta.emplace_back("plot_y", "pr_R");
    periods.meta.emplace_back("plot_series", "rep");
    for (std::size_t rep = 0; rep < reps; ++rep) {
        if (!recs[rep].feasible) {
            periods.rows.push_back({static_cast<double>(rep), kNaN, kNaN, kNaN,
                                    kNaN, kNaN, kNaN});
            continue;
        }
        for (std::size_t j = 0; j < recs[rep].periods.size(); ++j) {
            const auto& p = recs[rep].periods[j];
            periods.rows.push_back({static_cast<double>(rep),
                                    static_cast<double>(j), p.mode, p.vs_r.pr,
                                    p.vs_r.rc, p.vs_b.pr, p.vs_b.rc});
        }
    }
    result.tables.push_back(std::move(periods));
    return result;
}

nlohmann::json result_to_json(const ExperimentResult& result) {
    nlohmann::json tables = nlohmann::json::array();
    for (const auto& t : result.tables) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& row : t.rows) {
            nlohmann::json r = nlohmann::json::array();
            for (double v : row) {
                if (std::isfinite(v))
                    r.push_back(v);
                else
                    r.push_back(nullptr);
            }
            rows.push_back(std::move(r));
        }
        nlohmann::json meta = nlohmann::json::array();
        for (const auto& [k, v] : t.meta)
            meta.push_back({k, v});
        tables.push_back({{"name", t.name},
                          {"columns", t.columns},
                          {"row_labels", t.row_labels},
                          {"rows", std::move(rows)},
                          {"meta", std::move(meta)}});
    }
    return nlohmann::json{{"kind", result.kind}, {"tables", std::move(tables)}};
}

ExperimentResult result_from_json(const nlohmann::json& j) {
    ExperimentResult result;
    result.kind = j.at("kind").get<std::string>();
    for (const auto& jt : j.at("tables")) {
        ResultTable t;
        t.name = jt.at("name").get<std::string>();
        t.columns = jt.at("columns").get<std::vector<std::string>>();
        t.row_labels = jt.at("row_labels").get<std::vector<std::string>>();
        for (const auto& jr : jt.at("rows")) {
            std::vector<double> row;
            for (const auto& v : jr)
                row.push_back(v.is_null() ? kNaN : v.get<double>());
            t.rows.push_back(std::move(row));
        }
        for (const auto& jm : jt.at("meta"))
            t.meta.emplace_back(jm.at(0).get<std::string>(),
                                jm.at(1).get<std::string>());
        result.tables.push_back(std::move(t));
    }
    return result;
}

std::vector<std::filesystem::path> emit(const ExperimentResult& result,
                                        EmitFormat format,
                                        const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;

    auto fail = [&](const std::filesystem::path& p) {
        throw IoError("emit: cannot write " + p.string());
    };

    if (format == EmitFormat::json) {
        const auto path = out_dir / (result.kind + ".json");
        save_json(result_to_json(result), path);
        written.push_back(path);
        return written;
    }

    for (const auto& t : result.tables) {
        if (format == EmitFormat::csv) {
            const auto path = out_dir / (result.kind + "__" + t.name + ".csv");
            std::ofstream os(path);
            if (!os)
                fail(path);
            os << "# spikemem " << result.kind << " " << t.name << "\n";
            for (const auto& [k, v] : t.meta)
                os << "# " << k << "=" << v << "\n";
            if (!t.row_labels.empty())
                os << "label,";
            for (std::size_t c = 0; c < t.columns.size(); ++c)
                os << t.columns[c] << (c + 1 < t.columns.size() ? "," : "");
            os << "\n";
            for (std::size_t r = 0; r < t.rows.size(); ++r) {
                if (!t.row_labels.empty())
                    os << t.row_labels[r] << ",";
                for (std::size_t c = 0; c < t.rows[r].size(); ++c)
                    os << format_double(t.rows[r][c])
                       << (c + 1 < t.rows[r].size() ? "," : "");
                os << "\n";
            }
            if (!os)
                fail(path);
            written.push_back(path);
        } else { // plotdata
            auto find_meta = [&](const char* key) -> const std::string* {
                for (const auto& [k, v] : t.meta)
                    if (k == key)
                        return &v;
                return nullptr;
            };
            const auto* px = find_meta("plot_x");
            const auto* py = find_meta("plot_y");
            const auto* ps = find_meta("plot_series");
            if (px == nullptr || py == nullptr || ps == nullptr)
                continue;
            auto col = [&](const std::string& name) {
                for (std::size_t c = 0; c < t.columns.size(); ++c)
                    if (t.columns[c] == name)
                        return c;
                throw ParameterError("emit: plot column missing: " + name);
            };
            const std::size_t cx = col(*px), cy = col(*py), cs = col(*ps);
            const auto path = out_dir / (result.kind + "__" + t.name + ".plot");
            std::ofstream os(path);
            if (!os)
                fail(path);
            os << "# x=" << *px << " y=" << *py << " series=" << *ps << "\n";
            for (const auto& row : t.rows)
                os << format_double(row[cx]) << " " << format_double(row[cy])
                   << " " << format_double(row[cs]) << "\n";
            if (!os)
                fail(path);
            written.push_back(path);
        }
    }
    return written;
}

} // namespace spikemem
