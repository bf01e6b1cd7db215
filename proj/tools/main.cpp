// spikemem command-line harness: score generation, weight synthesis,
// event-driven simulation, accuracy metrics, small-jitter spectra, and the
// canned experiment protocols with deterministic result files.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "spikemem/errors.hpp"
#include "spikemem/experiments.hpp"
#include "spikemem/metrics.hpp"
#include "spikemem/score_sampling.hpp"
#include "spikemem/serialization.hpp"
#include "spikemem/simulator.hpp"
#include "spikemem/stability.hpp"
#include "spikemem/synthesis.hpp"

using namespace spikemem;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

struct CommonOptions {
    ExperimentConfig config = ExperimentConfig::defaults();
    std::string nu = "2";
    fs::path out_dir = ".";
    bool desk = false;

    void finalize() {
        if (desk) {
            const auto d = ExperimentConfig::desk();
            config.num_neurons = d.num_neurons;
            config.repetitions = d.repetitions;
        }
        if (nu == "2")
            config.nu = Regularization::l2;
        else if (nu == "1")
            config.nu = Regularization::l1;
        else if (nu == "none")
            config.nu = Regularization::none;
        else
            throw ParameterError("--nu must be one of: 1, 2, none");
    }
};

// Table II symbols as flags, shared by every subcommand that needs them.
void add_model_flags(CLI::App* cmd, CommonOptions& opt) {
    auto& c = opt.config;
    cmd->add_option("--L", c.num_neurons, "number of neurons");
    cmd->add_option("--K", c.num_inputs, "inputs per neuron");
    cmd->add_option("--beta", c.beta, "kernel time constant");
    cmd->add_option("--d-min", c.d_min, "minimal axonal delay");
    cmd->add_option("--d-max", c.d_max, "maximal axonal delay");
    cmd->add_option("--theta0", c.theta0, "nominal threshold");
    cmd->add_option("--sigma-theta", c.sigma_theta,
                    "threshold noise standard deviation");
    cmd->add_option("--T", c.period, "score period");
    cmd->add_option("--lambda", c.lambda, "random-firing rate");
    cmd->add_option("--tau0", c.tau0, "refractory period");
    cmd->add_option("--eps-s", c.eps_s, "firing-zone half width");
    cmd->add_option("--theta-r", c.theta_r, "silent-region ceiling");
    cmd->add_option("--thetadot-s", c.thetadot_s, "minimum crossing slope");
    cmd->add_option("--w-b", c.w_b, "weight bound");
    cmd->add_option("--nu", opt.nu, "weight penalty: 1, 2 or none");
    cmd->add_option("--dt", c.dt, "constraint grid step");
    cmd->add_option("--reps", c.repetitions, "experiment repetitions");
    cmd->add_option("--seed", c.seed, "master random seed");
    cmd->add_option("--threads", c.threads, "worker threads (0 = hardware)");
    cmd->add_option("--out-dir", opt.out_dir, "output directory");
    cmd->add_flag("--desk", opt.desk, "desk-scale preset (L=50, 20 reps)");
}

SpikeScore load_score(const fs::path& path) {
    return score_from_json(load_json(path));
}

Network load_network(const fs::path& path) {
    return network_from_json(load_json(path));
}

int cmd_generate(const CommonOptions& opt, const fs::path& out) {
    const auto& c = opt.config;
    auto rng = RandomStream::derive(c.seed, 0);
    const CountPMF pmf = count_pmf(c.lambda, c.period, c.tau0);
    const SpikeScore score = sample_score(c.num_neurons, pmf, rng);
    save_json(score_to_json(score), out);
    std::fprintf(stderr, "wrote %s (%zu trains, %zu spikes, E[N]=%.3f)\n",
                 out.string().c_str(), score.size(), score.total_spikes(),
                 pmf.expected_count());
    return kExitOk;
}

int cmd_synthesize(const CommonOptions& opt, const fs::path& score_path,
                   const std::optional<fs::path>& network_path,
                   const std::vector<fs::path>& extra_scores,
                   const fs::path& out, const std::optional<fs::path>& dump,
                   bool recheck) {
    const auto& c = opt.config;
    std::vector<SpikeScore> scores;
    scores.push_back(load_score(score_path));
    for (const auto& p : extra_scores)
        scores.push_back(load_score(p));
    const std::span<const SpikeScore> score_span(scores.data(), scores.size());

    auto rng = RandomStream::derive(c.seed, 1);
    Network net;
    if (network_path) {
        net = load_network(*network_path);
    } else {
        net = build_random_network(scores[0].size(), c.num_inputs, c.d_min,
                                   c.d_max, c.beta, c.theta0, scores[0].tau0,
                                   rng);
        net.sigma_theta = c.sigma_theta;
    }
    const TemplateParams params = c.template_params();
    const auto synth = synthesize_network(net, score_span, params, rng);

    if (dump) {
        std::ofstream os(*dump);
        if (!os)
            throw IoError("cannot open " + dump->string());
        for (std::size_t ell = 0; ell < net.size(); ++ell)
            dump_constraints(build_constraints(net, ell, score_span, params),
                             os);
        std::fprintf(stderr, "wrote %s\n", dump->string().c_str());
    }

    std::size_t feasible = 0;
    for (std::size_t ell = 0; ell < synth.per_neuron.size(); ++ell) {
        const auto& r = synth.per_neuron[ell];
        if (r.status == SynthesisStatus::feasible)
            ++feasible;
        double margin = r.worst_margin;
        if (recheck && synth.all_feasible)
            margin = recheck_worst_margin(synth.network, ell, score_span,
                                          params);
        std::printf("neuron,%zu,status,%s,margin,%s,iterations,%d\n", ell,
                    r.status == SynthesisStatus::feasible     ? "feasible"
                    : r.status == SynthesisStatus::infeasible ? "infeasible"
                                                              : "solver-limit",
                    format_double(margin).c_str(), r.iterations);
    }
    if (synth.all_feasible) {
        save_json(network_to_json(synth.network), out);
        std::fprintf(stderr, "wrote %s (all %zu neurons feasible)\n",
                     out.string().c_str(), synth.per_neuron.size());
        return kExitOk;
    }
    std::fprintf(stderr, "synthesis infeasible: %zu of %zu neurons feasible\n",
                 feasible, synth.per_neuron.size());
    return kExitInfeasible;
}

int cmd_simulate(const CommonOptions& opt, const fs::path& network_path,
                 const std::vector<fs::path>& score_paths, double horizon,
                 const std::string& init, const std::string& format,
                 const fs::path& out, double sigma_s, double alpha,
                 const std::string& phases) {
    const auto& c = opt.config;
    const Network net = load_network(network_path);
    std::vector<SpikeScore> scores;
    for (const auto& p : score_paths)
        scores.push_back(load_score(p));

    SimConfig sim;
    sim.horizon = horizon > 0.0
                      ? horizon
                      : (c.measure_period + 1) * c.period + 2.0 * c.tau0;
    sim.sigma_theta = c.sigma_theta;
    sim.init = init == "quiet" ? InitMode::quiet : InitMode::exact_score;

    auto rng = RandomStream::derive(c.seed, 2);
    if (!phases.empty()) {
        if (scores.empty())
            throw ParameterError("--phases requires at least one score");
        Forcing forcing;
        const auto count = static_cast<std::size_t>(
            std::llround(alpha * static_cast<double>(net.size())));
        for (std::uint32_t ell = 0;
             ell < static_cast<std::uint32_t>(count) && ell < net.size(); ++ell)
            forcing.forced.push_back(ell);
        forcing.sigma_s = sigma_s;
        forcing.gibbs_sweeps = c.gibbs_sweeps;
        // one phase of duration T per character: 'a' = autonomous, a digit
        // forces that score
        double t = 0.0;
        for (char ch : phases) {
            Phase ph;
            ph.begin = t;
            ph.end = t + scores[0].period;
            if (ch == 'a') {
                ph.mode = PhaseMode::autonomous;
            } else if (ch >= '0' && ch <= '9') {
                ph.mode = PhaseMode::forced;
                ph.score_index = static_cast<std::uint32_t>(ch - '0');
                if (ph.score_index >= scores.size())
                    throw ParameterError("phase digit beyond score count");
            } else {
                throw ParameterError("phase characters are digits or 'a'");
            }
            forcing.schedule.push_back(ph);
            t = ph.end;
        }
        sim.forcing = std::move(forcing);
    }

    const SimRun run = simulate(
        net, sim, std::span<const SpikeScore>(scores.data(), scores.size()),
        rng);
    if (format == "csv") {
        std::ofstream os(out);
        if (!os)
            throw IoError("cannot open " + out.string());
        write_simrun_csv(run, os);
    } else {
        save_json(simrun_to_json(run), out);
    }
    std::fprintf(stderr, "wrote %s (%zu firings)\n", out.string().c_str(),
                 run.total_firings());
    return kExitOk;
}

int cmd_metrics(const fs::path& run_path, const fs::path& score_path,
                double t0, const fs::path& out) {
    const SpikeScore score = load_score(score_path);
    const SimRun run = simrun_from_json(load_json(run_path));
    std::ofstream os(out);
    if (!os)
        throw IoError("cannot open " + out.string());
    write_report_csv_header(os);
    write_report_csv_row(os, t0, "all", precision_recall(run, score, t0));
    std::fprintf(stderr, "wrote %s\n", out.string().c_str());
    return kExitOk;
}

int cmd_stability(const fs::path& network_path, const fs::path& score_path,
                  const fs::path& out) {
    const Network net = load_network(network_path);
    const SpikeScore score = load_score(score_path);
    const StabilityReport report = stability_report(net, score);
    std::ofstream os(out);
    if (!os)
        throw IoError("cannot open " + out.string());
    write_stability_csv_header(os);
    write_stability_csv_row(os, "0", report);
    std::fprintf(stderr, "wrote %s (N=%zu, log10|phi1|=%s, log10|phi2|=%s)\n",
                 out.string().c_str(), report.spikes_per_period,
                 format_double(report.log10_phi1).c_str(),
                 format_double(report.log10_phi2).c_str());
    return kExitOk;
}

EmitFormat parse_format(const std::string& name) {
    if (name == "csv")
        return EmitFormat::csv;
    if (name == "json")
        return EmitFormat::json;
    if (name == "plotdata")
        return EmitFormat::plotdata;
    throw ParameterError("unknown format: " + name);
}

int emit_result(const ExperimentResult& result, const std::string& formats,
                const fs::path& out_dir) {
    fs::create_directories(out_dir);
    std::istringstream ss(formats);
    std::string fmt;
    while (std::getline(ss, fmt, ','))
        for (const auto& path : emit(result, parse_format(fmt), out_dir))
            std::fprintf(stderr, "wrote %s\n", path.string().c_str());
    return kExitOk;
}

bool any_feasible_record(const ExperimentResult& result) {
    for (const auto& table : result.tables) {
        const auto col = std::find(table.columns.begin(), table.columns.end(),
                                   "feasible");
        if (col == table.columns.end())
            continue;
        const auto idx = static_cast<std::size_t>(col - table.columns.begin());
        for (const auto& row : table.rows)
            if (row.size() > idx && row[idx] == 1.0)
                return true;
    }
    return false;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spike-score memorization in continuous-time recurrent "
                 "spiking networks"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value configuration file");
    app.allow_config_extras(true);

    CommonOptions opt;

    auto* generate = app.add_subcommand("generate", "sample a random score");
    fs::path gen_out = "score.json";
    add_model_flags(generate, opt);
    generate->add_option("--out", gen_out, "output score json");

    auto* synthesize =
        app.add_subcommand("synthesize", "compute weights for a score");
    fs::path syn_score, syn_out = "network.json";
    std::optional<fs::path> syn_net, syn_dump;
    std::vector<fs::path> syn_extra;
    bool syn_recheck = false;
    add_model_flags(synthesize, opt);
    synthesize->add_option("--score", syn_score, "prescribed score json")
        ->required();
    synthesize->add_option("--network", syn_net,
                           "existing topology json (default: sample one)");
    synthesize->add_option("--extra-score", syn_extra,
                           "additional memories stored in the same weights");
    synthesize->add_option("--out", syn_out, "output network json");
    synthesize->add_option("--dump-constraints", syn_dump,
                           "write the sparse constraint systems to this file");
    synthesize->add_flag("--recheck", syn_recheck,
                         "re-verify margins by direct potential evaluation");

    auto* simulate_cmd = app.add_subcommand("simulate", "run the network");
    fs::path sim_net, sim_out = "run.json";
    std::vector<fs::path> sim_scores;
    double sim_horizon = 0.0, sim_sigma_s = 0.1, sim_alpha = 0.5;
    std::string sim_init = "exact-score", sim_format = "json", sim_phases;
    add_model_flags(simulate_cmd, opt);
    simulate_cmd->add_option("--network", sim_net, "network json")->required();
    simulate_cmd->add_option("--score", sim_scores,
                             "score json (first = init/primary)");
    simulate_cmd->add_option("--horizon", sim_horizon, "simulated time span");
    simulate_cmd->add_option("--init", sim_init, "exact-score | quiet");
    simulate_cmd->add_option("--format", sim_format, "json | csv");
    simulate_cmd->add_option("--out", sim_out, "output file");
    simulate_cmd->add_option("--sigma-s", sim_sigma_s,
                             "forced-emission jitter");
    simulate_cmd->add_option("--alpha", sim_alpha, "forced fraction");
    simulate_cmd->add_option(
        "--phases", sim_phases,
        "per-period modes, e.g. 00aa11aa (digit = forced score, a = free)");

    auto* metrics_cmd =
        app.add_subcommand("metrics", "precision/recall of a run");
    fs::path met_run, met_score, met_out = "report.csv";
    double met_t0 = 0.0;
    metrics_cmd->add_option("--run", met_run, "sim run json")->required();
    metrics_cmd->add_option("--score", met_score, "score json")->required();
    metrics_cmd->add_option("--t0", met_t0, "window start");
    metrics_cmd->add_option("--out", met_out, "output csv");

    auto* stability_cmd =
        app.add_subcommand("stability", "small-jitter eigenvalue analysis");
    fs::path sta_net, sta_score, sta_out = "stability.csv";
    stability_cmd->add_option("--network", sta_net, "network json")->required();
    stability_cmd->add_option("--score", sta_score, "score json")->required();
    stability_cmd->add_option("--out", sta_out, "output csv");

    auto* experiment =
        app.add_subcommand("experiment", "canned experiment protocols");
    experiment->require_subcommand(1);
    std::string exp_formats = "csv,json";
    double rec_alpha = 0.5, rec_sigma_s = 0.1;
    std::string rec_mode = "quiet-start";
    std::string abl_axis = "slope";
    std::vector<double> cap_T;
    std::vector<std::size_t> cap_K;

    auto* exp_noise = experiment->add_subcommand(
        "noise", "threshold-noise robustness (pr/rc at 20T)");
    add_model_flags(exp_noise, opt);
    exp_noise->add_option("--formats", exp_formats, "csv,json,plotdata");

    auto* exp_capacity = experiment->add_subcommand(
        "capacity", "feasibility-as-proxy capacity sweep with logistic fits");
    add_model_flags(exp_capacity, opt);
    exp_capacity->add_option("--formats", exp_formats, "csv,json,plotdata");
    exp_capacity->add_option("--T-grid", cap_T, "period grid");
    exp_capacity->add_option("--K-grid", cap_K, "inputs-per-neuron grid");

    auto* exp_ablation = experiment->add_subcommand(
        "ablation", "slope / regularization ablations (noise + spectra)");
    add_model_flags(exp_ablation, opt);
    exp_ablation->add_option("--formats", exp_formats, "csv,json,plotdata");
    exp_ablation->add_option("--axis", abl_axis, "slope | regularization");

    auto* exp_recall = experiment->add_subcommand(
        "recall", "associative recall from partial noisy prompts");
    add_model_flags(exp_recall, opt);
    exp_recall->add_option("--formats", exp_formats, "csv,json,plotdata");
    exp_recall->add_option("--alpha", rec_alpha, "forced fraction");
    exp_recall->add_option("--sigma-s", rec_sigma_s, "prompt jitter");
    exp_recall->add_option("--mode", rec_mode, "quiet-start | switching");

    auto* emit_cmd = app.add_subcommand("emit", "re-emit a stored result json");
    fs::path emit_in;
    std::string emit_formats = "csv";
    fs::path emit_dir = ".";
    emit_cmd->add_option("--result", emit_in, "experiment result json")
        ->required();
    emit_cmd->add_option("--formats", emit_formats, "csv,json,plotdata");
    emit_cmd->add_option("--out-dir", emit_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        opt.finalize();
        if (generate->parsed())
            return cmd_generate(opt, gen_out);
        if (synthesize->parsed())
            return cmd_synthesize(opt, syn_score, syn_net, syn_extra, syn_out,
                                  syn_dump, syn_recheck);
        if (simulate_cmd->parsed())
            return cmd_simulate(opt, sim_net, sim_scores, sim_horizon, sim_init,
                                sim_format, sim_out, sim_sigma_s, sim_alpha,
                                sim_phases);
        if (metrics_cmd->parsed())
            return cmd_metrics(met_run, met_score, met_t0, met_out);
        if (stability_cmd->parsed())
            return cmd_stability(sta_net, sta_score, sta_out);
        if (experiment->parsed()) {
            ExperimentResult result;
            if (exp_noise->parsed()) {
                result = run_noise_experiment(opt.config);
            } else if (exp_capacity->parsed()) {
                if (cap_T.empty())
                    cap_T = {10, 20, 30, 40, 50, 70, 90, 110, 130};
                if (cap_K.empty())
                    cap_K = {125, 250, 500};
                result = run_capacity_sweep(opt.config, cap_T, cap_K);
            } else if (exp_ablation->parsed()) {
                result = run_ablation(opt.config,
                                      abl_axis == "regularization"
                                          ? AblationAxis::regularization
                                          : AblationAxis::slope);
            } else if (exp_recall->parsed()) {
                result = run_recall_experiment(
                    opt.config, rec_alpha, rec_sigma_s,
                    rec_mode == "switching" ? RecallMode::switching
                                            : RecallMode::quiet_start);
            }
            const int rc = emit_result(result, exp_formats, opt.out_dir);
            if (rc != kExitOk)
                return rc;
            if ((exp_noise->parsed() || exp_recall->parsed()) &&
                !any_feasible_record(result))
                return kExitInfeasible;
            return kExitOk;
        }
        if (emit_cmd->parsed())
            return emit_result(result_from_json(load_json(emit_in)),
                               emit_formats, emit_dir);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitError;
    }
    return kExitError;
}
