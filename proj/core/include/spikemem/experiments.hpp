#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "spikemem/network.hpp"
#include "spikemem/simulator.hpp"
#include "spikemem/spike_train.hpp"
#include "spikemem/synthesis.hpp"

namespace spikemem {

/// Model and protocol parameters with their default values; times in units
/// of tau0, potentials in units of theta0 (both default to 1).
struct ExperimentConfig {
    std::size_t num_neurons = 200; // L
    std::size_t num_inputs = 500;  // K
    double beta = 1.0;
    double d_min = 0.1;
    double d_max = 10.0;
    double theta0 = 1.0;
    double tau0 = 1.0;
    double sigma_theta = 0.1;
    double period = 50.0; // T
    double lambda = 0.2;  // random-firing rate
    double eps_s = 0.2;
    double theta_r = 0.0;
    double thetadot_s = 2.0;
    double w_b = 0.2;
    Regularization nu = Regularization::l2;
    double dt = 0.02;

    int repetitions = 100;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    int measure_period = 20; // steady-state read-out at pr(20T)
    int early_period = 5;    // reached steady state "after about five periods"
    int gibbs_sweeps = 1000;

    static ExperimentConfig defaults();
    /// Desk-scale preset: L = 50, 20 repetitions, everything else default.
    static ExperimentConfig desk();

    TemplateParams template_params() const;
};

/// One sampled problem instance: random score, random topology, synthesized
/// weights (network weights are set only when every neuron is feasible).
struct Instance {
    SpikeScore score;
    std::vector<SpikeScore> extra_scores; // multi-memory synthesis
    Network network;
    bool feasible = false;
    std::vector<SynthesisResult> synthesis;
};

Instance make_instance(const ExperimentConfig& config, RandomStream& stream,
                       bool early_exit = false, std::size_t extra_memories = 0);

struct NoiseMeasurement {
    double pr_early = 0.0, rc_early = 0.0;
    double pr = 0.0, rc = 0.0;
};

/// Exact-score init, `measure_period` + 1 periods with threshold noise,
/// precision/recall at early_period*T and measure_period*T.
NoiseMeasurement measure_noise_run(const Instance& instance,
                                   const ExperimentConfig& config,
                                   double sigma_theta, RandomStream& sim_stream);

/// Uniform tabular results: numeric rows, optional row labels, ordered meta.
struct ResultTable {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::string> row_labels; // empty or one per row
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> meta;
};

struct ExperimentResult {
    std::string kind;
    std::vector<ResultTable> tables;

    const ResultTable& table(const std::string& name) const;
};

ExperimentResult run_noise_experiment(const ExperimentConfig& config);

ExperimentResult run_capacity_sweep(const ExperimentConfig& config,
                                    std::span<const double> period_grid,
                                    std::span<const std::size_t> input_grid);

enum class AblationAxis { slope, regularization };
ExperimentResult run_ablation(const ExperimentConfig& config, AblationAxis axis);

enum class RecallMode { quiet_start, switching };
ExperimentResult run_recall_experiment(const ExperimentConfig& config,
                                       double alpha, double sigma_s,
                                       RecallMode mode);

enum class EmitFormat { csv, json, plotdata };

/// Writes result files with deterministic bytes; returns the paths written.
std::vector<std::filesystem::path> emit(const ExperimentResult& result,
                                        EmitFormat format,
                                        const std::filesystem::path& out_dir);

nlohmann::json result_to_json(const ExperimentResult& result);
ExperimentResult result_from_json(const nlohmann::json& j);

} // namespace spikemem
