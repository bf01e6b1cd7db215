#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "spikemem/metrics.hpp"
#include "spikemem/network.hpp"
#include "spikemem/simulator.hpp"
#include "spikemem/spike_train.hpp"
#include "spikemem/stability.hpp"

namespace spikemem {

/// Shortest round-trip decimal representation of a double (>= 12 significant
/// digits whenever the value needs them).
std::string format_double(double v);

nlohmann::json score_to_json(const SpikeScore& score);
SpikeScore score_from_json(const nlohmann::json& j);

nlohmann::json network_to_json(const Network& net);
Network network_from_json(const nlohmann::json& j);

nlohmann::json simrun_to_json(const SimRun& run);
SimRun simrun_from_json(const nlohmann::json& j);

/// CSV rows (neuron, time, threshold, mode); mode is "auto" or "forced".
void write_simrun_csv(const SimRun& run, std::ostream& os);

/// CSV columns (t0, group, precision, recall, tau_hat).
void write_report_csv_header(std::ostream& os);
void write_report_csv_row(std::ostream& os, double t0, const std::string& group,
                          const AccuracyReport& report);

/// CSV columns (instance_id, N, log10_phi1, log10_phi2, pass).
void write_stability_csv_header(std::ostream& os);
void write_stability_csv_row(std::ostream& os, const std::string& instance,
                             const StabilityReport& report);

void save_json(const nlohmann::json& j, const std::filesystem::path& path);
nlohmann::json load_json(const std::filesystem::path& path);
void save_text(const std::string& text, const std::filesystem::path& path);

} // namespace spikemem
