#include "spikemem/serialization.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#include "spikemem/errors.hpp"

namespace spikemem {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{})
        throw InternalError("format_double failed");
    return std::string(buf, ptr);
}

nlohmann::json score_to_json(const SpikeScore& score) {
    nlohmann::json trains = nlohmann::json::array();
    for (const auto& train : score.trains)
        trains.push_back(train.times);
    return nlohmann::json{{"tau0", score.tau0},
                          {"period", score.period},
                          {"trains", std::move(trains)}};
}

SpikeScore score_from_json(const nlohmann::json& j) {
    SpikeScore score;
    score.tau0 = j.at("tau0").get<double>();
    score.period = j.at("period").get<double>();
    for (const auto& arr : j.at("trains")) {
        SpikeTrain train;
        train.period = score.period;
        train.times = arr.get<std::vector<double>>();
        score.trains.push_back(std::move(train));
    }
    validate_score(score, 1e-9 * score.period);
    return score;
}

nlohmann::json network_to_json(const Network& net) {
    nlohmann::json neurons = nlohmann::json::array();
    for (const auto& neuron : net.neurons) {
        nlohmann::json synapses = nlohmann::json::array();
        for (const auto& syn : neuron.synapses)
            synapses.push_back({{"src", syn.source},
                                {"delay", syn.delay},
                                {"weight", syn.weight}});
        neurons.push_back({{"synapses", std::move(synapses)}});
    }
    return nlohmann::json{{"L", net.size()},
                          {"K", net.inputs_per_neuron()},
                          {"beta", net.beta},
                          {"theta0", net.theta0},
                          {"tau0", net.tau0},
                          {"d_min", net.d_min},
                          {"d_max", net.d_max},
                          {"sigma_theta", net.sigma_theta},
                          {"neurons", std::move(neurons)}};
}

Network network_from_json(const nlohmann::json& j) {
    Network net;
    net.beta = j.at("beta").get<double>();
    net.theta0 = j.at("theta0").get<double>();
    net.tau0 = j.at("tau0").get<double>();
    net.d_min = j.at("d_min").get<double>();
    net.d_max = j.at("d_max").get<double>();
    net.sigma_theta = j.value("sigma_theta", 0.0);
    for (const auto& jn : j.at("neurons")) {
        Neuron neuron;
        for (const auto& js : jn.at("synapses"))
            neuron.synapses.push_back(Synapse{js.at("src").get<std::uint32_t>(),
                                              js.at("delay").get<double>(),
                                              js.at("weight").get<double>()});
        net.neurons.push_back(std::move(neuron));
    }
    if (net.size() != j.at("L").get<std::size_t>() ||
        net.inputs_per_neuron() != j.at("K").get<std::size_t>())
        throw IoError("network json: L/K fields disagree with neuron list");
    validate_network(net);
    return net;
}

namespace {
const char* phase_mode_name(PhaseMode mode) {
    return mode == PhaseMode::forced ? "forced" : "autonomous";
}
PhaseMode phase_mode_from(const std::string& s) {
    return s == "forced" ? PhaseMode::forced : PhaseMode::autonomous;
}
} // namespace

nlohmann::json simrun_to_json(const SimRun& run) {
    nlohmann::json firings = nlohmann::json::array();
    for (std::size_t ell = 0; ell < run.firings.size(); ++ell) {
        for (const auto& f : run.firings[ell]) {
            nlohmann::json row{{"neuron", ell},
                               {"time", f.time},
                               {"mode", f.forced ? "forced" : "auto"}};
            if (!f.forced)
                row["threshold"] = f.threshold;
            firings.push_back(std::move(row));
        }
    }
    nlohmann::json phases = nlohmann::json::array();
    for (const auto& ph : run.phases)
        phases.push_back({{"begin", ph.begin},
                          {"end", ph.end},
                          {"mode", phase_mode_name(ph.mode)},
                          {"score", ph.score_index}});
    return nlohmann::json{{"horizon", run.horizon},
                          {"neurons", run.firings.size()},
                          {"firings", std::move(firings)},
                          {"phases", std::move(phases)}};
}

SimRun simrun_from_json(const nlohmann::json& j) {
    SimRun run;
    run.horizon = j.at("horizon").get<double>();
    run.firings.resize(j.at("neurons").get<std::size_t>());
    for (const auto& row : j.at("firings")) {
        Firing f;
        f.time = row.at("time").get<double>();
        f.forced = row.at("mode").get<std::string>() == "forced";
        f.threshold = f.forced ? std::nan("") : row.at("threshold").get<double>();
        run.firings[row.at("neuron").get<std::size_t>()].push_back(f);
    }
    for (const auto& jp : j.value("phases", nlohmann::json::array())) {
        Phase ph;
        ph.begin = jp.at("begin").get<double>();
        ph.end = jp.at("end").get<double>();
        ph.mode = phase_mode_from(jp.at("mode").get<std::string>());
        ph.score_index = jp.at("score").get<std::uint32_t>();
        run.phases.push_back(ph);
    }
    return run;
}

void write_simrun_csv(const SimRun& run, std::ostream& os) {
    os << "neuron,time,threshold,mode\n";
    for (std::size_t ell = 0; ell < run.firings.size(); ++ell)
        for (const auto& f : run.firings[ell]) {
            os << ell << "," << format_double(f.time) << ",";
            if (f.forced)
                os << "nan,forced\n";
            else
                os << format_double(f.threshold) << ",auto\n";
        }
}

void write_report_csv_header(std::ostream& os) {
    os << "t0,group,precision,recall,tau_hat\n";
}

void write_report_csv_row(std::ostream& os, double t0, const std::string& group,
                          const AccuracyReport& report) {
    os << format_double(t0) << "," << group << ","
       << format_double(report.precision) << "," << format_double(report.recall)
       << "," << format_double(report.tau_hat) << "\n";
}

void write_stability_csv_header(std::ostream& os) {
    os << "instance_id,N,log10_phi1,log10_phi2,pass\n";
}

void write_stability_csv_row(std::ostream& os, const std::string& instance,
                             const StabilityReport& report) {
    os << instance << "," << report.spikes_per_period << ","
       << format_double(report.log10_phi1) << ","
       << format_double(report.log10_phi2) << "," << (report.pass ? 1 : 0)
       << "\n";
}

void save_json(const nlohmann::json& j, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os)
        throw IoError("cannot open for writing: " + path.string());
    os << j.dump(2) << "\n";
    if (!os)
        throw IoError("write failed: " + path.string());
}

nlohmann::json load_json(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is)
        throw IoError("cannot open for reading: " + path.string());
    nlohmann::json j;
    is >> j;
    return j;
}

void save_text(const std::string& text, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os)
        throw IoError("cannot open for writing: " + path.string());
    os << text;
    if (!os)
        throw IoError("write failed: " + path.string());
}

} // namespace spikemem
