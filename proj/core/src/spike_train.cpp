#include "spikemem/spike_train.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "spikemem/errors.hpp"

namespace spikemem {

double min_circular_gap(const SpikeTrain& train) {
    const auto& t = train.times;
    if (t.empty())
        return std::numeric_limits<double>::infinity();
    if (t.size() == 1)
        return train.period;
    double gap = train.period - t.back() + t.front();
    for (std::size_t i = 1; i < t.size(); ++i)
        gap = std::min(gap, t[i] - t[i - 1]);
    return gap;
}

void validate_train(const SpikeTrain& train, double tau0, double slack) {
    if (!(train.period > 0.0))
        throw InvariantError("spike train: period must be positive");
    if (!std::is_sorted(train.times.begin(), train.times.end()))
        throw InvariantError("spike train: times must be sorted");
    for (double t : train.times)
        if (t < 0.0 || t >= train.period)
            throw InvariantError("spike train: time outside [0, period)");
    if (static_cast<double>(train.times.size()) >= train.period / tau0)
        throw InvariantError("spike train: count must be < period/tau0");
    if (min_circular_gap(train) < tau0 - slack)
        throw InvariantError("spike train: circular gap below tau0 (gap " +
                             std::to_string(min_circular_gap(train)) + ")");
}

std::size_t SpikeScore::total_spikes() const {
    std::size_t n = 0;
    for (const auto& tr : trains)
        n += tr.count();
    return n;
}

void validate_score(const SpikeScore& score, double slack) {
    if (!(score.tau0 > 0.0))
        throw InvariantError("spike score: tau0 must be positive");
    for (const auto& tr : score.trains) {
        if (tr.period != score.period)
            throw InvariantError("spike score: trains must share the period");
        validate_train(tr, score.tau0, slack);
    }
}

} // namespace spikemem
