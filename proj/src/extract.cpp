#include "plausible/extract.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "plausible/rng.hpp"

namespace plausible {

namespace {

std::size_t sample_stride(const MobilityTrace& m, const SamplingConfig& cfg) {
    if (!(cfg.period > 0.0)) throw std::invalid_argument("sampling period must be > 0");
    if (!(cfg.range > 0.0)) throw std::invalid_argument("transmission range must be > 0");
    const double ratio = cfg.period / m.timestep();
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9)
        throw std::invalid_argument("sampling period must be an integer multiple of the mobility timestep");
    return static_cast<std::size_t>(rounded);
}

// Pair-indexed open-contact bookkeeping shared by both extraction modes.
class ContactRecorder {
public:
    explicit ContactRecorder(std::size_t n) : n_(n), open_since_(n * n, -1.0) {}

    [[nodiscard]] bool is_up(NodeId i, NodeId j) const { return open_since_[index(i, j)] >= 0.0; }
    void up(NodeId i, NodeId j, double t) { open_since_[index(i, j)] = t; }
    void down(NodeId i, NodeId j, double t) {
        double& since = open_since_[index(i, j)];
        if (t > since) events_.push_back({std::min(i, j), std::max(i, j), since, t});
        since = -1.0;
    }

    std::vector<ContactEvent> finish(double end) {
        for (NodeId i = 0; i < n_; ++i)
            for (NodeId j = i + 1; j < n_; ++j)
                if (is_up(i, j)) down(i, j, end);
        return std::move(events_);
    }

private:
    [[nodiscard]] std::size_t index(NodeId i, NodeId j) const {
        return std::min(i, j) * n_ + std::max(i, j);
    }
    std::size_t n_;
    std::vector<double> open_since_;
    std::vector<ContactEvent> events_;
};

}  // namespace

std::vector<NodePair> snapshot_contacts(std::span<const Vec2> positions, double range, const SpaceSpec& space) {
    std::vector<NodePair> out;
    const auto n = static_cast<NodeId>(positions.size());
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j = i + 1; j < n; ++j)
            if (space.distance(positions[i], positions[j]) <= range) out.emplace_back(i, j);
    return out;
}

ContactTrace extract_synchronous(const MobilityTrace& m, const SamplingConfig& cfg) {
    const std::size_t stride = sample_stride(m, cfg);
    const std::size_t n = m.n_nodes();
    const SpaceSpec& space = m.space();
    ContactRecorder rec(n);
    for (std::size_t k = 0; k < m.n_samples(); k += stride) {
        const double t = m.time(k);
        const auto pos = m.sample(k);
        for (NodeId i = 0; i < n; ++i)
            for (NodeId j = i + 1; j < n; ++j) {
                const bool in_range = space.distance(pos[i], pos[j]) <= cfg.range;
                if (in_range && !rec.is_up(i, j)) rec.up(i, j, t);
                else if (!in_range && rec.is_up(i, j)) rec.down(i, j, t);
            }
    }
    const double end = m.end_time();
    return make_contact_trace(rec.finish(end), n, end, cfg.period);
}

std::vector<double> scan_phases(std::size_t n_nodes, const SamplingConfig& cfg) {
    if (cfg.phases) {
        if (cfg.phases->size() != n_nodes) throw std::invalid_argument("one scan phase per node required");
        for (double p : *cfg.phases)
            if (!(p >= 0.0 && p < cfg.period)) throw std::invalid_argument("scan phases must lie in [0, period)");
        return *cfg.phases;
    }
    Rng rng(cfg.seed);
    std::vector<double> phases(n_nodes);
    for (auto& p : phases) p = rng.uniform(0.0, cfg.period);
    return phases;
}

ContactTrace extract_asynchronous(const MobilityTrace& m, const SamplingConfig& cfg) {
    sample_stride(m, cfg);
    const std::size_t n = m.n_nodes();
    const SpaceSpec& space = m.space();
    const auto phases = scan_phases(n, cfg);

    struct Scan {
        std::size_t sample;
        NodeId node;
    };
    std::vector<Scan> scans;
    const double end = m.end_time();
    for (NodeId i = 0; i < n; ++i) {
        for (double s = m.start_time() + phases[i]; s <= end + 1e-9; s += cfg.period) {
            const auto k = static_cast<std::size_t>(std::floor((s - m.start_time()) / m.timestep() + 1e-9));
            scans.push_back({std::min(k, m.n_samples() - 1), i});
        }
    }
    std::sort(scans.begin(), scans.end(), [](const Scan& a, const Scan& b) {
        return a.sample != b.sample ? a.sample < b.sample : a.node < b.node;
    });

    ContactRecorder rec(n);
    for (const Scan& scan : scans) {
        const double t = m.time(scan.sample);
        const auto pos = m.sample(scan.sample);
        const NodeId i = scan.node;
        for (NodeId j = 0; j < n; ++j) {
            if (j == i) continue;
            const bool in_range = space.distance(pos[i], pos[j]) <= cfg.range;
            if (in_range && !rec.is_up(i, j)) rec.up(i, j, t);
            else if (!in_range && rec.is_up(i, j)) rec.down(i, j, t);
        }
    }
    return make_contact_trace(rec.finish(end), n, end, cfg.period);
}

ContactTrace extract_contacts(const MobilityTrace& mobility, const SamplingConfig& cfg) {
    return cfg.mode == SamplingMode::Synchronous ? extract_synchronous(mobility, cfg)
                                                 : extract_asynchronous(mobility, cfg);
}

ContactTrace randomize_trace(const ContactTrace& trace, std::uint64_t seed) {
    const double period = trace.sampling_period;
    if (!(period > 0.0)) throw std::invalid_argument("randomization is undefined for an exact trace (period = 0)");
    const double max_shift = kRandomizeFraction * period;
    Rng rng(seed);
    std::vector<ContactEvent> shifted;
    shifted.reserve(trace.events.size());
    for (const auto& e : trace.events) {
        const double u_up = rng.uniform(0.0, max_shift);
        const double u_down = rng.uniform(0.0, max_shift);
        const double up = std::max(0.0, e.t_up - u_up);
        const double down = e.t_down >= trace.duration ? e.t_down : std::max(0.0, e.t_down - u_down);
        if (down > up) shifted.push_back({e.a, e.b, up, down});
    }
    auto out = make_contact_trace(std::move(shifted), trace.n_nodes, trace.duration, period);
    out.labels = trace.labels;
    return out;
}

}  // namespace plausible
