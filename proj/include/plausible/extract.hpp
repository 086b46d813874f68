#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "plausible/contact_trace.hpp"
#include "plausible/mobility_trace.hpp"

namespace plausible {

enum class SamplingMode { Synchronous, Asynchronous };

struct SamplingConfig {
    SamplingMode mode = SamplingMode::Synchronous;
    double period = 1.0;  // T, an integer multiple of the mobility timestep
    double range = 100.0;  // r
    std::uint64_t seed = 0;  // scan phases (asynchronous only)
    // Overrides the random per-node scan phases, each in [0, period).
    std::optional<std::vector<double>> phases;
};

using NodePair = std::pair<NodeId, NodeId>;

// Pairs (i < j) within distance <= range, in lexicographic order.
std::vector<NodePair> snapshot_contacts(std::span<const Vec2> positions, double range, const SpaceSpec& space);

// Global connectivity snapshots every T seconds. A contact still up at the
// end of the mobility trace is closed at its end time.
ContactTrace extract_synchronous(const MobilityTrace& mobility, const SamplingConfig& cfg);

// Each node scans at phase_i + kT (snapped down to the mobility sample grid).
// A link comes up at the first scan by either node that sees the peer in range
// and goes down at the first scan by either node that no longer does.
ContactTrace extract_asynchronous(const MobilityTrace& mobility, const SamplingConfig& cfg);

ContactTrace extract_contacts(const MobilityTrace& mobility, const SamplingConfig& cfg);

// The per-node scan phases extract_asynchronous uses for cfg.
std::vector<double> scan_phases(std::size_t n_nodes, const SamplingConfig& cfg);

// Shifts every link-up and link-down time back by an independent U[0, 0.8T]
// draw, clamps at 0 and re-merges. A link-down at the trace end is censoring,
// not a measurement, and is left in place. Throws for exact traces (T = 0).
ContactTrace randomize_trace(const ContactTrace& trace, std::uint64_t seed);

// Maximum backward shift as a fraction of the sampling period.
inline constexpr double kRandomizeFraction = 0.8;

}  // namespace plausible
