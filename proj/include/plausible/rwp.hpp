#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "plausible/geometry.hpp"
#include "plausible/mobility_trace.hpp"
#include "plausible/rng.hpp"

namespace plausible {

// Random waypoint on a torus. Legs follow the shortest wrap path.
struct RwpConfig {
    std::size_t n_nodes = 50;
    SpaceSpec space = SpaceSpec::torus(1000.0, 1000.0);
    double v_min = 1.0;
    double v_max = 10.0;
    double pause = 0.0;
    double duration = 1000.0;
    double timestep = 1.0;
    std::uint64_t seed = 0;

    void validate() const;  // throws std::invalid_argument
};

struct RwpNodeState {
    Vec2 position;
    Vec2 waypoint;
    double speed = 0.0;       // speed of the current (or, while paused, the next) leg
    double pause_left = 0.0;  // > 0 while paused at a waypoint
};

// Draws each node's state from the stationary regime: a length-biased leg with
// uniform progress along it, speed with density proportional to 1/v, and (when
// pause > 0) a paused state with its stationary probability.
std::vector<RwpNodeState> rwp_initial_state(const RwpConfig& cfg, Rng& rng);

// One draw from the stationary speed density f(v) = 1 / (v ln(v_max / v_min)).
double sample_stationary_speed(double v_min, double v_max, Rng& rng);

// Advances one node by dt seconds of continuous time, drawing new legs from rng.
void rwp_advance(RwpNodeState& node, const RwpConfig& cfg, double dt, Rng& rng);

// Deterministic in cfg.seed. Samples at 0, timestep, ..., duration.
MobilityTrace rwp_generate(const RwpConfig& cfg);

}  // namespace plausible
