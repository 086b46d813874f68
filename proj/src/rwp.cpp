#include "plausible/rwp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "plausible/contact_trace.hpp"

namespace plausible {

void RwpConfig::validate() const {
    if (!space.is_torus()) throw std::invalid_argument("random waypoint requires a torus space");
    if (!(v_min > 0.0)) throw std::invalid_argument("v_min must be > 0: the stationary speed density 1/v is not normalizable at 0");
    if (!(v_max >= v_min)) throw std::invalid_argument("v_max must be >= v_min");
    if (!(pause >= 0.0)) throw std::invalid_argument("pause must be >= 0");
    if (!(duration > 0.0) || !(timestep > 0.0)) throw std::invalid_argument("duration and timestep must be > 0");
}

double sample_stationary_speed(double v_min, double v_max, Rng& rng) {
    if (v_min == v_max) return v_min;
    // Inverse CDF of 1/v on [v_min, v_max].
    return v_min * std::pow(v_max / v_min, rng.uniform());
}

namespace {

Vec2 uniform_point(const Torus& t, Rng& rng) { return {rng.uniform(0.0, t.width), rng.uniform(0.0, t.height)}; }

double uniform_speed(const RwpConfig& cfg, Rng& rng) {
    return cfg.v_min == cfg.v_max ? cfg.v_min : rng.uniform(cfg.v_min, cfg.v_max);
}

void start_leg(RwpNodeState& node, const RwpConfig& cfg, Rng& rng) {
    node.waypoint = uniform_point(cfg.space.as_torus(), rng);
    node.speed = uniform_speed(cfg, rng);
    node.pause_left = 0.0;
}

}  // namespace

std::vector<RwpNodeState> rwp_initial_state(const RwpConfig& cfg, Rng& rng) {
    cfg.validate();
    const Torus& torus = cfg.space.as_torus();
    const double max_leg = 0.5 * std::hypot(torus.width, torus.height);

    double pause_probability = 0.0;
    if (cfg.pause > 0.0) {
        const double mean_inverse_speed =
            cfg.v_min == cfg.v_max ? 1.0 / cfg.v_min : std::log(cfg.v_max / cfg.v_min) / (cfg.v_max - cfg.v_min);
        const double mean_travel = mean_center_distance(torus.width, torus.height) * mean_inverse_speed;
        pause_probability = cfg.pause / (cfg.pause + mean_travel);
    }

    std::vector<RwpNodeState> nodes(cfg.n_nodes);
    for (auto& node : nodes) {
        if (pause_probability > 0.0 && rng.uniform() < pause_probability) {
            node.position = uniform_point(torus, rng);
            node.waypoint = node.position;
            node.speed = uniform_speed(cfg, rng);
            node.pause_left = cfg.pause * (1.0 - rng.uniform());
            continue;
        }
        Vec2 from, to;
        Vec2 leg;
        do {
            from = uniform_point(torus, rng);
            to = uniform_point(torus, rng);
            leg = cfg.space.displacement(from, to);
        } while (rng.uniform() * max_leg >= leg.norm());
        node.position = cfg.space.wrap(from + rng.uniform() * leg);
        node.waypoint = to;
        node.speed = sample_stationary_speed(cfg.v_min, cfg.v_max, rng);
    }
    return nodes;
}

void rwp_advance(RwpNodeState& node, const RwpConfig& cfg, double dt, Rng& rng) {
    double remaining = dt;
    while (remaining > 0.0) {
        if (node.pause_left > 0.0) {
            const double used = std::min(node.pause_left, remaining);
            node.pause_left -= used;
            remaining -= used;
            if (node.pause_left <= 0.0) start_leg(node, cfg, rng);
            continue;
        }
        const Vec2 leg = cfg.space.displacement(node.position, node.waypoint);
        const double length = leg.norm();
        const double arrival = length / node.speed;
        if (arrival <= remaining) {
            node.position = node.waypoint;
            remaining -= arrival;
            if (cfg.pause > 0.0) {
                node.pause_left = cfg.pause;
            } else {
                start_leg(node, cfg, rng);
            }
        } else {
            node.position = cfg.space.wrap(node.position + (node.speed * remaining / length) * leg);
            remaining = 0.0;
        }
    }
}

MobilityTrace rwp_generate(const RwpConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    auto nodes = rwp_initial_state(cfg, rng);
    MobilityTrace trace(cfg.space, cfg.n_nodes, cfg.timestep, 0.0);
    trace.config = {{"model", "rwp"},
                    {"v_min", format_number(cfg.v_min)},
                    {"v_max", format_number(cfg.v_max)},
                    {"pause", format_number(cfg.pause)},
                    {"seed", std::to_string(cfg.seed)}};
    const auto steps = static_cast<std::size_t>(std::floor(cfg.duration / cfg.timestep + 1e-9));
    std::vector<Vec2> sample(cfg.n_nodes);
    for (std::size_t k = 0;; ++k) {
        for (std::size_t i = 0; i < nodes.size(); ++i) sample[i] = nodes[i].position;
        trace.append_sample(sample);
        if (k == steps) break;
        for (auto& node : nodes) rwp_advance(node, cfg, cfg.timestep, rng);
    }
    return trace;
}

}  // namespace plausible
