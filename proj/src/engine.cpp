#include "plausible/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "plausible/rng.hpp"

namespace plausible {

namespace {

// Direction from i toward j; coincident nodes are separated along x by id order.
Vec2 unit_toward(Vec2 delta, double d, NodeId i, NodeId j) {
    if (d > 0.0) return (1.0 / d) * delta;
    return {i < j ? 1.0 : -1.0, 0.0};
}

Vec2 node_force(const ForceField& f, std::span<const Vec2> position, std::span<const Vec2> velocity, NodeId i) {
    const auto n = static_cast<NodeId>(position.size());
    Vec2 total;
    for (NodeId j = 0; j < n; ++j) {
        if (j == i) continue;
        const Vec2 delta = f.space->displacement(position[i], position[j]);
        const double d = delta.norm();
        const LinkState s = f.timeline->observed(f.timeline->query(i, j, f.t));
        const double magnitude = pair_force(d, s, f.t, *f.params);
        if (magnitude != 0.0) total += magnitude * unit_toward(delta, d, i, j);
    }
    total += drag_force(velocity[i], f.params->D);
    total += boundary_force(position[i], *f.space, f.wall_stiffness);
    return total;
}

std::string describe(const SpaceSpec& s) {
    if (s.is_torus()) return "torus:" + format_number(s.as_torus().width) + "x" + format_number(s.as_torus().height);
    if (s.is_corridor()) return "corridor:" + format_number(s.as_corridor().half_width);
    return "plane";
}

}  // namespace

void accumulate_forces_serial(const ForceField& field, std::span<const Vec2> position,
                              std::span<const Vec2> velocity, std::span<const char> skip, std::span<Vec2> force) {
    for (std::size_t i = 0; i < position.size(); ++i)
        force[i] = skip[i] ? Vec2{} : node_force(field, position, velocity, static_cast<NodeId>(i));
}

void accumulate_forces_omp(const ForceField& field, std::span<const Vec2> position,
                           std::span<const Vec2> velocity, std::span<const char> skip, std::span<Vec2> force) {
    const auto n = static_cast<std::ptrdiff_t>(position.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        force[u] = skip[u] ? Vec2{} : node_force(field, position, velocity, static_cast<NodeId>(i));
    }
}

InferenceEngine::InferenceEngine(const ContactTrace& trace, InferenceConfig cfg)
    : timeline_(trace), cfg_(std::move(cfg)), n_nodes_(trace.n_nodes) {
    if (!(trace.duration > 0.0)) throw std::invalid_argument("contact trace duration must be > 0");
    cfg_.params = cfg_.params.resolve(cfg_.space);
    if (cfg_.dt == 0.0) {
        cfg_.dt = 1.0;
        if (trace.sampling_period > 0.0 && trace.sampling_period < 1.0) cfg_.dt = trace.sampling_period;
    }
    if (!(cfg_.dt > 0.0) || !std::isfinite(cfg_.dt)) throw std::invalid_argument("integration step must be > 0");
    if (!(cfg_.relax_speed_factor >= 1.0)) throw std::invalid_argument("relax speed factor must be >= 1");

    is_reference_.assign(n_nodes_, 0);
    for (NodeId id : cfg_.reference_nodes) {
        if (id >= n_nodes_) throw std::invalid_argument("reference node " + std::to_string(id) + " is not in the trace");
        is_reference_[id] = 1;
    }
    if (!cfg_.reference_nodes.empty()) {
        if (!cfg_.ground_truth) throw std::invalid_argument("reference nodes need a ground-truth mobility trace");
        if (cfg_.ground_truth->n_nodes() != n_nodes_)
            throw std::invalid_argument("ground-truth trace node count differs from the contact trace");
        const MobilityTrace& gt = *cfg_.ground_truth;
        const auto steps = static_cast<std::size_t>(std::floor(duration() / cfg_.dt + 1e-9));
        const double last = static_cast<double>(steps) * cfg_.dt;
        if (gt.n_samples() == 0 || gt.time(0) > 1e-6 || gt.end_time() < last - 1e-6)
            throw std::invalid_argument("ground-truth trace does not cover [0, " + format_number(last) + "]");
    }
    if (const auto* known = std::get_if<KnownPositions>(&cfg_.initial))
        if (known->positions.size() != n_nodes_) throw std::invalid_argument("one initial position per node required");
    if (cfg_.anchors == AnchorPolicy::HeadTail) {
        if (!cfg_.space.is_corridor()) throw std::invalid_argument("head/tail anchors require a corridor space");
        const auto& c = cfg_.space.as_corridor();
        if (c.head >= n_nodes_ || c.tail >= n_nodes_) throw std::invalid_argument("anchor node id out of range");
    }
    if (cfg_.space.is_corridor() && std::isnan(cfg_.space.wall_stiffness())) cfg_.space.set_wall_stiffness(cfg_.params.K);
}

// Exact at sample times; between samples, linear along the shortest displacement.
Vec2 InferenceEngine::reference_position(NodeId node, double t) const {
    const MobilityTrace& gt = *cfg_.ground_truth;
    if (const auto k = gt.index_of(t)) return gt.at(*k, node);
    if (gt.n_samples() < 2) return gt.at(0, node);
    const double u = (t - gt.time(0)) / gt.timestep();
    const auto k = std::min(static_cast<std::size_t>(std::max(u, 0.0)), gt.n_samples() - 2);
    const double frac = std::clamp(u - static_cast<double>(k), 0.0, 1.0);
    const Vec2 a = gt.at(k, node);
    return cfg_.space.wrap(a + frac * cfg_.space.displacement(a, gt.at(k + 1, node)));
}

EngineState InferenceEngine::initial_state() const {
    EngineState s;
    s.position.resize(n_nodes_);
    s.velocity.assign(n_nodes_, Vec2{});
    if (const auto* known = std::get_if<KnownPositions>(&cfg_.initial)) {
        for (std::size_t i = 0; i < n_nodes_; ++i) s.position[i] = cfg_.space.wrap(known->positions[i]);
    } else {
        Rng rng(std::get<RandomPositions>(cfg_.initial).seed);
        const double r = cfg_.params.r;
        for (auto& p : s.position) {
            if (cfg_.space.is_torus()) {
                const auto& t = cfg_.space.as_torus();
                p = {rng.uniform(0.0, t.width), rng.uniform(0.0, t.height)};
            } else if (cfg_.space.is_corridor()) {
                const double hw = cfg_.space.as_corridor().half_width;
                p = {rng.uniform(-5.0 * r, 5.0 * r), rng.uniform(-hw, hw)};
            } else {
                p = {rng.uniform(-5.0 * r, 5.0 * r), rng.uniform(-5.0 * r, 5.0 * r)};
            }
        }
    }
    for (NodeId id : cfg_.reference_nodes) s.position[id] = reference_position(id, 0.0);
    apply_anchors(s);
    return s;
}

void InferenceEngine::apply_anchors(EngineState& s) const {
    if (cfg_.anchors != AnchorPolicy::HeadTail) return;
    const auto& c = cfg_.space.as_corridor();
    for (NodeId a : {c.head, c.tail}) {
        s.position[a].y = 0.0;
        s.velocity[a].y = 0.0;
    }
    double front = -kInfinity;
    double back = kInfinity;
    for (NodeId i = 0; i < n_nodes_; ++i) {
        if (i == c.head || i == c.tail) continue;
        front = std::max(front, s.position[i].x);
        back = std::min(back, s.position[i].x);
    }
    if (front >= s.position[c.head].x) s.position[c.head].x = front + 1.0;
    if (back <= s.position[c.tail].x) s.position[c.tail].x = back - 1.0;
}

EngineState InferenceEngine::step(const EngineState& state) const {
    const double dt = cfg_.dt;
    const ForceField field{&timeline_, &cfg_.params, &cfg_.space, state.t,
                           cfg_.space.is_corridor() ? cfg_.space.wall_stiffness() : 0.0};
    std::vector<Vec2> force(n_nodes_);
    if (cfg_.kernel == ForceKernel::Serial)
        accumulate_forces_serial(field, state.position, state.velocity, is_reference_, force);
    else
        accumulate_forces_omp(field, state.position, state.velocity, is_reference_, force);

    const double cap = cfg_.params.v_max * (state.t < cfg_.speed_relax_until ? cfg_.relax_speed_factor : 1.0);
    EngineState next;
    next.t = state.t + dt;
    next.position.resize(n_nodes_);
    next.velocity.resize(n_nodes_);
    for (NodeId i = 0; i < n_nodes_; ++i) {
        if (is_reference_[i]) {
            next.position[i] = reference_position(i, next.t);
            next.velocity[i] = (1.0 / dt) * cfg_.space.displacement(state.position[i], next.position[i]);
            continue;
        }
        if (!force[i].finite())
            throw std::runtime_error("non-finite force on node " + std::to_string(i) + " at t=" + format_number(state.t));
        Vec2 v = state.velocity[i] + dt * force[i];
        const double speed = v.norm();
        if (speed > cap) v *= cap / speed;
        next.velocity[i] = v;
        next.position[i] = cfg_.space.wrap(state.position[i] + dt * v);
    }
    apply_anchors(next);
    return next;
}

MobilityTrace InferenceEngine::run() const {
    MobilityTrace out(cfg_.space, n_nodes_, cfg_.dt, 0.0);
    const ForceParams& p = cfg_.params;
    out.config = {
        {"space", describe(cfg_.space)},
        {"dt", format_number(cfg_.dt)},
        {"K", format_number(p.K)},
        {"G", format_number(p.G)},
        {"alpha", format_number(p.alpha)},
        {"eps0", format_number(p.eps0)},
        {"tau", format_number(p.tau)},
        {"d_max", format_number(p.d_max)},
        {"attraction_cutoff", p.attraction_cutoff ? "on" : "off"},
        {"D", format_number(p.D)},
        {"r", format_number(p.r)},
        {"v_max", format_number(p.v_max)},
        {"references", std::to_string(cfg_.reference_nodes.size())},
        {"init", std::holds_alternative<KnownPositions>(cfg_.initial)
                     ? std::string("known")
                     : "random:" + std::to_string(std::get<RandomPositions>(cfg_.initial).seed)},
        {"speed_relax_until", format_number(cfg_.speed_relax_until)},
        {"relax_speed_factor", format_number(cfg_.relax_speed_factor)},
        {"anchors", cfg_.anchors == AnchorPolicy::HeadTail ? "head-tail" : "none"},
    };
    if (cfg_.space.is_corridor()) out.config.emplace_back("wall_stiffness", format_number(cfg_.space.wall_stiffness()));

    const auto steps = static_cast<std::size_t>(std::floor(duration() / cfg_.dt + 1e-9));
    EngineState state = initial_state();
    out.append_sample(state.position);
    for (std::size_t k = 1; k <= steps; ++k) {
        state = step(state);
        state.t = static_cast<double>(k) * cfg_.dt;  // no drift from repeated addition
        out.append_sample(state.position);
    }
    return out;
}

MobilityTrace infer(const ContactTrace& trace, const InferenceConfig& cfg) { return InferenceEngine(trace, cfg).run(); }

}  // namespace plausible
