#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "plausible/contact_trace.hpp"
#include "plausible/forces.hpp"
#include "plausible/link_timeline.hpp"
#include "plausible/mobility_trace.hpp"

namespace plausible {

struct KnownPositions {
    std::vector<Vec2> positions;
};
struct RandomPositions {
    std::uint64_t seed = 0;
};
using InitialPositions = std::variant<KnownPositions, RandomPositions>;

enum class AnchorPolicy { None, HeadTail };

// Which force accumulation loop step() runs. Both give bit-identical results.
enum class ForceKernel { Serial, OpenMP };

struct InferenceConfig {
    SpaceSpec space = SpaceSpec::torus(1000.0, 1000.0);
    ForceParams params;
    double dt = 0.0;  // 0 = 1 s, or the trace's sampling period when shorter

    // Nodes pinned to their trajectories in ground_truth at every step.
    std::vector<NodeId> reference_nodes;
    std::shared_ptr<const MobilityTrace> ground_truth;

    InitialPositions initial = RandomPositions{};

    // Before this time the speed cap is relax_speed_factor * v_max instead of v_max.
    double speed_relax_until = 0.0;
    double relax_speed_factor = 10.0;

    AnchorPolicy anchors = AnchorPolicy::None;
    ForceKernel kernel = ForceKernel::OpenMP;
};

struct EngineState {
    double t = 0.0;
    std::vector<Vec2> position;
    std::vector<Vec2> velocity;
};

// Per-step inputs of the force accumulation kernels.
struct ForceField {
    const LinkTimeline* timeline;
    const ForceParams* params;
    const SpaceSpec* space;
    double t;
    double wall_stiffness;
};

// Net force on every node (unit mass, so also the acceleration) at field.t.
// Entries whose skip flag is set are left at zero. The serial loop is the
// reference; the OpenMP loop parallelizes over receiving nodes and sums each
// node's pair contributions in the same order.
void accumulate_forces_serial(const ForceField& field, std::span<const Vec2> position,
                              std::span<const Vec2> velocity, std::span<const char> skip, std::span<Vec2> force);
void accumulate_forces_omp(const ForceField& field, std::span<const Vec2> position,
                           std::span<const Vec2> velocity, std::span<const char> skip, std::span<Vec2> force);

// Online force-directed layout of a contact trace's time-varying connectivity
// graph, integrated with semi-implicit Euler under a maximum speed.
class InferenceEngine {
public:
    InferenceEngine(const ContactTrace& trace, InferenceConfig cfg);

    [[nodiscard]] const InferenceConfig& config() const { return cfg_; }
    [[nodiscard]] const LinkTimeline& timeline() const { return timeline_; }
    [[nodiscard]] double duration() const { return timeline_.duration(); }

    [[nodiscard]] EngineState initial_state() const;
    // Advances by one dt. Throws std::runtime_error on a non-finite force.
    [[nodiscard]] EngineState step(const EngineState& state) const;

    // Iterates from the initial state over [0, duration]; one sample per dt.
    [[nodiscard]] MobilityTrace run() const;

private:
    [[nodiscard]] Vec2 reference_position(NodeId node, double t) const;
    void apply_anchors(EngineState& state) const;

    LinkTimeline timeline_;
    InferenceConfig cfg_;
    std::vector<char> is_reference_;
    std::size_t n_nodes_;
};

MobilityTrace infer(const ContactTrace& trace, const InferenceConfig& cfg);

}  // namespace plausible
