#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "plausible/contact_trace.hpp"

namespace plausible {

// Link state of one pair at one instant, with the surrounding event times:
// previous/next link-up and previous/next link-down.
struct LinkState {
    bool connected = false;
    std::optional<double> p_up;
    std::optional<double> n_up;
    std::optional<double> p_down;
    std::optional<double> n_down;
};

struct Interval {
    double up;
    double down;
};

// Per-pair sorted interval index over a contact trace. Immutable once built.
class LinkTimeline {
public:
    explicit LinkTimeline(const ContactTrace& trace);

    [[nodiscard]] std::size_t n_nodes() const { return n_nodes_; }
    [[nodiscard]] double duration() const { return duration_; }

    // Throws std::invalid_argument for i == j or out-of-range ids.
    [[nodiscard]] LinkState query(NodeId i, NodeId j, double t) const;
    [[nodiscard]] bool connected(NodeId i, NodeId j, double t) const;
    [[nodiscard]] std::span<const Interval> intervals(NodeId i, NodeId j) const;

    // Drops boundaries that coincide with the edges of the observation window
    // [0, duration]: a contact already up at time 0 or still up at the end has
    // no observed link-up (resp. link-down) there.
    [[nodiscard]] LinkState observed(LinkState s) const;

    // Canonical event list, identical to the trace the timeline was built from.
    [[nodiscard]] std::vector<ContactEvent> events() const;

    [[nodiscard]] std::size_t pair_index(NodeId i, NodeId j) const;

private:
    [[nodiscard]] LinkState query_pair(std::size_t pair, double t) const;

    std::size_t n_nodes_;
    double duration_;
    std::vector<std::size_t> offsets_;  // CSR into intervals_, one slot per unordered pair
    std::vector<Interval> intervals_;
};

}  // namespace plausible
