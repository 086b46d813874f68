#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "plausible/geometry.hpp"

namespace plausible {

// Positions of every node at uniformly spaced sample times start + k * timestep.
class MobilityTrace {
public:
    MobilityTrace(SpaceSpec space, std::size_t n_nodes, double timestep, double start = 0.0);

    [[nodiscard]] const SpaceSpec& space() const { return space_; }
    [[nodiscard]] std::size_t n_nodes() const { return n_nodes_; }
    [[nodiscard]] std::size_t n_samples() const { return n_nodes_ ? positions_.size() / n_nodes_ : 0; }
    [[nodiscard]] double timestep() const { return timestep_; }
    [[nodiscard]] double start_time() const { return start_; }
    [[nodiscard]] double time(std::size_t k) const { return start_ + static_cast<double>(k) * timestep_; }
    [[nodiscard]] double end_time() const { return n_samples() ? time(n_samples() - 1) : start_; }

    [[nodiscard]] std::span<const Vec2> sample(std::size_t k) const {
        return {positions_.data() + k * n_nodes_, n_nodes_};
    }
    [[nodiscard]] Vec2 at(std::size_t k, NodeId node) const { return positions_[k * n_nodes_ + node]; }

    // Index of the sample at time t, if t lies on the sample grid (within 1e-6 s).
    [[nodiscard]] std::optional<std::size_t> index_of(double t) const;

    // Appends one sample; torus positions are wrapped. Throws on size mismatch
    // or non-finite coordinates.
    void append_sample(std::span<const Vec2> positions);

    // Free-form `key=value` entries echoed in the file header.
    std::vector<std::pair<std::string, std::string>> config;

private:
    SpaceSpec space_;
    std::size_t n_nodes_;
    double timestep_;
    double start_;
    std::vector<Vec2> positions_;
};

MobilityTrace parse_mobility_trace(std::istream& in);
void write_mobility_trace(std::ostream& out, const MobilityTrace& trace);

}  // namespace plausible
