#include "plausible/link_timeline.hpp"

#include <algorithm>
#include <stdexcept>

namespace plausible {

LinkTimeline::LinkTimeline(const ContactTrace& trace) : n_nodes_(trace.n_nodes), duration_(trace.duration) {
    const std::size_t n_pairs = n_nodes_ < 2 ? 0 : n_nodes_ * (n_nodes_ - 1) / 2;
    std::vector<std::size_t> counts(n_pairs, 0);
    for (const auto& e : trace.events) ++counts[pair_index(e.a, e.b)];
    offsets_.assign(n_pairs + 1, 0);
    for (std::size_t p = 0; p < n_pairs; ++p) offsets_[p + 1] = offsets_[p] + counts[p];
    intervals_.resize(offsets_.back());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& e : trace.events) intervals_[fill[pair_index(e.a, e.b)]++] = {e.t_up, e.t_down};
    for (std::size_t p = 0; p < n_pairs; ++p) {
        auto first = intervals_.begin() + static_cast<std::ptrdiff_t>(offsets_[p]);
        auto last = intervals_.begin() + static_cast<std::ptrdiff_t>(offsets_[p + 1]);
        std::sort(first, last, [](const Interval& x, const Interval& y) { return x.up < y.up; });
    }
}

std::size_t LinkTimeline::pair_index(NodeId i, NodeId j) const {
    if (i == j) throw std::invalid_argument("link query on identical nodes");
    if (i > j) std::swap(i, j);
    if (j >= n_nodes_) throw std::invalid_argument("link query node id out of range");
    const std::size_t a = i;
    return a * (2 * n_nodes_ - a - 1) / 2 + (j - a - 1);
}

std::span<const Interval> LinkTimeline::intervals(NodeId i, NodeId j) const {
    const std::size_t p = pair_index(i, j);
    return {intervals_.data() + offsets_[p], offsets_[p + 1] - offsets_[p]};
}

LinkState LinkTimeline::query(NodeId i, NodeId j, double t) const { return query_pair(pair_index(i, j), t); }

bool LinkTimeline::connected(NodeId i, NodeId j, double t) const { return query(i, j, t).connected; }

LinkState LinkTimeline::query_pair(std::size_t pair, double t) const {
    const Interval* first = intervals_.data() + offsets_[pair];
    const Interval* last = intervals_.data() + offsets_[pair + 1];
    // First interval that comes up strictly after t; the one before it is the latest with up <= t.
    const Interval* next = std::upper_bound(first, last, t, [](double v, const Interval& iv) { return v < iv.up; });
    LinkState s;
    if (next != first) {
        const Interval& cur = *(next - 1);
        s.p_up = cur.up;
        if (t < cur.down) {
            s.connected = true;
            s.n_down = cur.down;
            if (next - 1 != first) s.p_down = (next - 2)->down;
        } else {
            s.p_down = cur.down;
        }
    }
    if (next != last) {
        s.n_up = next->up;
        if (!s.connected) s.n_down = next->down;
    }
    return s;
}

LinkState LinkTimeline::observed(LinkState s) const {
    if (s.p_up && *s.p_up <= 0.0) s.p_up.reset();
    if (s.n_down && *s.n_down >= duration_) s.n_down.reset();
    if (s.p_down && *s.p_down >= duration_) s.p_down.reset();
    return s;
}

std::vector<ContactEvent> LinkTimeline::events() const {
    std::vector<ContactEvent> out;
    out.reserve(intervals_.size());
    for (NodeId i = 0; i + 1 < n_nodes_; ++i)
        for (NodeId j = i + 1; j < n_nodes_; ++j)
            for (const auto& iv : intervals(i, j)) out.push_back({i, j, iv.up, iv.down});
    std::sort(out.begin(), out.end(), [](const ContactEvent& x, const ContactEvent& y) {
        if (x.t_up != y.t_up) return x.t_up < y.t_up;
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    });
    return out;
}

}  // namespace plausible
