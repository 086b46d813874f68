#include "plausible/frames.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "plausible/link_timeline.hpp"

namespace plausible {

std::vector<Frame> export_frames(const MobilityTrace& m, double stride, double range, const ContactTrace* contacts) {
    const double ratio = stride / m.timestep();
    const double steps = std::round(ratio);
    if (!(stride > 0.0) || steps < 1.0 || std::abs(ratio - steps) > 1e-9 * std::max(1.0, ratio))
        throw std::invalid_argument("frame stride must be a positive multiple of the timestep " +
                                    format_number(m.timestep()));
    const auto every = static_cast<std::size_t>(steps);

    std::optional<LinkTimeline> timeline;
    if (contacts) {
        if (contacts->n_nodes != m.n_nodes()) throw std::invalid_argument("contact trace node count differs from the mobility trace");
        timeline.emplace(*contacts);
    }

    std::vector<Frame> frames;
    for (std::size_t k = 0; k < m.n_samples(); k += every) {
        Frame f;
        f.t = m.time(k);
        const auto pos = m.sample(k);
        f.positions.assign(pos.begin(), pos.end());
        if (timeline) {
            for (NodeId a = 0; a < m.n_nodes(); ++a)
                for (NodeId b = a + 1; b < m.n_nodes(); ++b)
                    if (timeline->connected(a, b, f.t)) f.contacts.emplace_back(a, b);
        } else {
            f.contacts = snapshot_contacts(pos, range, m.space());
        }
        frames.push_back(std::move(f));
    }
    return frames;
}

void write_frame(std::ostream& out, const Frame& frame) {
    out << "#t=" << format_number(frame.t) << '\n';
    for (std::size_t i = 0; i < frame.positions.size(); ++i)
        out << i << ' ' << format_number(frame.positions[i].x) << ' ' << format_number(frame.positions[i].y) << '\n';
    for (const auto& [a, b] : frame.contacts) out << "contact " << a << ' ' << b << '\n';
}

Frame parse_frame(std::istream& in) {
    Frame f;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line.rfind("#t=", 0) == 0) {
            f.t = std::stod(line.substr(3));
            continue;
        }
        if (line[0] == '#') continue;
        std::istringstream ls(line);
        if (line.rfind("contact", 0) == 0) {
            std::string tag;
            NodeId a = 0, b = 0;
            if (!(ls >> tag >> a >> b)) throw ParseError(line_no, "malformed contact row");
            f.contacts.emplace_back(a, b);
            continue;
        }
        std::size_t id = 0;
        Vec2 p;
        if (!(ls >> id >> p.x >> p.y)) throw ParseError(line_no, "malformed position row");
        if (id != f.positions.size()) throw ParseError(line_no, "position rows must list ids 0..N-1 in order");
        f.positions.push_back(p);
    }
    return f;
}

}  // namespace plausible
