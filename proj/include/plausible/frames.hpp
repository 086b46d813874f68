#pragma once

#include <iosfwd>
#include <vector>

#include "plausible/contact_trace.hpp"
#include "plausible/extract.hpp"
#include "plausible/mobility_trace.hpp"

namespace plausible {

// A snapshot for plotting or animation: every node's position and the pairs
// in contact at one sample time.
struct Frame {
    double t = 0.0;
    std::vector<Vec2> positions;
    std::vector<NodePair> contacts;
};

// One frame every `stride` seconds starting at the first sample. Contacts
// come from the trace when given, otherwise from distance <= range.
// Throws std::invalid_argument unless stride is a positive multiple of the timestep.
std::vector<Frame> export_frames(const MobilityTrace& m, double stride, double range,
                                 const ContactTrace* contacts = nullptr);

// "#t=<t>" header, "<id> <x> <y>" rows, then "contact <a> <b>" rows.
void write_frame(std::ostream& out, const Frame& frame);
Frame parse_frame(std::istream& in);

}  // namespace plausible
