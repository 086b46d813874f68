#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "plausible/geometry.hpp"

namespace plausible {

// Thrown on malformed input files. Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    [[nodiscard]] std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// A contact is up on the half-open interval [t_up, t_down).
struct ContactEvent {
    NodeId a = 0;
    NodeId b = 0;
    double t_up = 0.0;
    double t_down = 0.0;

    friend bool operator==(const ContactEvent&, const ContactEvent&) = default;
};

struct ContactTrace {
    std::vector<ContactEvent> events;  // canonical: a < b, sorted by (t_up, a, b)
    std::size_t n_nodes = 0;
    double duration = 0.0;
    double sampling_period = 0.0;  // 0 = exact event times
    // Original node labels, indexed by dense id. Empty when ids were already dense.
    std::vector<std::int64_t> labels;
};

// Validates, orders each pair canonically, sorts and merges same-pair intervals
// that touch or overlap. Returns the number of merges performed through
// merged_out when given. Throws std::invalid_argument on invalid events.
ContactTrace make_contact_trace(std::vector<ContactEvent> events, std::size_t n_nodes, double duration,
                                double sampling_period, std::size_t* merged_out = nullptr);

struct ParsedContactTrace {
    ContactTrace trace;
    std::size_t merged = 0;  // overlapping same-pair intervals that were merged
};

ParsedContactTrace parse_contact_trace(std::istream& in);
void write_contact_trace(std::ostream& out, const ContactTrace& trace);

// Decimal with at most 6 fractional digits, trailing zeros dropped.
std::string format_number(double v);

}  // namespace plausible
