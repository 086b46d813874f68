#include "plausible/mobility_trace.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "plausible/contact_trace.hpp"

namespace plausible {

MobilityTrace::MobilityTrace(SpaceSpec space, std::size_t n_nodes, double timestep, double start)
    : space_(std::move(space)), n_nodes_(n_nodes), timestep_(timestep), start_(start) {
    if (!(timestep > 0.0) || !std::isfinite(timestep)) throw std::invalid_argument("mobility timestep must be > 0");
}

std::optional<std::size_t> MobilityTrace::index_of(double t) const {
    const double k = std::round((t - start_) / timestep_);
    if (k < 0.0 || k >= static_cast<double>(n_samples())) return std::nullopt;
    if (std::abs(time(static_cast<std::size_t>(k)) - t) > 1e-6) return std::nullopt;
    return static_cast<std::size_t>(k);
}

void MobilityTrace::append_sample(std::span<const Vec2> positions) {
    if (positions.size() != n_nodes_) throw std::invalid_argument("sample size does not match node count");
    for (const Vec2 p : positions) {
        if (!p.finite()) throw std::invalid_argument("non-finite position");
        positions_.push_back(space_.wrap(p));
    }
}

namespace {

double number(const std::string& tok, std::size_t line) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        throw ParseError(line, "malformed number '" + tok + "'");
    }
    if (used != tok.size() || !std::isfinite(v)) throw ParseError(line, "malformed number '" + tok + "'");
    return v;
}

std::size_t count(const std::string& tok, std::size_t line) {
    const double v = number(tok, line);
    if (v < 0.0 || v != std::floor(v)) throw ParseError(line, "expected a non-negative integer, got '" + tok + "'");
    return static_cast<std::size_t>(v);
}

SpaceSpec parse_space(std::istringstream& f, std::size_t line) {
    std::string kind;
    f >> kind;
    if (kind == "torus") {
        std::string w, h;
        if (!(f >> w >> h)) throw ParseError(line, "#space torus needs <W> <H>");
        try {
            return SpaceSpec::torus(number(w, line), number(h, line));
        } catch (const std::invalid_argument& e) {
            throw ParseError(line, e.what());
        }
    }
    if (kind == "plane") return SpaceSpec::plane();
    if (kind == "corridor") {
        std::string hw, head, tail, stiff;
        if (!(f >> hw >> head >> tail)) throw ParseError(line, "#space corridor needs <half_width> <head> <tail>");
        double k = std::nan("");
        if (f >> stiff) k = number(stiff, line);
        try {
            return SpaceSpec::corridor(number(hw, line), static_cast<NodeId>(count(head, line)),
                                       static_cast<NodeId>(count(tail, line)), k);
        } catch (const std::invalid_argument& e) {
            throw ParseError(line, e.what());
        }
    }
    throw ParseError(line, "unknown space '" + kind + "'");
}

// A wrapped coordinate just below the period must not round up to the period itself.
std::string coordinate(double v, double period) {
    std::string s = format_number(v);
    if (period > 0.0 && std::stod(s) >= period) s = "0";
    return s;
}

}  // namespace

MobilityTrace parse_mobility_trace(std::istream& in) {
    std::optional<SpaceSpec> space;
    std::optional<double> dt;
    std::optional<std::size_t> nodes;
    std::vector<std::pair<std::string, std::string>> config;
    std::optional<MobilityTrace> trace;

    std::vector<Vec2> current;
    std::vector<bool> seen;
    std::optional<double> current_t;
    std::size_t current_line = 0;

    auto flush = [&](std::size_t line) {
        for (std::size_t i = 0; i < seen.size(); ++i)
            if (!seen[i]) throw ParseError(line, "node " + std::to_string(i) + " missing at t=" + format_number(*current_t));
        trace->append_sample(current);
    };

    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream f(raw);
        std::string head;
        f >> head;
        if (head.front() == '#') {
            if (trace) throw ParseError(lineno, "header line after data");
            if (head == "#space") {
                space = parse_space(f, lineno);
            } else if (head == "#dt") {
                std::string v;
                f >> v;
                dt = number(v, lineno);
                if (!(*dt > 0.0)) throw ParseError(lineno, "#dt must be > 0");
            } else if (head == "#nodes") {
                std::string v;
                f >> v;
                nodes = count(v, lineno);
            } else if (head == "#config") {
                std::string kv;
                f >> kv;
                const auto eq = kv.find('=');
                if (eq == std::string::npos) throw ParseError(lineno, "#config expects key=value");
                config.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
            }
            continue;
        }
        if (!trace) {
            if (!space || !dt || !nodes) throw ParseError(lineno, "data before #space, #dt and #nodes headers");
            current.assign(*nodes, Vec2{});
            seen.assign(*nodes, false);
        }
        std::string ts, ids, xs, ys, extra;
        std::istringstream fields(raw);
        if (!(fields >> ts >> ids >> xs >> ys) || (fields >> extra))
            throw ParseError(lineno, "expected '<t> <id> <x> <y>'");
        const double t = number(ts, lineno);
        const std::size_t id = count(ids, lineno);
        const Vec2 p{number(xs, lineno), number(ys, lineno)};
        if (id >= *nodes) throw ParseError(lineno, "node id exceeds #nodes");

        if (!trace) {
            if (std::abs(t / *dt - std::round(t / *dt)) > 1e-6)
                throw ParseError(lineno, "sample time is not a multiple of the timestep");
            trace.emplace(*space, *nodes, *dt, t);
            current_t = t;
        } else if (t != *current_t) {
            if (t < *current_t) throw ParseError(lineno, "sample times must be grouped in ascending order");
            flush(current_line);
            const double expected = trace->time(trace->n_samples());
            if (std::abs(t - expected) > 1e-6) {
                if (std::abs(t / *dt - std::round(t / *dt)) > 1e-6)
                    throw ParseError(lineno, "sample time is not a multiple of the timestep");
                throw ParseError(lineno, "non-uniform timestep: expected t=" + format_number(expected));
            }
            current_t = t;
            seen.assign(*nodes, false);
        }
        if (seen[id]) throw ParseError(lineno, "duplicate position for node " + std::to_string(id));
        seen[id] = true;
        current[id] = p;
        current_line = lineno;
    }
    if (!trace) {
        if (!space || !dt || !nodes) throw ParseError(lineno, "missing #space, #dt or #nodes header");
        trace.emplace(*space, *nodes, *dt, 0.0);
    } else {
        flush(current_line);
    }
    trace->config = std::move(config);
    return std::move(*trace);
}

void write_mobility_trace(std::ostream& out, const MobilityTrace& trace) {
    const SpaceSpec& s = trace.space();
    if (s.is_torus()) {
        out << "#space torus " << format_number(s.as_torus().width) << ' ' << format_number(s.as_torus().height) << '\n';
    } else if (s.is_corridor()) {
        const auto& c = s.as_corridor();
        out << "#space corridor " << format_number(c.half_width) << ' ' << c.head << ' ' << c.tail;
        if (std::isfinite(s.wall_stiffness())) out << ' ' << format_number(s.wall_stiffness());
        out << '\n';
    } else {
        out << "#space plane\n";
    }
    const double period_x = s.is_torus() ? s.as_torus().width : 0.0;
    const double period_y = s.is_torus() ? s.as_torus().height : 0.0;
    out << "#dt " << format_number(trace.timestep()) << '\n';
    out << "#nodes " << trace.n_nodes() << '\n';
    for (const auto& [k, v] : trace.config) out << "#config " << k << '=' << v << '\n';
    for (std::size_t k = 0; k < trace.n_samples(); ++k) {
        const std::string t = format_number(trace.time(k));
        for (NodeId i = 0; i < trace.n_nodes(); ++i) {
            const Vec2 p = trace.at(k, i);
            out << t << ' ' << i << ' ' << coordinate(p.x, period_x) << ' ' << coordinate(p.y, period_y) << '\n';
        }
    }
}

}  // namespace plausible
