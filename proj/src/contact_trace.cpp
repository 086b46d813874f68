#include "plausible/contact_trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace plausible {

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    std::string s(buf);
    if (const auto dot = s.find('.'); dot != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    if (s == "-0") s = "0";
    return s;
}

ContactTrace make_contact_trace(std::vector<ContactEvent> events, std::size_t n_nodes, double duration,
                                double sampling_period, std::size_t* merged_out) {
    if (!(duration >= 0.0) || !std::isfinite(duration)) throw std::invalid_argument("trace duration must be >= 0");
    if (!(sampling_period >= 0.0)) throw std::invalid_argument("sampling period must be >= 0");
    for (auto& e : events) {
        if (e.a == e.b) throw std::invalid_argument("contact event between a node and itself");
        if (e.a > e.b) std::swap(e.a, e.b);
        if (e.b >= n_nodes) throw std::invalid_argument("contact event node id out of range");
        if (!std::isfinite(e.t_up) || !std::isfinite(e.t_down) || e.t_up < 0.0)
            throw std::invalid_argument("contact event times must be finite and >= 0");
        if (!(e.t_up < e.t_down)) throw std::invalid_argument("negative-duration event");
        if (e.t_down > duration) throw std::invalid_argument("contact event ends after the trace duration");
    }
    std::sort(events.begin(), events.end(), [](const ContactEvent& x, const ContactEvent& y) {
        if (x.a != y.a) return x.a < y.a;
        if (x.b != y.b) return x.b < y.b;
        return x.t_up < y.t_up;
    });
    std::vector<ContactEvent> merged;
    merged.reserve(events.size());
    std::size_t n_merged = 0;
    for (const auto& e : events) {
        if (!merged.empty() && merged.back().a == e.a && merged.back().b == e.b && e.t_up <= merged.back().t_down) {
            merged.back().t_down = std::max(merged.back().t_down, e.t_down);
            ++n_merged;
            continue;
        }
        merged.push_back(e);
    }
    std::sort(merged.begin(), merged.end(), [](const ContactEvent& x, const ContactEvent& y) {
        if (x.t_up != y.t_up) return x.t_up < y.t_up;
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    });
    if (merged_out) *merged_out = n_merged;
    return ContactTrace{std::move(merged), n_nodes, duration, sampling_period, {}};
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& tok, std::size_t line, const char* what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        throw ParseError(line, std::string("malformed ") + what + " '" + tok + "'");
    }
    if (used != tok.size() || !std::isfinite(v))
        throw ParseError(line, std::string("malformed ") + what + " '" + tok + "'");
    return v;
}

std::int64_t parse_label(const std::string& tok, std::size_t line) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(tok, &used);
    } catch (const std::exception&) {
        throw ParseError(line, "malformed node id '" + tok + "'");
    }
    if (used != tok.size() || v < 0) throw ParseError(line, "malformed node id '" + tok + "'");
    return v;
}

struct RawEvent {
    std::int64_t a, b;
    double up, down;
    std::size_t line;
};

}  // namespace

ParsedContactTrace parse_contact_trace(std::istream& in) {
    std::optional<std::size_t> nodes;
    std::optional<double> duration;
    double period = 0.0;
    std::vector<RawEvent> raw;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string body = trim(line);
        if (body.empty()) continue;
        if (body.front() == '#') {
            const std::string kv = trim(body.substr(1));
            const auto eq = kv.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = trim(kv.substr(0, eq));
            const std::string value = trim(kv.substr(eq + 1));
            if (key == "nodes") {
                nodes = static_cast<std::size_t>(parse_label(value, lineno));
            } else if (key == "duration") {
                duration = parse_double(value, lineno, "duration");
            } else if (key == "period") {
                period = parse_double(value, lineno, "period");
                if (period < 0.0) throw ParseError(lineno, "period must be >= 0");
            }
            continue;
        }
        std::istringstream fields(body);
        std::string ta, tb, tu, td, extra;
        if (!(fields >> ta >> tb >> tu >> td) || (fields >> extra))
            throw ParseError(lineno, "expected '<a> <b> <t_up> <t_down>'");
        RawEvent ev{parse_label(ta, lineno), parse_label(tb, lineno), parse_double(tu, lineno, "time"),
                    parse_double(td, lineno, "time"), lineno};
        if (ev.a == ev.b) throw ParseError(lineno, "contact between a node and itself");
        if (ev.up < 0.0) throw ParseError(lineno, "negative event time");
        if (!(ev.up < ev.down)) throw ParseError(lineno, "negative-duration event (t_up >= t_down)");
        raw.push_back(ev);
    }

    std::vector<std::int64_t> labels;
    std::map<std::int64_t, NodeId> remap;
    std::size_t n_nodes = 0;
    if (nodes) {
        n_nodes = *nodes;
        for (const auto& e : raw)
            if (static_cast<std::size_t>(std::max(e.a, e.b)) >= n_nodes)
                throw ParseError(e.line, "node id exceeds the declared node count");
    } else {
        for (const auto& e : raw) {
            remap.emplace(e.a, 0);
            remap.emplace(e.b, 0);
        }
        NodeId next = 0;
        bool identity = true;
        for (auto& [label, id] : remap) {
            id = next++;
            identity = identity && label == static_cast<std::int64_t>(id);
            labels.push_back(label);
        }
        if (identity) labels.clear();
        n_nodes = remap.size();
    }

    double max_down = 0.0;
    std::vector<ContactEvent> events;
    events.reserve(raw.size());
    for (const auto& e : raw) {
        const NodeId a = nodes ? static_cast<NodeId>(e.a) : remap.at(e.a);
        const NodeId b = nodes ? static_cast<NodeId>(e.b) : remap.at(e.b);
        events.push_back({a, b, e.up, e.down});
        max_down = std::max(max_down, e.down);
        if (duration && e.down > *duration) throw ParseError(e.line, "event ends after the declared duration");
    }

    ParsedContactTrace out;
    out.trace = make_contact_trace(std::move(events), n_nodes, duration.value_or(max_down), period, &out.merged);
    out.trace.labels = std::move(labels);
    return out;
}

void write_contact_trace(std::ostream& out, const ContactTrace& trace) {
    out << "#nodes=" << trace.n_nodes << '\n';
    out << "#duration=" << format_number(trace.duration) << '\n';
    out << "#period=" << format_number(trace.sampling_period) << '\n';
    for (const auto& e : trace.events) {
        out << e.a << ' ' << e.b << ' ' << format_number(e.t_up) << ' ' << format_number(e.t_down) << '\n';
    }
}

}  // namespace plausible
