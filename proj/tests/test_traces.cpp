#include <sstream>

#include "doctest.h"
#include "plausible/contact_trace.hpp"
#include "plausible/link_timeline.hpp"
#include "plausible/mobility_trace.hpp"

using namespace plausible;

namespace {

ParsedContactTrace parse(const std::string& text) {
    std::istringstream in(text);
    return parse_contact_trace(in);
}

MobilityTrace parse_mobility(const std::string& text) {
    std::istringstream in(text);
    return parse_mobility_trace(in);
}

ContactTrace trace_of(std::vector<ContactEvent> events, std::size_t n, double duration) {
    return make_contact_trace(std::move(events), n, duration, 0.0);
}

}  // namespace

TEST_CASE("contact trace parsing") {
    SUBCASE("single line") {
        const auto p = parse("0 1 10.0 25.0\n");
        REQUIRE(p.trace.events.size() == 1);
        CHECK(p.trace.events[0] == ContactEvent{0, 1, 10, 25});
        CHECK(p.trace.n_nodes == 2);
        CHECK(p.trace.duration == 25.0);
    }
    SUBCASE("pairs are stored in canonical order") {
        const auto p = parse("1 0 10 25\n");
        CHECK(p.trace.events.at(0) == ContactEvent{0, 1, 10, 25});
    }
    SUBCASE("negative duration is rejected with its line number") {
        try {
            parse("# a comment\n0 1 30 20\n");
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
            CHECK(std::string(e.what()).find("negative-duration") != std::string::npos);
        }
    }
    SUBCASE("malformed rows") {
        CHECK_THROWS_AS(parse("0 1 10\n"), ParseError);
        CHECK_THROWS_AS(parse("0 1 10 20 30\n"), ParseError);
        CHECK_THROWS_AS(parse("0 x 10 20\n"), ParseError);
        CHECK_THROWS_AS(parse("0 0 10 20\n"), ParseError);
        CHECK_THROWS_AS(parse("-1 2 10 20\n"), ParseError);
        CHECK_THROWS_AS(parse("#nodes=2\n0 5 10 20\n"), ParseError);
        CHECK_THROWS_AS(parse("#duration=15\n0 1 10 20\n"), ParseError);
    }
    SUBCASE("headers set node count, duration and period") {
        const auto p = parse("#nodes=5\n#duration=100\n#period=10\n3 1 0 20\n");
        CHECK(p.trace.n_nodes == 5);
        CHECK(p.trace.duration == 100.0);
        CHECK(p.trace.sampling_period == 10.0);
        CHECK(p.trace.labels.empty());
    }
    SUBCASE("overlapping and touching same-pair intervals merge") {
        const auto p = parse("0 1 0 10\n1 0 5 20\n0 1 20 30\n0 1 40 50\n");
        CHECK(p.merged == 2);
        REQUIRE(p.trace.events.size() == 2);
        CHECK(p.trace.events[0] == ContactEvent{0, 1, 0, 30});
        CHECK(p.trace.events[1] == ContactEvent{0, 1, 40, 50});
    }
    SUBCASE("sparse labels are compacted and remembered") {
        const auto p = parse("17 4 1 2\n4 100 3 4\n");
        CHECK(p.trace.n_nodes == 3);
        CHECK(p.trace.labels == std::vector<std::int64_t>{4, 17, 100});
        CHECK(p.trace.events[0] == ContactEvent{0, 1, 1, 2});
        CHECK(p.trace.events[1] == ContactEvent{0, 2, 3, 4});
    }
    SUBCASE("events are sorted by link-up time") {
        const auto p = parse("2 3 50 60\n0 1 10 20\n0 2 10 15\n");
        CHECK(p.trace.events[0] == ContactEvent{0, 1, 10, 20});
        CHECK(p.trace.events[1] == ContactEvent{0, 2, 10, 15});
        CHECK(p.trace.events[2] == ContactEvent{2, 3, 50, 60});
    }
}

TEST_CASE("contact trace round trip") {
    const auto original = parse("#nodes=4\n#duration=120.5\n#period=2.5\n0 1 0 12.25\n2 3 7.125 120.5\n0 3 9 10\n").trace;
    std::ostringstream out;
    write_contact_trace(out, original);
    const auto again = parse(out.str()).trace;
    CHECK(again.events == original.events);
    CHECK(again.n_nodes == original.n_nodes);
    CHECK(again.duration == original.duration);
    CHECK(again.sampling_period == original.sampling_period);
}

TEST_CASE("format_number") {
    CHECK(format_number(0) == "0");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(10) == "10");
    CHECK(format_number(2.5) == "2.5");
    CHECK(format_number(1.0 / 3.0) == "0.333333");
    CHECK(format_number(-1e-9) == "0");
}

TEST_CASE("link timeline queries") {
    SUBCASE("one contact") {
        const LinkTimeline tl(trace_of({{0, 1, 10, 25}}, 3, 100));
        CHECK(tl.connected(0, 1, 15));
        CHECK(tl.connected(1, 0, 15));
        const auto s = tl.query(0, 1, 5);
        CHECK_FALSE(s.connected);
        CHECK(s.n_up == 10.0);
        CHECK_FALSE(s.p_down.has_value());
        const auto none = tl.query(0, 2, 50);
        CHECK_FALSE(none.connected);
        CHECK_FALSE(none.p_up.has_value());
        CHECK_FALSE(none.n_up.has_value());
        CHECK_FALSE(none.p_down.has_value());
        CHECK_FALSE(none.n_down.has_value());
    }
    SUBCASE("two contacts on the same pair") {
        const LinkTimeline tl(trace_of({{0, 1, 10, 25}, {0, 1, 40, 50}}, 2, 100));
        const auto gap = tl.query(0, 1, 30);
        CHECK_FALSE(gap.connected);
        CHECK(gap.p_up == 10.0);
        CHECK(gap.p_down == 25.0);
        CHECK(gap.n_up == 40.0);
        CHECK(gap.n_down == 50.0);

        const auto in = tl.query(0, 1, 12);
        CHECK(in.connected);
        CHECK(in.p_up == 10.0);
        CHECK(in.n_down == 25.0);
        CHECK(in.n_up == 40.0);
        CHECK_FALSE(in.p_down.has_value());

        const auto later = tl.query(0, 1, 45);
        CHECK(later.p_down == 25.0);

        const auto after = tl.query(0, 1, 60);
        CHECK_FALSE(after.connected);
        CHECK_FALSE(after.n_up.has_value());
        CHECK_FALSE(after.n_down.has_value());
        CHECK(after.p_up == 40.0);
        CHECK(after.p_down == 50.0);
    }
    SUBCASE("intervals are half-open") {
        const LinkTimeline tl(trace_of({{0, 1, 10, 25}}, 2, 100));
        CHECK(tl.connected(0, 1, 10));
        CHECK_FALSE(tl.connected(0, 1, 25));
        CHECK_FALSE(tl.connected(0, 1, 9.999999));
    }
    SUBCASE("invalid pairs") {
        const LinkTimeline tl(trace_of({{0, 1, 10, 25}}, 2, 100));
        CHECK_THROWS_AS(static_cast<void>(tl.query(1, 1, 5)), std::invalid_argument);
        CHECK_THROWS_AS(static_cast<void>(tl.query(0, 2, 5)), std::invalid_argument);
    }
}

TEST_CASE("link timeline censors the window edges") {
    const LinkTimeline tl(trace_of({{0, 1, 0, 20}, {0, 1, 80, 100}}, 2, 100));
    const auto first = tl.observed(tl.query(0, 1, 5));
    CHECK(first.connected);
    CHECK_FALSE(first.p_up.has_value());
    CHECK(first.n_down == 20.0);
    const auto last = tl.observed(tl.query(0, 1, 90));
    CHECK(last.p_up == 80.0);
    CHECK_FALSE(last.n_down.has_value());
    CHECK(last.p_down == 20.0);
}

TEST_CASE("link timeline reproduces its source trace") {
    const auto trace = parse("#nodes=6\n0 5 1 2\n4 1 0 3\n2 3 5 9\n0 5 4 8\n1 2 2 7\n").trace;
    const LinkTimeline tl(trace);
    CHECK(tl.events() == trace.events);
    CHECK(tl.intervals(5, 0).size() == 2);
}

TEST_CASE("mobility trace parsing") {
    const std::string ok = "#space torus 100 100\n#dt 1\n#nodes 2\n#config seed=3\n"
                           "0 0 1 1\n0 1 2 2\n1 1 3 3\n1 0 4 4\n2 0 5 5\n2 1 6 6\n";
    SUBCASE("well-formed") {
        const auto m = parse_mobility(ok);
        CHECK(m.n_nodes() == 2);
        CHECK(m.n_samples() == 3);
        CHECK(m.end_time() == 2.0);
        CHECK(m.at(1, 0) == Vec2{4, 4});
        CHECK(m.config.at(0).second == "3");
        CHECK(m.index_of(1.0) == std::optional<std::size_t>(1));
        CHECK_FALSE(m.index_of(1.5).has_value());
    }
    SUBCASE("round trip") {
        const auto m = parse_mobility(ok);
        std::ostringstream out;
        write_mobility_trace(out, m);
        const auto again = parse_mobility(out.str());
        CHECK(again.n_samples() == m.n_samples());
        CHECK(again.space() == m.space());
        for (std::size_t k = 0; k < m.n_samples(); ++k)
            for (NodeId i = 0; i < 2; ++i) CHECK(again.at(k, i) == m.at(k, i));
    }
    SUBCASE("errors") {
        const std::string head = "#space plane\n#dt 1\n#nodes 2\n";
        CHECK_THROWS_AS(parse_mobility(head + "0.5 0 1 1\n0.5 1 1 1\n"), ParseError);
        CHECK_THROWS_AS(parse_mobility(head + "0 0 1 1\n1 0 1 1\n1 1 1 1\n"), ParseError);
        CHECK_THROWS_AS(parse_mobility(head + "0 0 1 1\n0 1 1 1\n2 0 1 1\n2 1 1 1\n"), ParseError);
        CHECK_THROWS_AS(parse_mobility(head + "0 0 1 1\n0 0 1 1\n"), ParseError);
        CHECK_THROWS_AS(parse_mobility(head + "0 3 1 1\n"), ParseError);
        CHECK_THROWS_AS(parse_mobility("#dt 1\n#nodes 1\n0 0 1 1\n"), ParseError);
        CHECK_THROWS_AS(parse_mobility("#space sphere\n"), ParseError);
        CHECK_THROWS_AS(parse_mobility(head + "0 0 nan 1\n0 1 1 1\n"), ParseError);
    }
    SUBCASE("torus positions are wrapped") {
        const auto m = parse_mobility("#space torus 100 50\n#dt 1\n#nodes 1\n0 0 130 -10\n");
        CHECK(m.at(0, 0) == Vec2{30, 40});
    }
}
