#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "plausible/extract.hpp"
#include "plausible/link_timeline.hpp"
#include "plausible/rwp.hpp"

using namespace plausible;
using doctest::Approx;

namespace {

// A two-node trace on the plane sampled every second; distance(t) sets the separation.
template <class F>
MobilityTrace pair_trace(double duration, F distance) {
    MobilityTrace m(SpaceSpec::plane(), 2, 1.0);
    for (int t = 0; t <= static_cast<int>(duration); ++t) {
        const Vec2 sample[] = {{0, 0}, {distance(t), 0}};
        m.append_sample(sample);
    }
    return m;
}

MobilityTrace small_rwp(std::uint64_t seed) {
    RwpConfig cfg;
    cfg.n_nodes = 20;
    cfg.duration = 600.0;
    cfg.seed = seed;
    return rwp_generate(cfg);
}

}  // namespace

TEST_CASE("snapshot contacts") {
    const SpaceSpec torus = SpaceSpec::torus(1000, 1000);
    const Vec2 near[] = {{0, 0}, {50, 0}};
    CHECK(snapshot_contacts(near, 100, SpaceSpec::plane()) == std::vector<NodePair>{{0, 1}});
    const Vec2 edge[] = {{0, 0}, {100, 0}};
    CHECK(snapshot_contacts(edge, 100, SpaceSpec::plane()).size() == 1);
    const Vec2 wrap[] = {{10, 0}, {990, 0}};
    CHECK(snapshot_contacts(wrap, 100, torus).size() == 1);
    CHECK(snapshot_contacts(wrap, 100, SpaceSpec::plane()).empty());
    const Vec2 three[] = {{0, 0}, {500, 0}, {60, 0}};
    CHECK(snapshot_contacts(three, 100, torus) == std::vector<NodePair>{{0, 2}});
}

TEST_CASE("synchronous extraction") {
    SamplingConfig cfg;
    cfg.period = 10.0;
    SUBCASE("static pair in range") {
        const auto tr = extract_synchronous(pair_trace(100, [](int) { return 50.0; }), cfg);
        REQUIRE(tr.events.size() == 1);
        CHECK(tr.events[0] == ContactEvent{0, 1, 0, 100});
        CHECK(tr.sampling_period == 10.0);
        CHECK(tr.duration == 100.0);
    }
    SUBCASE("a contact between two snapshots is missed") {
        const auto tr = extract_synchronous(pair_trace(100, [](int t) { return t > 12 && t < 14 ? 50.0 : 500.0; }), cfg);
        CHECK(tr.events.empty());
    }
    SUBCASE("boundaries snap to the snapshot grid") {
        const auto tr = extract_synchronous(pair_trace(100, [](int t) { return t >= 15 && t < 43 ? 50.0 : 500.0; }), cfg);
        REQUIRE(tr.events.size() == 1);
        CHECK(tr.events[0] == ContactEvent{0, 1, 20, 50});
    }
    SUBCASE("period must be a multiple of the timestep") {
        cfg.period = 2.5;
        CHECK_THROWS_AS(extract_synchronous(pair_trace(10, [](int) { return 1.0; }), cfg), std::invalid_argument);
    }
    SUBCASE("repeated extraction is identical") {
        const auto m = small_rwp(11);
        cfg.period = 1.0;
        CHECK(extract_synchronous(m, cfg).events == extract_synchronous(m, cfg).events);
    }
}

TEST_CASE("asynchronous extraction") {
    SamplingConfig cfg;
    cfg.mode = SamplingMode::Asynchronous;
    cfg.period = 10.0;
    SUBCASE("a link comes up at the earlier scan of the two nodes") {
        cfg.phases = std::vector<double>{3.0, 7.0};
        const auto tr = extract_asynchronous(pair_trace(100, [](int) { return 50.0; }), cfg);
        REQUIRE(tr.events.size() == 1);
        CHECK(tr.events[0] == ContactEvent{0, 1, 3, 100});
    }
    SUBCASE("a link goes down at the first scan that no longer sees the peer") {
        cfg.phases = std::vector<double>{3.0, 7.0};
        const auto tr = extract_asynchronous(pair_trace(100, [](int t) { return t < 40 ? 50.0 : 500.0; }), cfg);
        REQUIRE(tr.events.size() == 1);
        CHECK(tr.events[0] == ContactEvent{0, 1, 3, 43});
    }
    SUBCASE("single isolated node") {
        MobilityTrace m(SpaceSpec::plane(), 1, 1.0);
        for (int k = 0; k < 20; ++k) {
            const Vec2 p[] = {{0, 0}};
            m.append_sample(p);
        }
        CHECK(extract_asynchronous(m, cfg).events.empty());
    }
    SUBCASE("zero phases reproduce synchronous extraction") {
        const auto m = small_rwp(12);
        cfg.phases = std::vector<double>(m.n_nodes(), 0.0);
        SamplingConfig sync;
        sync.period = 10.0;
        CHECK(extract_asynchronous(m, cfg).events == extract_synchronous(m, sync).events);
    }
    SUBCASE("phases are seeded and bounded") {
        cfg.seed = 99;
        const auto a = scan_phases(50, cfg);
        CHECK(a == scan_phases(50, cfg));
        for (double p : a) {
            CHECK(p >= 0.0);
            CHECK(p < 10.0);
        }
        cfg.phases = std::vector<double>{10.0, 0.0};
        CHECK_THROWS_AS(scan_phases(2, cfg), std::invalid_argument);
    }
    SUBCASE("fine sampling agrees with the exact contact set") {
        const auto m = small_rwp(13);
        cfg.period = 1.0;
        cfg.seed = 5;
        const LinkTimeline tl(extract_asynchronous(m, cfg));
        for (std::size_t k = 0; k < m.n_samples(); k += 37)
            for (const auto& [i, j] : snapshot_contacts(m.sample(k), cfg.range, m.space()))
                CHECK(tl.connected(i, j, m.time(k)));
    }
}

TEST_CASE("randomization") {
    SUBCASE("exact traces are rejected") {
        const auto tr = make_contact_trace({{0, 1, 10, 25}}, 2, 100, 0.0);
        CHECK_THROWS_AS(randomize_trace(tr, 1), std::invalid_argument);
    }
    SUBCASE("shifts go backward by at most 0.8T and clamp at zero") {
        const auto tr = make_contact_trace({{0, 1, 10, 25}}, 2, 100, 15.0);
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            const auto out = randomize_trace(tr, seed);
            REQUIRE(out.events.size() == 1);
            const auto& e = out.events[0];
            CHECK(e.t_up >= 0.0);
            CHECK(e.t_up <= 10.0);
            CHECK(e.t_down <= 25.0);
            CHECK(e.t_down >= 25.0 - 12.0);
        }
    }
    SUBCASE("a censored link-down stays at the trace end") {
        const auto tr = make_contact_trace({{0, 1, 50, 100}}, 2, 100, 10.0);
        CHECK(randomize_trace(tr, 3).events.at(0).t_down == 100.0);
    }
    SUBCASE("mean shift is 0.4T") {
        std::vector<ContactEvent> events;
        const int n = 100000;
        for (int k = 0; k < n; ++k) events.push_back({0, 1, 100.0 * k + 20.0, 100.0 * k + 50.0});
        const auto tr = make_contact_trace(events, 2, 100.0 * n + 100.0, 15.0);
        const auto out = randomize_trace(tr, 21);
        REQUIRE(out.events.size() == tr.events.size());
        double up = 0.0, down = 0.0;
        for (std::size_t k = 0; k < tr.events.size(); ++k) {
            up += tr.events[k].t_up - out.events[k].t_up;
            down += tr.events[k].t_down - out.events[k].t_down;
        }
        CHECK(up / n == Approx(0.4 * 15.0).epsilon(0.01));
        CHECK(down / n == Approx(0.4 * 15.0).epsilon(0.01));
    }
    SUBCASE("deterministic in the seed") {
        const auto m = small_rwp(14);
        SamplingConfig cfg;
        cfg.period = 10.0;
        const auto tr = extract_synchronous(m, cfg);
        CHECK(randomize_trace(tr, 4).events == randomize_trace(tr, 4).events);
        CHECK_FALSE(randomize_trace(tr, 4).events == randomize_trace(tr, 5).events);
    }
}
