#include <cmath>
#include <stdexcept>
#include <memory>

#include "doctest.h"
#include "plausible/engine.hpp"
#include "plausible/extract.hpp"
#include "plausible/rwp.hpp"

using namespace plausible;

namespace {

struct Fixture {
    MobilityTrace truth;
    ContactTrace trace;
};

Fixture rwp_fixture(std::uint64_t seed, std::size_t nodes = 20, double duration = 200.0) {
    RwpConfig cfg;
    cfg.n_nodes = nodes;
    cfg.duration = duration;
    cfg.seed = seed;
    auto truth = rwp_generate(cfg);
    SamplingConfig sampling;
    auto trace = extract_synchronous(truth, sampling);
    return {std::move(truth), std::move(trace)};
}

bool identical(const MobilityTrace& a, const MobilityTrace& b) {
    if (a.n_samples() != b.n_samples() || a.n_nodes() != b.n_nodes()) return false;
    for (std::size_t k = 0; k < a.n_samples(); ++k)
        for (NodeId i = 0; i < a.n_nodes(); ++i)
            if (!(a.at(k, i) == b.at(k, i))) return false;
    return true;
}

}  // namespace

TEST_CASE("a connected pair at equilibrium stays put") {
    const ContactTrace tr = make_contact_trace({{0, 1, 10, 200}}, 2, 300, 1.0);
    InferenceConfig cfg;
    cfg.initial = KnownPositions{{{400, 500}, {475, 500}}};
    const InferenceEngine engine(tr, cfg);
    EngineState s = engine.initial_state();
    s.t = 10.0;
    const EngineState next = engine.step(s);
    CHECK(std::abs(next.position[0].x - 400.0) <= 1e-9);
    CHECK(std::abs(next.position[1].x - 475.0) <= 1e-9);
    CHECK(next.t == 11.0);
}

TEST_CASE("an empty trace leaves well separated nodes where they start") {
    const ContactTrace tr = make_contact_trace({}, 3, 100, 1.0);
    InferenceConfig cfg;
    const std::vector<Vec2> start{{100, 100}, {400, 100}, {100, 700}};
    cfg.initial = KnownPositions{start};
    const auto out = infer(tr, cfg);
    CHECK(out.n_samples() == 101);
    for (std::size_t k = 0; k < out.n_samples(); ++k)
        for (NodeId i = 0; i < 3; ++i) CHECK(out.at(k, i) == start[i]);
}

TEST_CASE("unconnected nodes within the interaction radius push apart") {
    const ContactTrace tr = make_contact_trace({}, 2, 20, 1.0);
    InferenceConfig cfg;
    cfg.initial = KnownPositions{{{100, 100}, {150, 100}}};
    const auto out = infer(tr, cfg);
    CHECK(out.space().distance(out.at(20, 0), out.at(20, 1)) > 50.0);
}

TEST_CASE("serial and OpenMP kernels agree bit for bit") {
    const auto fx = rwp_fixture(21);
    InferenceConfig cfg;
    cfg.initial = RandomPositions{3};
    cfg.kernel = ForceKernel::Serial;
    const auto serial = infer(fx.trace, cfg);
    cfg.kernel = ForceKernel::OpenMP;
    CHECK(identical(serial, infer(fx.trace, cfg)));
}

TEST_CASE("inference is deterministic") {
    const auto fx = rwp_fixture(22);
    InferenceConfig cfg;
    cfg.initial = RandomPositions{9};
    CHECK(identical(infer(fx.trace, cfg), infer(fx.trace, cfg)));
    InferenceConfig other = cfg;
    other.initial = RandomPositions{10};
    CHECK_FALSE(identical(infer(fx.trace, cfg), infer(fx.trace, other)));
}

TEST_CASE("reference nodes follow the ground truth") {
    const auto fx = rwp_fixture(23);
    InferenceConfig cfg;
    cfg.reference_nodes = {0, 4, 7};
    cfg.ground_truth = std::make_shared<MobilityTrace>(fx.truth);
    cfg.initial = RandomPositions{1};
    const auto out = infer(fx.trace, cfg);
    for (std::size_t k = 0; k < out.n_samples(); ++k)
        for (NodeId id : cfg.reference_nodes) CHECK(out.at(k, id) == fx.truth.at(k, id));
}

TEST_CASE("reference nodes are interpolated between ground-truth samples") {
    MobilityTrace truth(SpaceSpec::torus(1000, 1000), 2, 2.0);
    for (double x : {990.0, 6.0, 22.0}) {
        const Vec2 sample[] = {{x, 0}, {500, 500}};
        truth.append_sample(sample);
    }
    const ContactTrace tr = make_contact_trace({}, 2, 4, 0.0);
    InferenceConfig cfg;
    cfg.dt = 1.0;
    cfg.reference_nodes = {0};
    cfg.ground_truth = std::make_shared<MobilityTrace>(truth);
    cfg.initial = KnownPositions{{{0, 0}, {500, 500}}};
    const auto out = infer(tr, cfg);
    REQUIRE(out.n_samples() == 5);
    CHECK(out.at(1, 0).x == doctest::Approx(998.0));
    CHECK(out.at(3, 0).x == doctest::Approx(14.0));
}

TEST_CASE("the speed cap holds, relaxed only during the warm-up") {
    const auto fx = rwp_fixture(24);
    InferenceConfig cfg;
    cfg.initial = RandomPositions{2};
    cfg.speed_relax_until = 20.0;
    const auto out = infer(fx.trace, cfg);
    double warm = 0.0;
    for (std::size_t k = 1; k < out.n_samples(); ++k)
        for (NodeId i = 0; i < out.n_nodes(); ++i) {
            const double step = out.space().distance(out.at(k - 1, i), out.at(k, i));
            if (out.time(k - 1) >= 20.0) CHECK(step <= 10.0 + 1e-9);
            else warm = std::max(warm, step);
            CHECK(step <= 100.0 + 1e-9);
        }
    CHECK(warm > 10.0);
}

TEST_CASE("configuration errors") {
    const auto fx = rwp_fixture(25, 5, 20);
    InferenceConfig cfg;
    cfg.reference_nodes = {1};
    CHECK_THROWS_AS(InferenceEngine(fx.trace, cfg), std::invalid_argument);
    cfg.reference_nodes = {9};
    cfg.ground_truth = std::make_shared<MobilityTrace>(fx.truth);
    CHECK_THROWS_AS(InferenceEngine(fx.trace, cfg), std::invalid_argument);
    cfg.reference_nodes.clear();
    cfg.initial = KnownPositions{{{0, 0}}};
    CHECK_THROWS_AS(InferenceEngine(fx.trace, cfg), std::invalid_argument);
    cfg.initial = RandomPositions{};
    cfg.anchors = AnchorPolicy::HeadTail;
    CHECK_THROWS_AS(InferenceEngine(fx.trace, cfg), std::invalid_argument);
    cfg.anchors = AnchorPolicy::None;
    cfg.relax_speed_factor = 0.5;
    CHECK_THROWS_AS(InferenceEngine(fx.trace, cfg), std::invalid_argument);
}

TEST_CASE("a non-finite force aborts the step") {
    const ContactTrace tr = make_contact_trace({{0, 1, 0, 10}}, 2, 10, 1.0);
    InferenceConfig cfg;
    cfg.space = SpaceSpec::plane();
    cfg.initial = KnownPositions{{{-1e307, 0}, {1e307, 0}}};
    const InferenceEngine engine(tr, cfg);
    CHECK_THROWS_AS(static_cast<void>(engine.step(engine.initial_state())), std::runtime_error);
}

TEST_CASE("head and tail anchors bracket the corridor") {
    const ContactTrace tr = make_contact_trace({{0, 2, 0, 50}, {2, 3, 10, 40}, {1, 3, 20, 60}}, 4, 60, 1.0);
    InferenceConfig cfg;
    cfg.space = SpaceSpec::corridor(25, 0, 1, NAN);
    cfg.anchors = AnchorPolicy::HeadTail;
    cfg.initial = RandomPositions{4};
    const auto out = infer(tr, cfg);
    for (std::size_t k = 0; k < out.n_samples(); ++k) {
        CHECK(out.at(k, 0).y == 0.0);
        CHECK(out.at(k, 1).y == 0.0);
        for (NodeId i : {2u, 3u}) {
            CHECK(out.at(k, 0).x > out.at(k, i).x);
            CHECK(out.at(k, 1).x < out.at(k, i).x);
        }
    }
}

TEST_CASE("the effective configuration is echoed") {
    const auto fx = rwp_fixture(26, 4, 10);
    const auto out = infer(fx.trace, InferenceConfig{});
    auto value = [&](const std::string& key) {
        for (const auto& [k, v] : out.config)
            if (k == key) return v;
        return std::string("?");
    };
    CHECK(value("G") == "17362.742979");
    CHECK(value("D") == "0");
    CHECK(value("d_max") == "200");
    CHECK(value("init") == "random:0");
}
