#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "plausible/geometry.hpp"
#include "plausible/rng.hpp"

using namespace plausible;
using doctest::Approx;

TEST_CASE("distance on the three spaces") {
    const SpaceSpec torus = SpaceSpec::torus(1000, 1000);
    CHECK(distance(torus, {0, 0}, {900, 0}) == Approx(100));
    CHECK(distance(torus, {0, 0}, {500, 500}) == Approx(707.1068).epsilon(1e-7));
    CHECK(distance(SpaceSpec::plane(), {3, 4}, {0, 0}) == 5.0);
    CHECK(distance(SpaceSpec::corridor(25, 0, 1, NAN), {0, 30}, {40, 0}) == 50.0);
}

TEST_CASE("torus displacement takes the minimum image and breaks ties toward +x/+y") {
    const SpaceSpec torus = SpaceSpec::torus(1000, 600);
    CHECK(torus.displacement({10, 10}, {990, 590}) == Vec2{-20, -20});
    CHECK(torus.displacement({0, 0}, {500, 300}) == Vec2{500, 300});
    CHECK(torus.displacement({500, 300}, {0, 0}) == Vec2{500, 300});
}

TEST_CASE("wrap maps into the half-open fundamental domain") {
    const SpaceSpec torus = SpaceSpec::torus(1000, 1000);
    CHECK(torus.wrap({-1, 1000}) == Vec2{999, 0});
    CHECK(torus.wrap({2500, -2500}) == Vec2{500, 500});
    const Vec2 w = torus.wrap({-1e-17, 3});
    CHECK(w.x >= 0.0);
    CHECK(w.x < 1000.0);
    CHECK(SpaceSpec::plane().wrap({-7, 1e6}) == Vec2{-7, 1e6});
}

TEST_CASE("metric properties over random points") {
    Rng rng(99);
    const SpaceSpec spaces[] = {SpaceSpec::torus(1000, 700), SpaceSpec::plane(), SpaceSpec::corridor(25, 0, 1, NAN)};
    const double bound = 0.5 * std::hypot(1000.0, 700.0);
    for (const auto& s : spaces) {
        for (int k = 0; k < 2000; ++k) {
            const Vec2 p{rng.uniform(0, 1000), rng.uniform(0, 700)};
            const Vec2 q{rng.uniform(0, 1000), rng.uniform(0, 700)};
            const Vec2 r{rng.uniform(0, 1000), rng.uniform(0, 700)};
            CHECK(s.distance(p, q) == s.distance(q, p));
            CHECK(s.distance(p, q) >= 0.0);
            CHECK(s.distance(p, r) <= s.distance(p, q) + s.distance(q, r) + 1e-9);
            if (s.is_torus()) {
                CHECK(s.distance(p, q) <= (q - p).norm() + 1e-12);
                CHECK(s.distance(p, q) <= bound + 1e-9);
            }
        }
    }
}

TEST_CASE("mean center distance matches its Monte Carlo estimate") {
    // A uniformly random guess on the torus is on average this far from the truth.
    const double closed = mean_center_distance(1000, 1000);
    CHECK(closed == Approx(382.5978).epsilon(1e-6));
    Rng rng(5);
    const SpaceSpec torus = SpaceSpec::torus(1000, 1000);
    double sum = 0.0;
    const int n = 1000000;
    for (int k = 0; k < n; ++k)
        sum += torus.distance({rng.uniform(0, 1000), rng.uniform(0, 1000)}, {rng.uniform(0, 1000), rng.uniform(0, 1000)});
    CHECK(sum / n == Approx(closed).epsilon(2e-3));
    CHECK(mean_center_distance(200, 50) == Approx(mean_center_distance(50, 200)));
}

TEST_CASE("space constructors reject invalid shapes") {
    CHECK_THROWS_AS(SpaceSpec::torus(0, 10), std::invalid_argument);
    CHECK_THROWS_AS(SpaceSpec::corridor(-1, 0, 1, NAN), std::invalid_argument);
    CHECK_THROWS_AS(SpaceSpec::corridor(25, 3, 3, NAN), std::invalid_argument);
}

TEST_CASE("rng streams") {
    Rng a(1), b(1);
    for (int k = 0; k < 100; ++k) CHECK(a.next_u64() == b.next_u64());
    CHECK(derive_seed(7, Stream::Mobility) != derive_seed(7, Stream::ScanPhases));
    CHECK(derive_seed(7, Stream::Mobility) != derive_seed(8, Stream::Mobility));
    Rng r(3);
    for (int k = 0; k < 10000; ++k) {
        const double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(r.below(7) < 7u);
    }
}
