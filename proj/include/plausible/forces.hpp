#pragma once

#include <limits>

#include "plausible/geometry.hpp"
#include "plausible/link_timeline.hpp"

namespace plausible {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Knobs of the force model. NaN fields are filled in by resolve().
struct ForceParams {
    double K = 100.0;                             // spring rigidity
    double G = std::numeric_limits<double>::quiet_NaN();      // repulsion intensity; NaN = calibrate
    double alpha = 1.5;                           // repulsion decay exponent
    double eps0 = 1.0;                            // keeps repulsion bounded by G / eps0^alpha
    double tau = 50.0;                            // anticipation scale, meters
    double d_max = std::numeric_limits<double>::quiet_NaN();  // interaction cutoff; NaN = 2r
    double D = std::numeric_limits<double>::quiet_NaN();      // drag; NaN = 1 on a plane, else 0
    double r = 100.0;                             // transmission range
    double v_max = 10.0;                          // maximum node speed
    bool attraction_cutoff = false;               // true: anticipated attraction also vanishes beyond d_max

    // Fills the defaulted fields for the given space and validates the result.
    [[nodiscard]] ForceParams resolve(const SpaceSpec& space) const;
    void validate() const;
};

// G such that an isolated pair that has just come into contact (event gap 0)
// is in equilibrium at three quarters of the range.
double calibrate_G(double K, double r, double eps0, double alpha);

// Spring pull toward the peer. Connected: K d. Not connected: K exp(-v_max gap / tau) d
// (within d_max only when attraction_cutoff is set), where gap is the time to the nearest link-up (+inf if none).
double attractive_force(double d, bool connected, double gap, const ForceParams& p);

// Coulomb-like push away from the peer, zero at d >= d_max. The gap is the time
// since link-up or until link-down while connected, and is ignored otherwise.
double repulsive_force(double d, bool connected, double gap, const ForceParams& p);

Vec2 drag_force(Vec2 velocity, double D);

// Spring walls at |y| = half_width for corridors; zero elsewhere.
Vec2 boundary_force(Vec2 position, const SpaceSpec& space, double stiffness);

// Event gaps for the two forces at time t, from observed link boundaries.
// Missing boundaries drop out of the min; none at all gives +inf.
double attraction_gap(const LinkState& s, double t);
double repulsion_gap(const LinkState& s, double t);

// Net signed magnitude along the unit vector toward the peer (attraction
// minus repulsion) for a pair at distance d in link state s.
double pair_force(double d, const LinkState& s, double t, const ForceParams& p);

}  // namespace plausible
