#include "plausible/forces.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace plausible {

ForceParams ForceParams::resolve(const SpaceSpec& space) const {
    ForceParams p = *this;
    if (std::isnan(p.d_max)) p.d_max = 2.0 * p.r;
    if (std::isnan(p.D)) p.D = space.is_plane() ? 1.0 : 0.0;
    if (std::isnan(p.G)) p.G = calibrate_G(p.K, p.r, p.eps0, p.alpha);
    p.validate();
    return p;
}

void ForceParams::validate() const {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(K) || !positive(G) || !positive(alpha) || !positive(eps0) || !positive(tau) || !positive(r) ||
        !positive(v_max))
        throw std::invalid_argument("force parameters K, G, alpha, eps0, tau, r, v_max must be positive and finite");
    if (!(D >= 0.0) || !std::isfinite(D)) throw std::invalid_argument("drag coefficient must be >= 0");
    if (!(d_max >= r) || !std::isfinite(d_max)) throw std::invalid_argument("d_max must be >= r");
}

double calibrate_G(double K, double r, double eps0, double alpha) {
    const double d = 0.75 * r;
    return K * d * std::pow(eps0 + d / r, alpha);
}

double attractive_force(double d, bool connected, double gap, const ForceParams& p) {
    if (connected) return p.K * d;
    if ((p.attraction_cutoff && d > p.d_max) || !std::isfinite(gap)) return 0.0;
    return p.K * std::exp(-p.v_max * gap / p.tau) * d;
}

double repulsive_force(double d, bool connected, double gap, const ForceParams& p) {
    if (d >= p.d_max) return 0.0;
    const double lag = connected ? gap : 0.0;
    if (!std::isfinite(lag)) return 0.0;
    return p.G / std::pow(p.eps0 + (d + p.v_max * lag) / p.r, p.alpha);
}

Vec2 drag_force(Vec2 velocity, double D) { return -D * velocity; }

Vec2 boundary_force(Vec2 position, const SpaceSpec& space, double stiffness) {
    if (!space.is_corridor()) return {};
    const double hw = space.as_corridor().half_width;
    const double excess = std::abs(position.y) - hw;
    if (excess <= 0.0) return {};
    return {0.0, -stiffness * excess * (position.y > 0.0 ? 1.0 : -1.0)};
}

double attraction_gap(const LinkState& s, double t) {
    double gap = kInfinity;
    if (s.n_up) gap = std::min(gap, *s.n_up - t);
    if (s.p_down) gap = std::min(gap, t - *s.p_down);
    return gap;
}

double repulsion_gap(const LinkState& s, double t) {
    double gap = kInfinity;
    if (s.p_up) gap = std::min(gap, t - *s.p_up);
    if (s.n_down) gap = std::min(gap, *s.n_down - t);
    return gap;
}

double pair_force(double d, const LinkState& s, double t, const ForceParams& p) {
    if (s.connected) return attractive_force(d, true, 0.0, p) - repulsive_force(d, true, repulsion_gap(s, t), p);
    return attractive_force(d, false, attraction_gap(s, t), p) - repulsive_force(d, false, 0.0, p);
}

}  // namespace plausible
