#include "plausible/geometry.hpp"

#include <stdexcept>

namespace plausible {

namespace {

double wrap_component(double delta, double period) {
    const double half = 0.5 * period;
    delta = std::fmod(delta, period);
    if (delta > half) delta -= period;
    else if (delta <= -half) delta += period;
    return delta;
}

double wrap_coordinate(double v, double period) {
    double w = std::fmod(v, period);
    if (w < 0.0) w += period;
    if (w >= period) w = 0.0;  // fmod rounding on tiny negatives
    return w;
}

}  // namespace

SpaceSpec SpaceSpec::torus(double width, double height) {
    if (!(width > 0.0) || !(height > 0.0) || !std::isfinite(width) || !std::isfinite(height))
        throw std::invalid_argument("torus dimensions must be positive and finite");
    return SpaceSpec(Torus{width, height});
}

SpaceSpec SpaceSpec::plane() { return SpaceSpec(Plane{}); }

SpaceSpec SpaceSpec::corridor(double half_width, NodeId head, NodeId tail, double wall_stiffness) {
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw std::invalid_argument("corridor half width must be positive");
    if (head == tail) throw std::invalid_argument("corridor head and tail must differ");
    SpaceSpec s(Corridor{half_width, head, tail});
    s.wall_stiffness_ = wall_stiffness;
    return s;
}

Vec2 SpaceSpec::displacement(Vec2 p, Vec2 q) const {
    Vec2 d = q - p;
    if (const auto* t = std::get_if<Torus>(&shape_)) {
        d.x = wrap_component(d.x, t->width);
        d.y = wrap_component(d.y, t->height);
    }
    return d;
}

Vec2 SpaceSpec::wrap(Vec2 p) const {
    if (const auto* t = std::get_if<Torus>(&shape_))
        return {wrap_coordinate(p.x, t->width), wrap_coordinate(p.y, t->height)};
    return p;
}

bool operator==(const SpaceSpec& a, const SpaceSpec& b) {
    if (a.shape_.index() != b.shape_.index()) return false;
    if (const auto* t = std::get_if<Torus>(&a.shape_)) {
        const auto& u = std::get<Torus>(b.shape_);
        return t->width == u.width && t->height == u.height;
    }
    if (const auto* c = std::get_if<Corridor>(&a.shape_)) {
        const auto& e = std::get<Corridor>(b.shape_);
        return c->half_width == e.half_width && c->head == e.head && c->tail == e.tail;
    }
    return true;
}

double mean_center_distance(double width, double height) {
    const double a = 0.5 * width;
    const double b = 0.5 * height;
    const double d = std::hypot(a, b);
    // Closed form of the integral of sqrt(x^2+y^2) over [0,a]x[0,b], divided by its area.
    const double integral =
        (2.0 * a * b * d + a * a * a * std::log((b + d) / a) + b * b * b * std::log((a + d) / b)) / 6.0;
    return integral / (a * b);
}

}  // namespace plausible
