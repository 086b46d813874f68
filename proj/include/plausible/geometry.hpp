#pragma once

#include <cmath>
#include <cstdint>
#include <variant>

namespace plausible {

using NodeId = std::uint32_t;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
    friend constexpr Vec2 operator*(Vec2 v, double s) { return {s * v.x, s * v.y}; }
    friend constexpr bool operator==(Vec2, Vec2) = default;

    [[nodiscard]] double norm() const { return std::hypot(x, y); }
    [[nodiscard]] bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

struct Torus {
    double width = 0.0;
    double height = 0.0;
};

struct Plane {};

// Unbounded in x; a potential well confines |y| <= half_width. The head and
// tail nodes are held on the x axis.
struct Corridor {
    double half_width = 0.0;
    NodeId head = 0;
    NodeId tail = 0;
};

class SpaceSpec {
public:
    using Variant = std::variant<Torus, Plane, Corridor>;

    SpaceSpec() : shape_(Plane{}) {}
    static SpaceSpec torus(double width, double height);
    static SpaceSpec plane();
    static SpaceSpec corridor(double half_width, NodeId head, NodeId tail,
                              double wall_stiffness);

    [[nodiscard]] const Variant& shape() const { return shape_; }
    [[nodiscard]] bool is_torus() const { return std::holds_alternative<Torus>(shape_); }
    [[nodiscard]] bool is_plane() const { return std::holds_alternative<Plane>(shape_); }
    [[nodiscard]] bool is_corridor() const { return std::holds_alternative<Corridor>(shape_); }
    [[nodiscard]] const Torus& as_torus() const { return std::get<Torus>(shape_); }
    [[nodiscard]] const Corridor& as_corridor() const { return std::get<Corridor>(shape_); }

    // Force constant of the corridor walls; NaN means "default to the spring constant".
    [[nodiscard]] double wall_stiffness() const { return wall_stiffness_; }
    void set_wall_stiffness(double k) { wall_stiffness_ = k; }

    // Shortest displacement from p to q. On a torus this is the minimum image;
    // a component of exactly half the period resolves to the positive direction.
    [[nodiscard]] Vec2 displacement(Vec2 p, Vec2 q) const;
    [[nodiscard]] double distance(Vec2 p, Vec2 q) const { return displacement(p, q).norm(); }
    // Wraps into [0,W)x[0,H) on a torus; identity elsewhere.
    [[nodiscard]] Vec2 wrap(Vec2 p) const;

    friend bool operator==(const SpaceSpec& a, const SpaceSpec& b);

private:
    explicit SpaceSpec(Variant v) : shape_(v) {}
    Variant shape_;
    double wall_stiffness_ = std::nan("");
};

// Free-function form used throughout the evaluation code.
inline double distance(const SpaceSpec& space, Vec2 p, Vec2 q) { return space.distance(p, q); }

// Mean distance from the center of a W x H rectangle to a uniform point in it.
// Equals the expected geodesic leg length of random waypoint on a W x H torus
// and the expected error of a uniformly random guess on that torus.
double mean_center_distance(double width, double height);

}  // namespace plausible
