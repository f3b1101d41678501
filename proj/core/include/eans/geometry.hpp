#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <variant>

namespace eans {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    bool operator==(const Vec2&) const = default;

    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    double norm_sq() const { return x * x + y * y; }
    Vec2 normalized() const {
        double n = norm();
        return n > 0.0 ? Vec2{x / n, y / n} : Vec2{};
    }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

struct Rect {
    Vec2 min;
    Vec2 max;

    double width() const { return max.x - min.x; }
    double height() const { return max.y - min.y; }
    double area() const { return width() * height(); }
    bool contains(Vec2 p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
    }
    Vec2 center() const { return {(min.x + max.x) / 2, (min.y + max.y) / 2}; }
};

struct Circle {
    Vec2 center;
    double radius = 0.0;
};

using Obstacle = std::variant<Circle, Rect>;

// Distance from a point to the obstacle set (0 when inside).
inline double distance_to(const Obstacle& ob, Vec2 p) {
    if (const auto* c = std::get_if<Circle>(&ob)) {
        return std::max(0.0, distance(p, c->center) - c->radius);
    }
    const auto& r = std::get<Rect>(ob);
    double dx = std::max({r.min.x - p.x, 0.0, p.x - r.max.x});
    double dy = std::max({r.min.y - p.y, 0.0, p.y - r.max.y});
    return std::hypot(dx, dy);
}

inline bool obstacle_contains(const Obstacle& ob, Vec2 p) {
    if (const auto* c = std::get_if<Circle>(&ob)) {
        return distance(p, c->center) <= c->radius;
    }
    return std::get<Rect>(ob).contains(p);
}

// First intersection of the ray origin + t*dir (|dir| = 1) with the obstacle,
// restricted to t in [0, max_t]. Returns the hit parameter t.
std::optional<double> ray_intersect(const Obstacle& ob, Vec2 origin, Vec2 dir,
                                    double max_t);

// Distance from a point to a polyline segment [a, b].
inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    Vec2 ab = b - a;
    double len_sq = ab.norm_sq();
    if (len_sq <= 0.0) return distance(p, a);
    double t = std::clamp((p - a).dot(ab) / len_sq, 0.0, 1.0);
    return distance(p, a + ab * t);
}

}  // namespace eans
