#include "eans/geometry.hpp"

namespace eans {

namespace {

std::optional<double> ray_circle(const Circle& c, Vec2 origin, Vec2 dir,
                                 double max_t) {
    Vec2 oc = origin - c.center;
    // |oc + t*dir|^2 = r^2, |dir| = 1
    double b = oc.dot(dir);
    double disc = b * b - (oc.norm_sq() - c.radius * c.radius);
    if (disc < 0.0) return std::nullopt;
    double sq = std::sqrt(disc);
    double t0 = -b - sq;
    double t1 = -b + sq;
    if (t1 < 0.0) return std::nullopt;
    double t = t0 >= 0.0 ? t0 : 0.0;  // origin inside: hit at t = 0
    if (t > max_t) return std::nullopt;
    return t;
}

std::optional<double> ray_rect(const Rect& r, Vec2 origin, Vec2 dir,
                               double max_t) {
    // Slab method.
    double tmin = 0.0, tmax = max_t;
    for (int axis = 0; axis < 2; ++axis) {
        double o = axis == 0 ? origin.x : origin.y;
        double d = axis == 0 ? dir.x : dir.y;
        double lo = axis == 0 ? r.min.x : r.min.y;
        double hi = axis == 0 ? r.max.x : r.max.y;
        if (std::abs(d) < 1e-15) {
            if (o < lo || o > hi) return std::nullopt;
            continue;
        }
        double t0 = (lo - o) / d;
        double t1 = (hi - o) / d;
        if (t0 > t1) std::swap(t0, t1);
        tmin = std::max(tmin, t0);
        tmax = std::min(tmax, t1);
        if (tmin > tmax) return std::nullopt;
    }
    return tmin;
}

}  // namespace

std::optional<double> ray_intersect(const Obstacle& ob, Vec2 origin, Vec2 dir,
                                    double max_t) {
    if (const auto* c = std::get_if<Circle>(&ob)) {
        return ray_circle(*c, origin, dir, max_t);
    }
    return ray_rect(std::get<Rect>(ob), origin, dir, max_t);
}

}  // namespace eans
