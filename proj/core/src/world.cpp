#include "eans/world.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace eans {

namespace {
constexpr double kTwoPi = 6.283185307179586;
}

void SensorConfig::validate() const {
    if (max_range <= 0.0) throw std::invalid_argument("sensor: max_range must be > 0");
    if (fov <= 0.0 || fov > kTwoPi + 1e-12)
        throw std::invalid_argument("sensor: fov must be in (0, 2*pi]");
    if (ray_count < 8) throw std::invalid_argument("sensor: ray_count must be >= 8");
    if (pixel_capacity < ray_count)
        throw std::invalid_argument("sensor: pixel_capacity must be >= ray_count");
}

void Scenario::validate(double uav_radius) const {
    sensor.validate();
    if (bounds.area() <= 0.0) throw std::invalid_argument("scenario: bounds area must be > 0");
    if (!bounds.contains(start) || !bounds.contains(goal))
        throw std::invalid_argument("scenario: start and goal must lie inside bounds");
    for (const auto& ob : obstacles) {
        if (distance_to(ob, start) < uav_radius)
            throw std::invalid_argument("scenario: start intersects an inflated obstacle");
        if (distance_to(ob, goal) < uav_radius)
            throw std::invalid_argument("scenario: goal intersects an inflated obstacle");
    }
}

SensorFrame sense(Vec2 pose, double heading, const Scenario& scenario,
                  double timestamp) {
    if (!scenario.bounds.contains(pose))
        throw std::invalid_argument("sense: pose outside scenario bounds");
    const auto& sc = scenario.sensor;
    SensorFrame frame;
    frame.timestamp = timestamp;
    frame.origin = pose;
    frame.hits.reserve(sc.ray_count);
    int hit_count = 0;
    const bool full_circle = sc.fov > kTwoPi - 1e-9;
    for (int i = 0; i < sc.ray_count; ++i) {
        double angle = full_circle
                           ? heading + kTwoPi * i / sc.ray_count
                           : heading - sc.fov / 2 + sc.fov * (i + 0.5) / sc.ray_count;
        Vec2 dir{std::cos(angle), std::sin(angle)};
        double best = sc.max_range;
        bool hit = false;
        for (const auto& ob : scenario.obstacles) {
            if (auto t = ray_intersect(ob, pose, dir, best)) {
                best = *t;
                hit = true;
            }
        }
        frame.hits.push_back({pose + dir * best, hit});
        if (hit) ++hit_count;
    }
    frame.obstacle_pixels = std::min(hit_count, sc.pixel_capacity);
    return frame;
}

double obstacle_density(const Scenario& scenario, const Rect& region) {
    if (region.area() <= 0.0)
        throw std::invalid_argument("obstacle_density: zero-area region");
    constexpr int kSamples = 512;
    std::int64_t inside = 0;
    for (int iy = 0; iy < kSamples; ++iy) {
        double y = region.min.y + region.height() * (iy + 0.5) / kSamples;
        for (int ix = 0; ix < kSamples; ++ix) {
            double x = region.min.x + region.width() * (ix + 0.5) / kSamples;
            for (const auto& ob : scenario.obstacles) {
                if (obstacle_contains(ob, {x, y})) {
                    ++inside;
                    break;
                }
            }
        }
    }
    return static_cast<double>(inside) / (double(kSamples) * kSamples);
}

namespace {

// Incremental occupancy lattice for one generation zone, so the measured
// area fraction stays cheap to update as circles are added.
class ZoneLattice {
  public:
    ZoneLattice(Rect zone, int n) : zone_(zone), n_(n), covered_(n * n, false) {}

    double fraction() const {
        return static_cast<double>(count_) / (double(n_) * n_);
    }

    // Fraction after adding the circle, without committing.
    double probe(const Circle& c) const {
        return static_cast<double>(count_ + added_points(c, false)) /
               (double(n_) * n_);
    }

    void add(const Circle& c) { count_ += added_points(c, true); }

  private:
    std::int64_t added_points(const Circle& c, bool commit) const {
        double sx = zone_.width() / n_, sy = zone_.height() / n_;
        int ix0 = std::max(0, int((c.center.x - c.radius - zone_.min.x) / sx) - 1);
        int ix1 = std::min(n_ - 1, int((c.center.x + c.radius - zone_.min.x) / sx) + 1);
        int iy0 = std::max(0, int((c.center.y - c.radius - zone_.min.y) / sy) - 1);
        int iy1 = std::min(n_ - 1, int((c.center.y + c.radius - zone_.min.y) / sy) + 1);
        std::int64_t added = 0;
        double r_sq = c.radius * c.radius;
        for (int iy = iy0; iy <= iy1; ++iy) {
            double y = zone_.min.y + sy * (iy + 0.5);
            for (int ix = ix0; ix <= ix1; ++ix) {
                if (covered_[iy * n_ + ix]) continue;
                double x = zone_.min.x + sx * (ix + 0.5);
                if ((Vec2{x, y} - c.center).norm_sq() <= r_sq) {
                    ++added;
                    if (commit) covered_[iy * n_ + ix] = true;
                }
            }
        }
        return added;
    }

    Rect zone_;
    int n_;
    mutable std::vector<bool> covered_;  // mutable only via commit path
    std::int64_t count_ = 0;
};

}  // namespace

Scenario generate_scenario(const GenParams& params) {
    if (params.zone_densities.empty())
        throw std::invalid_argument("generate_scenario: at least one zone required");
    for (double d : params.zone_densities) {
        if (d < 0.0 || d > 1.0)
            throw std::invalid_argument("generate_scenario: zone density must be in [0,1]");
    }
    params.sensor.validate();
    if (params.bounds.area() <= 0.0)
        throw std::invalid_argument("generate_scenario: bounds area must be > 0");

    Scenario s;
    s.bounds = params.bounds;
    s.seed = static_cast<std::int64_t>(params.seed);
    s.sensor = params.sensor;
    double mid_y = (params.bounds.min.y + params.bounds.max.y) / 2;
    s.start = {params.bounds.min.x + 1.0, mid_y};
    s.goal = {params.bounds.max.x - 1.0, mid_y};

    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const int n_zones = static_cast<int>(params.zone_densities.size());
    const double zone_w = params.bounds.width() / n_zones;
    for (int z = 0; z < n_zones; ++z) {
        double target = params.zone_densities[z];
        if (target <= 0.0) continue;
        Rect zone{{params.bounds.min.x + zone_w * z, params.bounds.min.y},
                  {params.bounds.min.x + zone_w * (z + 1), params.bounds.max.y}};
        ZoneLattice lattice(zone, 256);
        int consecutive_rejects = 0;
        while (lattice.fraction() < target * 0.95) {
            if (consecutive_rejects > 20000) {
                throw GenerationError("generate_scenario: infeasible placement in zone " +
                                      std::to_string(z));
            }
            double r = params.min_obstacle_radius +
                       (params.max_obstacle_radius - params.min_obstacle_radius) * unit(rng);
            Circle c;
            c.radius = r;
            c.center = {zone.min.x + r + (zone.width() - 2 * r) * unit(rng),
                        zone.min.y + r + (zone.height() - 2 * r) * unit(rng)};
            if (zone.width() <= 2 * r || zone.height() <= 2 * r ||
                distance(c.center, s.start) < r + params.clearance ||
                distance(c.center, s.goal) < r + params.clearance ||
                lattice.probe(c) > target * 1.08) {
                ++consecutive_rejects;
                continue;
            }
            consecutive_rejects = 0;
            lattice.add(c);
            s.obstacles.push_back(c);
        }
        double got = lattice.fraction();
        if (got < target * 0.9 || got > target * 1.1) {
            throw GenerationError("generate_scenario: density miss in zone " +
                                  std::to_string(z));
        }
    }
    return s;
}

namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                    const char* where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) {
            if (it.key() == k) { known = true; break; }
        }
        if (!known) {
            throw std::invalid_argument(std::string("scenario: unknown field '") +
                                        it.key() + "' in " + where);
        }
    }
}

json vec_to_json(Vec2 v) { return json::array({v.x, v.y}); }

Vec2 vec_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2)
        throw std::invalid_argument("scenario: expected [x, y] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

std::string scenario_to_json(const Scenario& s) {
    json j;
    j["bounds"] = {{"min", vec_to_json(s.bounds.min)}, {"max", vec_to_json(s.bounds.max)}};
    j["start"] = vec_to_json(s.start);
    j["goal"] = vec_to_json(s.goal);
    j["seed"] = s.seed;
    j["sensor"] = {{"max_range", s.sensor.max_range},
                   {"fov", s.sensor.fov},
                   {"ray_count", s.sensor.ray_count},
                   {"pixel_capacity", s.sensor.pixel_capacity}};
    j["obstacles"] = json::array();
    for (const auto& ob : s.obstacles) {
        if (const auto* c = std::get_if<Circle>(&ob)) {
            j["obstacles"].push_back({{"type", "circle"},
                                      {"center", vec_to_json(c->center)},
                                      {"radius", c->radius}});
        } else {
            const auto& r = std::get<Rect>(ob);
            j["obstacles"].push_back({{"type", "rect"},
                                      {"min", vec_to_json(r.min)},
                                      {"max", vec_to_json(r.max)}});
        }
    }
    return j.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text) {
    json j = json::parse(text);
    reject_unknown(j, {"bounds", "start", "goal", "seed", "sensor", "obstacles"},
                   "scenario");
    Scenario s;
    reject_unknown(j.at("bounds"), {"min", "max"}, "bounds");
    s.bounds.min = vec_from_json(j.at("bounds").at("min"));
    s.bounds.max = vec_from_json(j.at("bounds").at("max"));
    s.start = vec_from_json(j.at("start"));
    s.goal = vec_from_json(j.at("goal"));
    s.seed = j.at("seed").get<std::int64_t>();
    const json& sj = j.at("sensor");
    reject_unknown(sj, {"max_range", "fov", "ray_count", "pixel_capacity"}, "sensor");
    s.sensor.max_range = sj.at("max_range").get<double>();
    s.sensor.fov = sj.at("fov").get<double>();
    s.sensor.ray_count = sj.at("ray_count").get<int>();
    s.sensor.pixel_capacity = sj.at("pixel_capacity").get<int>();
    for (const json& oj : j.at("obstacles")) {
        std::string type = oj.at("type").get<std::string>();
        if (type == "circle") {
            reject_unknown(oj, {"type", "center", "radius"}, "obstacle");
            s.obstacles.push_back(Circle{vec_from_json(oj.at("center")),
                                         oj.at("radius").get<double>()});
        } else if (type == "rect") {
            reject_unknown(oj, {"type", "min", "max"}, "obstacle");
            s.obstacles.push_back(Rect{vec_from_json(oj.at("min")),
                                       vec_from_json(oj.at("max"))});
        } else {
            throw std::invalid_argument("scenario: unknown obstacle type '" + type + "'");
        }
    }
    s.sensor.validate();
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return scenario_from_json(ss.str());
}

void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write scenario file: " + path);
    out << scenario_to_json(s);
}

}  // namespace eans
