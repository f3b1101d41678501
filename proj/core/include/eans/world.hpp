#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "eans/geometry.hpp"

namespace eans {

struct SensorConfig {
    double max_range = 5.0;       // d_c
    double fov = 1.5707963267948966;  // radians; ray model is not a paper value
    int ray_count = 64;
    int pixel_capacity = 64;      // rho*_c, saturation of per-frame hit count

    void validate() const;
};

struct RayHit {
    Vec2 endpoint;
    bool hit = false;
};

struct SensorFrame {
    double timestamp = 0.0;
    Vec2 origin;  // sensing pose, needed for free-space carving downstream
    std::vector<RayHit> hits;
    int obstacle_pixels = 0;  // rho_c, saturated at pixel_capacity
};

struct Scenario {
    Rect bounds;
    Vec2 start;
    Vec2 goal;
    std::vector<Obstacle> obstacles;
    std::int64_t seed = 0;
    SensorConfig sensor;

    // Checks bounds area, start/goal inside bounds and clear of obstacles
    // inflated by uav_radius.
    void validate(double uav_radius) const;
};

struct GenParams {
    Rect bounds{{0, 0}, {40, 20}};
    std::vector<double> zone_densities{0.1};  // zones split bounds.x evenly
    std::uint64_t seed = 0;
    SensorConfig sensor;
    double min_obstacle_radius = 0.4;
    double max_obstacle_radius = 0.9;
    double clearance = 1.2;  // keep-out radius around start and goal
};

class GenerationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Deterministic scenario generation: per-zone occupied-area fraction lands
// within ±10% of the requested density (overlapping circles allowed; the
// fraction is measured, not summed).
Scenario generate_scenario(const GenParams& params);

SensorFrame sense(Vec2 pose, double heading, const Scenario& scenario,
                  double timestamp = 0.0);

// Occupied-area fraction of the region, by deterministic lattice sampling.
double obstacle_density(const Scenario& scenario, const Rect& region);

std::string scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const std::string& text);  // rejects unknown fields
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& s, const std::string& path);

}  // namespace eans
