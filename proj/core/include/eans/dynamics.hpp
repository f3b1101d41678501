#pragma once

#include "eans/planner.hpp"
#include "eans/world.hpp"

namespace eans {

struct UavState {
    Vec2 position;
    Vec2 velocity;
    double time = 0.0;
};

// One pure-pursuit integration step. Speed changes are bounded by a_max*dt
// and the commanded speed also respects the stopping distance to the end of
// the trajectory.
UavState step(const UavState& state, const Trajectory& traj, double v_cmd,
              double a_max, double dt, double lookahead);

inline double emergency_stop_distance(double v, double a_max) {
    return v * v / (2.0 * a_max);
}

// Strict inequality: a position exactly at the inflated boundary is clear.
bool collision_check(const UavState& state, const Scenario& scenario,
                     double uav_radius);

}  // namespace eans
