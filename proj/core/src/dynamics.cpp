#include "eans/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eans {

UavState step(const UavState& state, const Trajectory& traj, double v_cmd,
              double a_max, double dt, double lookahead) {
    if (dt <= 0.0) throw std::invalid_argument("step: dt must be > 0");
    if (v_cmd < 0.0) throw std::invalid_argument("step: v_cmd must be >= 0");
    if (traj.waypoints.size() < 2)
        throw std::invalid_argument("step: empty trajectory");

    TrajectoryMetrics total = trajectory_metrics(traj);
    double s = project_arc_length(traj, state.position);
    Vec2 target = point_at_arc_length(traj, std::min(total.length, s + lookahead));

    // Decelerate early enough to stop at the trajectory end. The euclidean
    // distance to the endpoint floors the budget: an overshoot past the final
    // waypoint leaves zero arc length but the vehicle must still close the gap.
    double d_remaining = std::max(std::max(0.0, total.length - s),
                                  distance(state.position, traj.waypoints.back()));
    double v_stop = std::sqrt(2.0 * a_max * d_remaining);
    double desired_speed = std::min(v_cmd, v_stop);

    Vec2 to_target = target - state.position;
    Vec2 desired_vel =
        to_target.norm() > 1e-9 ? to_target.normalized() * desired_speed : Vec2{};

    Vec2 dv = desired_vel - state.velocity;
    double dv_norm = dv.norm();
    double dv_cap = a_max * dt;
    if (dv_norm > dv_cap) dv = dv * (dv_cap / dv_norm);

    UavState next = state;
    next.velocity = state.velocity + dv;
    // Never exceed the command unless already above it (ramping down).
    double cap = std::max(v_cmd, state.velocity.norm());
    double sp = next.velocity.norm();
    if (sp > cap && sp > 0.0) next.velocity = next.velocity * (cap / sp);
    next.position = state.position + next.velocity * dt;
    next.time = state.time + dt;
    return next;
}

bool collision_check(const UavState& state, const Scenario& scenario,
                     double uav_radius) {
    for (const auto& ob : scenario.obstacles) {
        if (distance_to(ob, state.position) < uav_radius) return true;
    }
    return false;
}

}  // namespace eans
