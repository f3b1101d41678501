#pragma once

#include <optional>
#include <vector>

#include "eans/grid.hpp"

namespace eans {

struct Trajectory {
    std::vector<Vec2> waypoints;  // >= 2, densified to one-cell spacing
    double created_at = 0.0;
};

// Cells blocked for planning: occupied cells inflated by the UAV radius
// (plus half a cell diagonal for center-based conservatism).
std::vector<bool> inflate_occupied(const OccupancyGrid& grid, double uav_radius);

struct PlanDetails {
    Trajectory trajectory;
    std::vector<GridIndex> cell_path;  // raw A* result, pre-shortcut
    double cell_path_cost = 0.0;       // metric cost on the inflated grid
    int relaxation_halo = 0;  // escape rings unblocked around the start (0 = strict)
};

// 8-connected A* over non-occupied inflated cells (unknown traversable),
// followed by line-of-sight shortcutting and densification.
std::optional<PlanDetails> plan_details(const OccupancyGrid& grid, Vec2 start,
                                        Vec2 goal, double uav_radius,
                                        double created_at = 0.0);
std::optional<Trajectory> plan(const OccupancyGrid& grid, Vec2 start, Vec2 goal,
                               double uav_radius, double created_at = 0.0);

struct TrajectoryMetrics {
    double length = 0.0;  // L, polyline arc length
    double span = 0.0;    // L-bar, straight-line endpoint distance
};
TrajectoryMetrics trajectory_metrics(const Trajectory& traj);

// Arc length of the trajectory remaining after the projection of p, and the
// straight-line distance from p to the final waypoint.
TrajectoryMetrics remaining_metrics(const Trajectory& traj, Vec2 p);

// Arc-length position of the point on the trajectory nearest to p.
double project_arc_length(const Trajectory& traj, Vec2 p);
Vec2 point_at_arc_length(const Trajectory& traj, double s);

// Copy of the [s0, s1] arc-length window (clamped to the trajectory).
Trajectory sub_trajectory(const Trajectory& traj, double s0, double s1);

struct ClosestApproach {
    Vec2 trajectory_point;  // P_t
    Vec2 obstacle;          // P_o, occupied cell center
    double dist = 0.0;
};

// Trajectory sample (step = sample_step) minimizing distance to any occupied
// cell center within max_range of the trajectory.
std::optional<ClosestApproach> closest_approach(const Trajectory& traj,
                                                const OccupancyGrid& grid,
                                                double max_range,
                                                double sample_step);

// True when any of the given cells (centers) comes within clearance of the
// trajectory polyline.
bool cells_intersect_trajectory(const Trajectory& traj, const OccupancyGrid& grid,
                                const std::vector<GridIndex>& cells,
                                double clearance);

}  // namespace eans
