#include "eans/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace eans {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

std::vector<bool> inflate_occupied(const OccupancyGrid& grid, double uav_radius) {
    const int nx = grid.nx(), ny = grid.ny();
    const double cell = grid.cell_size();
    std::vector<bool> blocked(std::size_t(nx) * ny, false);
    const double inflation = uav_radius + 0.5 * cell * kSqrt2;
    const int reach = static_cast<int>(std::ceil(inflation / cell));
    // Precomputed disk offsets, center-to-center test.
    std::vector<GridIndex> offsets;
    for (int dy = -reach; dy <= reach; ++dy) {
        for (int dx = -reach; dx <= reach; ++dx) {
            if (std::hypot(dx * cell, dy * cell) <= inflation) {
                offsets.push_back({dx, dy});
            }
        }
    }
    for (const auto& occ : grid.occupied_cells()) {
        for (const auto& off : offsets) {
            GridIndex i{occ.x + off.x, occ.y + off.y};
            if (grid.valid_index(i)) blocked[std::size_t(i.y) * nx + i.x] = true;
        }
    }
    return blocked;
}

namespace {

// Supercover cell traversal of the segment [a, b]; returns false early if a
// blocked cell is crossed.
bool segment_clear(const OccupancyGrid& grid, const std::vector<bool>& blocked,
                   Vec2 a, Vec2 b) {
    const double cell = grid.cell_size();
    const Vec2 origin = grid.frame().origin;
    GridIndex cur = grid.world_to_index(a);
    GridIndex last = grid.world_to_index(b);
    Vec2 d = b - a;
    int step_x = d.x > 0 ? 1 : (d.x < 0 ? -1 : 0);
    int step_y = d.y > 0 ? 1 : (d.y < 0 ? -1 : 0);
    double inf = std::numeric_limits<double>::infinity();
    double t_max_x = inf, t_max_y = inf, t_dx = inf, t_dy = inf;
    if (step_x != 0) {
        double bx = origin.x + (cur.x + (step_x > 0 ? 1 : 0)) * cell;
        t_max_x = (bx - a.x) / d.x;
        t_dx = cell / std::abs(d.x);
    }
    if (step_y != 0) {
        double by = origin.y + (cur.y + (step_y > 0 ? 1 : 0)) * cell;
        t_max_y = (by - a.y) / d.y;
        t_dy = cell / std::abs(d.y);
    }
    int guard = grid.nx() + grid.ny() + 4;
    while (guard-- > 0) {
        if (blocked[std::size_t(cur.y) * grid.nx() + cur.x]) return false;
        if (cur == last) return true;
        if (t_max_x < t_max_y) {
            cur.x += step_x;
            t_max_x += t_dx;
        } else {
            cur.y += step_y;
            t_max_y += t_dy;
        }
        if (!grid.valid_index(cur)) return false;
    }
    return true;
}

struct AStarNode {
    double f, h;
    int idx;
    bool operator>(const AStarNode& o) const {
        if (f != o.f) return f > o.f;
        if (h != o.h) return h > o.h;
        return idx > o.idx;
    }
};

}  // namespace

namespace {

std::optional<PlanDetails> plan_on_blocked(const OccupancyGrid& grid, Vec2 start,
                                           Vec2 goal,
                                           const std::vector<bool>& blocked,
                                           double created_at);

}  // namespace

std::optional<PlanDetails> plan_details(const OccupancyGrid& grid, Vec2 start,
                                        Vec2 goal, double uav_radius,
                                        double created_at) {
    const int nx = grid.nx();
    GridIndex si = grid.world_to_index(start);
    GridIndex gi = grid.world_to_index(goal);
    if (grid.state(gi) == CellState::Occupied) return std::nullopt;

    const std::vector<bool> base = inflate_occupied(grid, uav_radius);
    const double inflation = uav_radius + 0.5 * grid.cell_size() * kSqrt2;
    const int halo_max = static_cast<int>(std::ceil(inflation / grid.cell_size()));

    // Inflation can swallow the start cell itself: the vehicle may
    // legitimately sit inside the inflated margin (which is wider than its
    // physical radius). Plan strictly first; only when that fails, widen an
    // escape halo around the start, one ring at a time, so relaxed clearance
    // is used only where the vehicle is already standing.
    for (int halo = 0; halo <= halo_max; ++halo) {
        std::vector<bool> blocked = base;
        for (int dy = -halo; dy <= halo; ++dy) {
            for (int dx = -halo; dx <= halo; ++dx) {
                GridIndex c{si.x + dx, si.y + dy};
                if (!grid.valid_index(c)) continue;
                if (grid.state(c) == CellState::Occupied) continue;
                blocked[std::size_t(c.y) * nx + c.x] = false;
            }
        }
        blocked[std::size_t(gi.y) * nx + gi.x] = false;
        auto result = plan_on_blocked(grid, start, goal, blocked, created_at);
        if (result) {
            result->relaxation_halo = halo;
            return result;
        }
    }
    return std::nullopt;
}

namespace {

std::optional<PlanDetails> plan_on_blocked(const OccupancyGrid& grid, Vec2 start,
                                           Vec2 goal,
                                           const std::vector<bool>& blocked,
                                           double created_at) {
    const int nx = grid.nx(), ny = grid.ny();
    GridIndex si = grid.world_to_index(start);
    GridIndex gi = grid.world_to_index(goal);

    const int n = nx * ny;
    std::vector<double> g(n, std::numeric_limits<double>::infinity());
    std::vector<int> parent(n, -1);
    std::vector<bool> closed(n, false);
    auto heuristic = [&](int idx) {
        int dx = std::abs(idx % nx - gi.x), dy = std::abs(idx / nx - gi.y);
        return (std::max(dx, dy) - std::min(dx, dy)) + kSqrt2 * std::min(dx, dy);
    };
    std::priority_queue<AStarNode, std::vector<AStarNode>, std::greater<>> open;
    int s_idx = si.y * nx + si.x, g_idx = gi.y * nx + gi.x;
    g[s_idx] = 0.0;
    open.push({heuristic(s_idx), heuristic(s_idx), s_idx});

    static const int dxs[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    static const int dys[8] = {0, 0, 1, -1, 1, -1, 1, -1};
    while (!open.empty()) {
        AStarNode node = open.top();
        open.pop();
        if (closed[node.idx]) continue;
        closed[node.idx] = true;
        if (node.idx == g_idx) break;
        int cx = node.idx % nx, cy = node.idx / nx;
        for (int k = 0; k < 8; ++k) {
            int mx = cx + dxs[k], my = cy + dys[k];
            if (mx < 0 || mx >= nx || my < 0 || my >= ny) continue;
            int m_idx = my * nx + mx;
            if (blocked[m_idx] || closed[m_idx]) continue;
            if (k >= 4) {  // diagonal: no corner cutting
                if (blocked[cy * nx + mx] || blocked[my * nx + cx]) continue;
            }
            double cost = g[node.idx] + (k < 4 ? 1.0 : kSqrt2);
            if (cost < g[m_idx]) {
                g[m_idx] = cost;
                parent[m_idx] = node.idx;
                open.push({cost + heuristic(m_idx), heuristic(m_idx), m_idx});
            }
        }
    }
    if (!closed[g_idx]) return std::nullopt;

    PlanDetails out;
    out.cell_path_cost = g[g_idx] * grid.cell_size();
    for (int idx = g_idx; idx != -1; idx = parent[idx]) {
        out.cell_path.push_back({idx % nx, idx / nx});
    }
    std::reverse(out.cell_path.begin(), out.cell_path.end());

    // Shortcut: greedy farthest line-of-sight over start, cell centers, goal.
    std::vector<Vec2> pts;
    pts.push_back(start);
    for (std::size_t i = 1; i + 1 < out.cell_path.size(); ++i) {
        pts.push_back(grid.index_center(out.cell_path[i]));
    }
    pts.push_back(goal);
    std::vector<Vec2> shortcut;
    shortcut.push_back(pts.front());
    std::size_t i = 0;
    while (i + 1 < pts.size()) {
        std::size_t next = i + 1;
        for (std::size_t j = pts.size() - 1; j > i + 1; --j) {
            if (segment_clear(grid, blocked, pts[i], pts[j])) {
                next = j;
                break;
            }
        }
        shortcut.push_back(pts[next]);
        i = next;
    }

    // Densify to one-cell spacing.
    Trajectory traj;
    traj.created_at = created_at;
    const double max_step = grid.cell_size();
    for (std::size_t k = 0; k + 1 < shortcut.size(); ++k) {
        Vec2 a = shortcut[k], b = shortcut[k + 1];
        double len = distance(a, b);
        int pieces = std::max(1, static_cast<int>(std::ceil(len / max_step)));
        for (int p = 0; p < pieces; ++p) {
            traj.waypoints.push_back(a + (b - a) * (double(p) / pieces));
        }
    }
    traj.waypoints.push_back(shortcut.back());
    if (traj.waypoints.size() < 2) traj.waypoints.push_back(shortcut.back());
    out.trajectory = std::move(traj);
    return out;
}

}  // namespace

std::optional<Trajectory> plan(const OccupancyGrid& grid, Vec2 start, Vec2 goal,
                               double uav_radius, double created_at) {
    auto details = plan_details(grid, start, goal, uav_radius, created_at);
    if (!details) return std::nullopt;
    return std::move(details->trajectory);
}

TrajectoryMetrics trajectory_metrics(const Trajectory& traj) {
    if (traj.waypoints.size() < 2)
        throw std::invalid_argument("trajectory: needs at least 2 waypoints");
    TrajectoryMetrics m;
    for (std::size_t i = 0; i + 1 < traj.waypoints.size(); ++i) {
        m.length += distance(traj.waypoints[i], traj.waypoints[i + 1]);
    }
    m.span = distance(traj.waypoints.front(), traj.waypoints.back());
    return m;
}

double project_arc_length(const Trajectory& traj, Vec2 p) {
    double best = std::numeric_limits<double>::infinity();
    double best_s = 0.0, s = 0.0;
    for (std::size_t i = 0; i + 1 < traj.waypoints.size(); ++i) {
        Vec2 a = traj.waypoints[i], b = traj.waypoints[i + 1];
        double seg = distance(a, b);
        double t = 0.0;
        if (seg > 0.0) {
            t = std::clamp((p - a).dot(b - a) / (seg * seg), 0.0, 1.0);
        }
        double d = distance(p, a + (b - a) * t);
        if (d < best) {
            best = d;
            best_s = s + t * seg;
        }
        s += seg;
    }
    return best_s;
}

Vec2 point_at_arc_length(const Trajectory& traj, double s) {
    if (s <= 0.0) return traj.waypoints.front();
    for (std::size_t i = 0; i + 1 < traj.waypoints.size(); ++i) {
        Vec2 a = traj.waypoints[i], b = traj.waypoints[i + 1];
        double seg = distance(a, b);
        if (s <= seg && seg > 0.0) return a + (b - a) * (s / seg);
        s -= seg;
    }
    return traj.waypoints.back();
}

Trajectory sub_trajectory(const Trajectory& traj, double s0, double s1) {
    TrajectoryMetrics m = trajectory_metrics(traj);
    s0 = std::clamp(s0, 0.0, m.length);
    s1 = std::clamp(s1, s0, m.length);
    Trajectory out;
    out.created_at = traj.created_at;
    out.waypoints.push_back(point_at_arc_length(traj, s0));
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < traj.waypoints.size(); ++i) {
        s += distance(traj.waypoints[i], traj.waypoints[i + 1]);
        if (s > s0 && s < s1) out.waypoints.push_back(traj.waypoints[i + 1]);
    }
    out.waypoints.push_back(point_at_arc_length(traj, s1));
    return out;
}

TrajectoryMetrics remaining_metrics(const Trajectory& traj, Vec2 p) {
    TrajectoryMetrics total = trajectory_metrics(traj);
    double s = project_arc_length(traj, p);
    TrajectoryMetrics m;
    m.length = std::max(0.0, total.length - s);
    m.span = distance(p, traj.waypoints.back());
    return m;
}

std::optional<ClosestApproach> closest_approach(const Trajectory& traj,
                                                const OccupancyGrid& grid,
                                                double max_range,
                                                double sample_step) {
    const auto& occupied = grid.occupied_cells();
    if (occupied.empty() || traj.waypoints.size() < 2) return std::nullopt;

    // Uniform arc-length samples, binned for the per-obstacle search.
    TrajectoryMetrics m = trajectory_metrics(traj);
    int n_samples = std::max(2, static_cast<int>(std::ceil(m.length / sample_step)) + 1);
    std::vector<Vec2> samples;
    samples.reserve(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        samples.push_back(point_at_arc_length(traj, m.length * i / (n_samples - 1)));
    }
    const double bin = std::max(sample_step * 8.0, max_range / 4.0);
    Vec2 lo = grid.frame().origin;
    int bnx = std::max(1, static_cast<int>(std::ceil(grid.frame().size.x / bin)));
    int bny = std::max(1, static_cast<int>(std::ceil(grid.frame().size.y / bin)));
    std::vector<std::vector<int>> bins(std::size_t(bnx) * bny);
    auto bin_of = [&](Vec2 p) {
        int bx = std::clamp(static_cast<int>((p.x - lo.x) / bin), 0, bnx - 1);
        int by = std::clamp(static_cast<int>((p.y - lo.y) / bin), 0, bny - 1);
        return by * bnx + bx;
    };
    for (int i = 0; i < n_samples; ++i) bins[bin_of(samples[i])].push_back(i);

    double best = max_range;
    std::optional<ClosestApproach> result;
    for (const auto& occ : occupied) {
        Vec2 c = grid.index_center(occ);
        int bx0 = std::clamp(static_cast<int>((c.x - best - lo.x) / bin), 0, bnx - 1);
        int bx1 = std::clamp(static_cast<int>((c.x + best - lo.x) / bin), 0, bnx - 1);
        int by0 = std::clamp(static_cast<int>((c.y - best - lo.y) / bin), 0, bny - 1);
        int by1 = std::clamp(static_cast<int>((c.y + best - lo.y) / bin), 0, bny - 1);
        for (int by = by0; by <= by1; ++by) {
            for (int bx = bx0; bx <= bx1; ++bx) {
                for (int si : bins[std::size_t(by) * bnx + bx]) {
                    double d = distance(samples[si], c);
                    if (d < best || (!result && d <= best)) {
                        best = d;
                        result = ClosestApproach{samples[si], c, d};
                    }
                }
            }
        }
    }
    return result;
}

bool cells_intersect_trajectory(const Trajectory& traj, const OccupancyGrid& grid,
                                const std::vector<GridIndex>& cells,
                                double clearance) {
    for (const auto& cell : cells) {
        Vec2 c = grid.index_center(cell);
        for (std::size_t i = 0; i + 1 < traj.waypoints.size(); ++i) {
            if (point_segment_distance(c, traj.waypoints[i], traj.waypoints[i + 1]) <
                clearance) {
                return true;
            }
        }
    }
    return false;
}

}  // namespace eans
