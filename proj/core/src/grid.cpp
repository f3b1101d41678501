#include "eans/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace eans {

bool ResolutionLadder::contains(double r) const {
    for (double lv : levels) {
        if (std::abs(lv - r) < 1e-9) return true;
    }
    return false;
}

void ResolutionLadder::validate(Vec2 extent) const {
    if (levels.empty()) throw std::invalid_argument("ladder: empty resolution list");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] <= 0.0)
            throw std::invalid_argument("ladder: cell sizes must be > 0");
        if (i > 0 && levels[i] <= levels[i - 1])
            throw std::invalid_argument("ladder: levels must be strictly increasing");
        if (extent.x / levels[i] < 4.0 || extent.y / levels[i] < 4.0)
            throw std::invalid_argument("ladder: level too coarse for extent (< 4 cells/axis)");
    }
}

GridIndex GridFrame::world_to_index(Vec2 p, double r) const {
    if (!in_extent(p))
        throw std::out_of_range(
            "grid: point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
            ") outside extent [" + std::to_string(origin.x) + ", " +
            std::to_string(origin.x + size.x) + ") x [" + std::to_string(origin.y) +
            ", " + std::to_string(origin.y + size.y) + ")");
    return {static_cast<int>(std::floor((p.x - origin.x) / r)),
            static_cast<int>(std::floor((p.y - origin.y) / r))};
}

int GridFrame::manhattan_distance(Vec2 a, Vec2 b, double r) const {
    GridIndex ia = world_to_index(a, r);
    GridIndex ib = world_to_index(b, r);
    return std::abs(ia.x - ib.x) + std::abs(ia.y - ib.y);
}

OccupancyGrid::OccupancyGrid(Vec2 origin, Vec2 size, double cell_size, int sigma)
    : frame_{origin, size}, cell_(cell_size), sigma_(sigma) {
    if (cell_size <= 0.0) throw std::invalid_argument("grid: cell size must be > 0");
    if (sigma < 1) throw std::invalid_argument("grid: sigma must be >= 1");
    if (size.x <= 0.0 || size.y <= 0.0)
        throw std::invalid_argument("grid: extent must be positive");
    nx_ = static_cast<int>(std::ceil(size.x / cell_size - 1e-9));
    ny_ = static_cast<int>(std::ceil(size.y / cell_size - 1e-9));
    state_.assign(std::size_t(nx_) * ny_, CellState::Unknown);
    hits_.assign(state_.size(), 0);
    frame_stamp_.assign(state_.size(), 0);
}

void OccupancyGrid::mark_free(GridIndex i, int& touched) {
    ++touched;
    auto& st = state_[i.y * nx_ + i.x];
    if (st != CellState::Occupied) st = CellState::Free;
}

void OccupancyGrid::bump_hit(GridIndex i, int& touched,
                             std::vector<GridIndex>& newly) {
    ++touched;
    std::size_t k = std::size_t(i.y) * nx_ + i.x;
    if (frame_stamp_[k] == frame_counter_) return;  // one capture per frame
    frame_stamp_[k] = frame_counter_;
    if (state_[k] == CellState::Occupied) return;
    if (++hits_[k] >= sigma_) {
        state_[k] = CellState::Occupied;
        occupied_list_.push_back(i);
        newly.push_back(i);
    }
}

OccupancyGrid::IntegrateResult OccupancyGrid::integrate_frame(const SensorFrame& frame) {
    if (!in_extent(frame.origin))
        throw std::invalid_argument("integrate_frame: frame outside grid extent");
    if (frame.timestamp < last_timestamp_)
        throw std::invalid_argument("integrate_frame: timestamps must be non-decreasing");
    last_timestamp_ = frame.timestamp;
    ++frame_counter_;

    IntegrateResult res;
    const Vec2 lo = frame_.origin;
    const Vec2 hi = frame_.origin + frame_.size;
    for (const auto& ray : frame.hits) {
        Vec2 d = ray.endpoint - frame.origin;
        // Clip the ray to the grid extent.
        double t_end = 1.0;
        if (d.x > 0) t_end = std::min(t_end, (hi.x - 1e-9 - frame.origin.x) / d.x);
        if (d.x < 0) t_end = std::min(t_end, (lo.x + 1e-9 - frame.origin.x) / d.x);
        if (d.y > 0) t_end = std::min(t_end, (hi.y - 1e-9 - frame.origin.y) / d.y);
        if (d.y < 0) t_end = std::min(t_end, (lo.y + 1e-9 - frame.origin.y) / d.y);
        bool clipped = t_end < 1.0;
        Vec2 end = frame.origin + d * std::max(0.0, t_end);
        GridIndex cur = world_to_index(frame.origin);
        GridIndex last = world_to_index(end);

        // Amanatides-Woo traversal from cur to last.
        int step_x = d.x > 0 ? 1 : (d.x < 0 ? -1 : 0);
        int step_y = d.y > 0 ? 1 : (d.y < 0 ? -1 : 0);
        double inf = std::numeric_limits<double>::infinity();
        double t_max_x = inf, t_max_y = inf, t_dx = inf, t_dy = inf;
        if (step_x != 0) {
            double bx = lo.x + (cur.x + (step_x > 0 ? 1 : 0)) * cell_;
            t_max_x = (bx - frame.origin.x) / d.x;
            t_dx = cell_ / std::abs(d.x);
        }
        if (step_y != 0) {
            double by = lo.y + (cur.y + (step_y > 0 ? 1 : 0)) * cell_;
            t_max_y = (by - frame.origin.y) / d.y;
            t_dy = cell_ / std::abs(d.y);
        }
        int guard = nx_ + ny_ + 4;
        while (guard-- > 0) {
            if (cur == last) break;
            mark_free(cur, res.cells_touched);
            if (t_max_x < t_max_y) {
                cur.x += step_x;
                t_max_x += t_dx;
            } else {
                cur.y += step_y;
                t_max_y += t_dy;
            }
            if (!valid_index(cur)) break;
        }
        if (valid_index(last)) {
            if (ray.hit && !clipped) {
                bump_hit(last, res.cells_touched, res.newly_occupied);
            } else {
                mark_free(last, res.cells_touched);
            }
        }
    }
    return res;
}

OccupancyGrid OccupancyGrid::resample(double r_new, const ResolutionLadder& ladder) const {
    if (!ladder.contains(r_new))
        throw std::invalid_argument("resample: target resolution not in ladder");
    OccupancyGrid out(frame_.origin, frame_.size, r_new, sigma_);
    for (int j = 0; j < out.ny_; ++j) {
        double y0 = j * r_new, y1 = y0 + r_new;
        int sy0 = std::clamp(int(std::floor(y0 / cell_ + 1e-7)), 0, ny_ - 1);
        int sy1 = std::clamp(int(std::ceil(y1 / cell_ - 1e-7)) - 1, 0, ny_ - 1);
        for (int i = 0; i < out.nx_; ++i) {
            double x0 = i * r_new, x1 = x0 + r_new;
            int sx0 = std::clamp(int(std::floor(x0 / cell_ + 1e-7)), 0, nx_ - 1);
            int sx1 = std::clamp(int(std::ceil(x1 / cell_ - 1e-7)) - 1, 0, nx_ - 1);
            bool any_occ = false, all_free = true;
            for (int sy = sy0; sy <= sy1 && !any_occ; ++sy) {
                for (int sx = sx0; sx <= sx1; ++sx) {
                    CellState st = state_[sy * nx_ + sx];
                    if (st == CellState::Occupied) { any_occ = true; break; }
                    if (st != CellState::Free) all_free = false;
                }
            }
            CellState st = any_occ ? CellState::Occupied
                                   : (all_free ? CellState::Free : CellState::Unknown);
            out.state_[j * out.nx_ + i] = st;
            if (st == CellState::Occupied) out.occupied_list_.push_back({i, j});
        }
    }
    return out;
}

std::optional<Vec2> OccupancyGrid::nearest_obstacle(Vec2 p, double max_range) const {
    if (!in_extent(p)) throw std::out_of_range("nearest_obstacle: point outside extent");
    double best = max_range;
    std::optional<Vec2> result;
    for (const auto& idx : occupied_list_) {
        Vec2 c = index_center(idx);
        double d = distance(c, p);
        if (d <= best) {
            best = d;
            result = c;
        }
    }
    return result;
}

void OccupancyGrid::set_state(GridIndex i, CellState st) {
    if (!valid_index(i)) throw std::out_of_range("set_state: index out of range");
    std::size_t k = std::size_t(i.y) * nx_ + i.x;
    if (st == CellState::Occupied && state_[k] != CellState::Occupied) {
        occupied_list_.push_back(i);
        hits_[k] = static_cast<std::uint16_t>(sigma_);
    }
    state_[k] = st;
}

std::string OccupancyGrid::dump() const {
    std::string out;
    out.reserve(std::size_t(ny_) * (nx_ + 1));
    for (int j = 0; j < ny_; ++j) {
        for (int i = 0; i < nx_; ++i) {
            switch (state_[j * nx_ + i]) {
                case CellState::Unknown: out += '?'; break;
                case CellState::Free: out += '.'; break;
                case CellState::Occupied: out += '#'; break;
            }
        }
        out += '\n';
    }
    return out;
}

}  // namespace eans
