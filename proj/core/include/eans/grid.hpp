#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eans/geometry.hpp"
#include "eans/world.hpp"

namespace eans {

enum class CellState : std::uint8_t { Unknown, Free, Occupied };

struct GridIndex {
    int x = 0;
    int y = 0;
    bool operator==(const GridIndex&) const = default;
};

struct ResolutionLadder {
    std::vector<double> levels;  // strictly increasing, levels[0] is finest

    double finest() const { return levels.front(); }
    double coarsest() const { return levels.back(); }
    bool contains(double r) const;
    // Strictly increasing, and every level must divide the extent into at
    // least 4 cells per axis.
    void validate(Vec2 extent) const;
};

// Geometric frame shared by every resolution level: fixed origin and extent.
struct GridFrame {
    Vec2 origin;
    Vec2 size;

    bool in_extent(Vec2 p) const {
        return p.x >= origin.x && p.x < origin.x + size.x && p.y >= origin.y &&
               p.y < origin.y + size.y;
    }
    GridIndex world_to_index(Vec2 p, double r) const;
    // Sum of per-axis index differences at cell size r; both points must be
    // in extent.
    int manhattan_distance(Vec2 a, Vec2 b, double r) const;
};

class OccupancyGrid {
  public:
    OccupancyGrid(Vec2 origin, Vec2 size, double cell_size, int sigma);

    const GridFrame& frame() const { return frame_; }
    double cell_size() const { return cell_; }
    int sigma() const { return sigma_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    bool in_extent(Vec2 p) const { return frame_.in_extent(p); }

    GridIndex world_to_index(Vec2 p) const { return frame_.world_to_index(p, cell_); }
    // Cell center, clamped into the extent: edge cells of a non-divisible
    // extent stick out, and their nominal centers would fall outside.
    Vec2 index_center(GridIndex i) const {
        double x = frame_.origin.x + (i.x + 0.5) * cell_;
        double y = frame_.origin.y + (i.y + 0.5) * cell_;
        return {std::min(x, frame_.origin.x + frame_.size.x - 1e-9),
                std::min(y, frame_.origin.y + frame_.size.y - 1e-9)};
    }
    bool valid_index(GridIndex i) const {
        return i.x >= 0 && i.x < nx_ && i.y >= 0 && i.y < ny_;
    }
    CellState state(GridIndex i) const { return state_[i.y * nx_ + i.x]; }
    int hit_count(GridIndex i) const { return hits_[i.y * nx_ + i.x]; }

    struct IntegrateResult {
        int cells_touched = 0;
        std::vector<GridIndex> newly_occupied;
    };
    // Carves free space along each ray and bumps the hit count of the end
    // cell of hit rays (at most once per frame per cell). Cells reaching the
    // confirmation count flip to occupied and stay occupied.
    IntegrateResult integrate_frame(const SensorFrame& frame);

    // Conservative pooling into a grid at r_new: occupied wins, free only if
    // every overlapped cell is free. Hit counts start a fresh epoch.
    OccupancyGrid resample(double r_new, const ResolutionLadder& ladder) const;

    // Center of the occupied cell nearest to p within max_range.
    std::optional<Vec2> nearest_obstacle(Vec2 p, double max_range) const;

    const std::vector<GridIndex>& occupied_cells() const { return occupied_list_; }

    // One character per cell ('?', '.', '#'), row per line, y ascending.
    std::string dump() const;

    // Exposed for tests that need direct state construction.
    void set_state(GridIndex i, CellState st);

  private:
    void mark_free(GridIndex i, int& touched);
    void bump_hit(GridIndex i, int& touched, std::vector<GridIndex>& newly);

    GridFrame frame_;
    double cell_;
    int sigma_;
    int nx_, ny_;
    std::vector<CellState> state_;
    std::vector<std::uint16_t> hits_;
    std::vector<std::uint32_t> frame_stamp_;  // per-frame dedupe of hit bumps
    std::uint32_t frame_counter_ = 0;
    double last_timestamp_ = -1e300;
    std::vector<GridIndex> occupied_list_;
};

}  // namespace eans
