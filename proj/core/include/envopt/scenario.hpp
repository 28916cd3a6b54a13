#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "envopt/geometry.hpp"

namespace envopt {

enum class Mode { OfflineDiscrete, OnlineContinuous };

struct AgentSpec {
    int id = 0;            // 1-based
    double radius = 0.0;
    Vec2 start;
    Vec2 goal;
    double priority = 1.0;
};

// Discrete obstacles occupy a set of cells given as offsets from an anchor
// cell; the anchor is the cell containing `position`. Continuous obstacles
// are axis-aligned rectangles centered at `position`.
struct CellShape {
    std::vector<GridCell> offsets{GridCell{0, 0}};
};
struct RectShape {
    double width = 0.0;
    double height = 0.0;
};

struct ObstacleSpec {
    int id = 0;            // 1-based
    std::variant<CellShape, RectShape> shape = CellShape{};
    Vec2 position;
    Vec2 velocity;         // continuous mode only
    double beta = 1.0;     // weight of the obstacle's local reward term

    bool is_cells() const { return std::holds_alternative<CellShape>(shape); }
    const CellShape& cells_shape() const { return std::get<CellShape>(shape); }
    const RectShape& rect_shape() const { return std::get<RectShape>(shape); }
};

// A region is a union of grid cells (discrete scenes) and/or rectangles and
// disks (continuous scenes).
struct Region {
    std::vector<GridCell> cells;
    std::vector<Rect> rects;
    std::vector<Disk> disks;

    bool empty() const { return cells.empty() && rects.empty() && disks.empty(); }
};

struct Scenario {
    Mode mode = Mode::OfflineDiscrete;
    double width = 8.0;
    double height = 8.0;
    double grid_resolution = 1.0;  // cells per world unit
    Region start_region;
    Region goal_region;
    std::vector<AgentSpec> agents;
    std::vector<ObstacleSpec> obstacles;
    double max_speed = 0.05;
    double max_accel = 0.05;
    int max_steps = 500;
    uint64_t seed = 0;

    double cell_size() const { return 1.0 / grid_resolution; }
    int grid_width() const { return int(std::lround(width * grid_resolution)); }
    int grid_height() const { return int(std::lround(height * grid_resolution)); }
    Rect bounds() const { return {{0.0, 0.0}, {width, height}}; }

    Vec2 cell_center(GridCell c) const {
        double cs = cell_size();
        return {(c.x + 0.5) * cs, (c.y + 0.5) * cs};
    }
    GridCell cell_of(const Vec2& p) const {
        double cs = cell_size();
        return {int(std::floor(p.x / cs)), int(std::floor(p.y / cs))};
    }
    Rect cell_rect(GridCell c) const {
        double cs = cell_size();
        return {{c.x * cs, c.y * cs}, {(c.x + 1) * cs, (c.y + 1) * cs}};
    }
    bool in_grid(GridCell c) const {
        return c.x >= 0 && c.x < grid_width() && c.y >= 0 && c.y < grid_height();
    }

    double max_agent_radius() const;

    // Absolute cells of a discrete obstacle given its anchor position.
    std::vector<GridCell> obstacle_cells(const ObstacleSpec& ob) const;
    // All obstacle cells of the scene (discrete mode).
    std::vector<GridCell> all_obstacle_cells() const;
    // Footprint rectangle of a continuous obstacle.
    Rect obstacle_rect(const ObstacleSpec& ob) const;
    // Obstacle footprints as rectangles in either mode (cells become unit rects).
    std::vector<Rect> obstacle_rects() const;
};

// Throws InvalidScenario when regions overlap, priorities are unsorted,
// agents sit outside their regions, or separations violate the placement
// requirements (pairwise start/goal center distance >= 2 * max radius).
void validate_scenario(const Scenario& s);

// Area of the scene not covered by obstacles or by the start/goal regions.
// Discrete: exact cell accounting. Continuous: exact rectangle-union plus
// disjoint-disk areas. Throws InvalidScenario on overlapping regions.
double free_area(const Scenario& s);

// Exact area of a region (cells + rect union + disks; parts assumed disjoint).
double region_area(const Region& r, const Scenario& s);

bool region_contains(const Region& r, const Scenario& s, const Vec2& p);

// True iff the disk B(position, radius) penetrates no obstacle, no other
// agent's disk (at its start position) and stays inside the scene bounds.
// Boundary contact is allowed. `exclude` skips one agent id.
bool collision_free(const Vec2& position, double radius, const Scenario& s,
                    std::optional<int> exclude = std::nullopt);

// Blocked-cell mask of the scene: obstacles rasterized onto the grid.
// Index = x + y * grid_width.
std::vector<uint8_t> occupancy_grid(const Scenario& s);

} // namespace envopt
