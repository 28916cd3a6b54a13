#pragma once

#include <optional>
#include <vector>

#include "envopt/scenario.hpp"

namespace envopt {

struct Path {
    std::vector<Vec2> waypoints;
    double length = 0.0;
};

// Minimal-length path between two free cells of a blocked-cell mask,
// 4-connected, deterministic tie-breaking (lexicographic x then y).
// Returns nullopt when no path exists or an endpoint is blocked/outside.
std::optional<std::vector<GridCell>> grid_shortest_cells(const std::vector<uint8_t>& blocked,
                                                         int w, int h, GridCell from, GridCell to);

// Obstacle-avoiding shortest path between two free positions. Discrete scenes
// search the cell graph directly; continuous scenes search the same graph on
// the scene rasterized at grid_resolution. Waypoints are cell centers with
// the exact endpoints substituted at both ends.
std::optional<Path> shortest_path(const Scenario& s, const Vec2& from, const Vec2& to);

// Like shortest_path but with extra blocked cells and per-cell entry weights
// (used by layout construction to prefer obstacle-free corridors). Cost of
// entering cell c is 1 + weight[c]; returns the cell sequence.
std::optional<std::vector<GridCell>> grid_cheapest_cells(const std::vector<uint8_t>& blocked,
                                                         const std::vector<double>& weight,
                                                         int w, int h, GridCell from, GridCell to);

} // namespace envopt
