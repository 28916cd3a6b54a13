#pragma once

#include <vector>

#include "envopt/scenario.hpp"

namespace envopt {

// One self-connected piece of a region. Cells connect 4-way; rectangles and
// disks connect through positive-area overlap.
struct RegionComponent {
    std::vector<GridCell> cells;
    std::vector<Rect> rects;
    std::vector<Disk> disks;
};

struct ComponentDecomposition {
    std::vector<RegionComponent> start_components;
    std::vector<RegionComponent> goal_components;
    // Per agent (scenario order): index into start_components / goal_components.
    std::vector<int> start_membership;
    std::vector<int> goal_membership;
    // Farthest-point distance matrices between components.
    std::vector<std::vector<double>> dist_start;       // C_S x C_S, zero diagonal
    std::vector<std::vector<double>> dist_goal;        // C_D x C_D, zero diagonal
    std::vector<std::vector<double>> dist_start_goal;  // C_S x C_D
    // max entry(dist_start) + max entry(dist_goal) <= min entry(dist_start_goal)
    bool start_goal_separated = true;

    int num_start() const { return int(start_components.size()); }
    int num_goal() const { return int(goal_components.size()); }
};

// Farthest distance between any point of component a and any point of b
// (corner-attained for cells/rects; center distance plus radii for disks).
double component_max_distance(const RegionComponent& a, const RegionComponent& b,
                              const Scenario& s);

// Splits the start and goal regions into connected components, assigns each
// agent to the component containing its start/goal, and fills the distance
// matrices. Empty regions give empty decompositions. Throws InvalidScenario
// when an agent lies in no component of a non-empty region.
ComponentDecomposition decompose_components(const Scenario& s);

} // namespace envopt
