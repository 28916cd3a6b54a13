#pragma once

#include <set>
#include <vector>

#include "envopt/scenario.hpp"

namespace envopt::testing {

// Discrete scene on a w x h unit grid. Regions default to the agent
// start/goal cells; obstacles are single cells.
inline Scenario make_grid_scenario(int w, int h, const std::vector<GridCell>& starts,
                                   const std::vector<GridCell>& goals,
                                   const std::vector<GridCell>& obstacles, double radius = 0.25,
                                   std::vector<double> priorities = {}) {
    Scenario s;
    s.mode = Mode::OfflineDiscrete;
    s.width = w;
    s.height = h;
    s.grid_resolution = 1.0;
    for (size_t i = 0; i < starts.size(); ++i) {
        AgentSpec a;
        a.id = int(i) + 1;
        a.radius = radius;
        a.start = s.cell_center(starts[i]);
        a.goal = s.cell_center(goals[i]);
        a.priority = i < priorities.size() ? priorities[i] : 1.0;
        s.agents.push_back(a);
    }
    s.start_region.cells = starts;
    s.goal_region.cells = goals;
    for (size_t j = 0; j < obstacles.size(); ++j) {
        ObstacleSpec ob;
        ob.id = int(j) + 1;
        ob.position = s.cell_center(obstacles[j]);
        s.obstacles.push_back(ob);
    }
    return s;
}

// Continuous scene with rectangle obstacles; regions default to the agent
// start/goal disks.
inline Scenario make_continuous_scenario(double w, double h,
                                         const std::vector<Vec2>& starts,
                                         const std::vector<Vec2>& goals,
                                         const std::vector<Rect>& obstacles,
                                         double radius = 0.25,
                                         std::vector<double> priorities = {}) {
    Scenario s;
    s.mode = Mode::OnlineContinuous;
    s.width = w;
    s.height = h;
    for (size_t i = 0; i < starts.size(); ++i) {
        AgentSpec a;
        a.id = int(i) + 1;
        a.radius = radius;
        a.start = starts[i];
        a.goal = goals[i];
        a.priority = i < priorities.size() ? priorities[i] : 1.0;
        s.agents.push_back(a);
        s.start_region.disks.push_back({starts[i], radius});
        s.goal_region.disks.push_back({goals[i], radius});
    }
    for (size_t j = 0; j < obstacles.size(); ++j) {
        ObstacleSpec ob;
        ob.id = int(j) + 1;
        ob.shape = RectShape{obstacles[j].width(), obstacles[j].height()};
        ob.position = obstacles[j].center();
        s.obstacles.push_back(ob);
    }
    return s;
}

} // namespace envopt::testing
