#pragma once

#include <vector>

#include "envopt/geometry.hpp"

namespace envopt {

struct AgentState {
    Vec2 position;
    Vec2 velocity;
    double radius = 0.0;
    Vec2 goal;
    bool arrived = false;
};

struct ObstacleState {
    Rect rect;
    Vec2 velocity;
};

// Sampled reciprocal-velocity-obstacle planner. Candidates are the zero
// velocity, the preferred velocity, and directions x magnitudes fanned around
// the goal direction; each candidate is scored by
//   w_collision / time_to_collision + |candidate - preferred|.
// Against other agents the tested velocity is the candidate averaged with the
// agent's current velocity; against obstacles the candidate is tested as-is.
struct PlannerConfig {
    double time_horizon = 40.0;     // collisions beyond this are ignored
    int direction_samples = 16;
    int magnitude_samples = 4;
    double w_collision = 1.5;
    double preferred_speed = 0.05;  // capped at the scenario max speed
    double sensing_radius = 3.0;    // neighbors beyond it are invisible
    double goal_tolerance_scale = 1.0;  // arrival when within scale * radius of goal
    // The simulator steers each agent at a point this far along its current
    // shortest path instead of straight at the goal; 0 disables guidance.
    double waypoint_lookahead = 0.9;
};

// Velocity command for one agent. Neighbor list holds the other agents within
// sensing range; obstacle list holds the static/moving rectangles. The command
// speed never exceeds max_speed; if every candidate collides immediately the
// command is the zero velocity.
Vec2 rvo_step(const AgentState& self, const std::vector<AgentState>& neighbors,
              const std::vector<ObstacleState>& obstacles, const Rect& bounds,
              double max_speed, double dt, const PlannerConfig& cfg);

// Time until a point moving at vel penetrates the rectangle inflated by
// radius; infinity when it never does within the horizon.
double time_to_collision_rect(const Vec2& pos, const Vec2& vel, const Rect& rect, double radius,
                              double horizon);

// Time until two disks with combined radius penetrate under relative motion.
double time_to_collision_disk(const Vec2& rel_pos, const Vec2& rel_vel, double combined_radius,
                              double horizon);

} // namespace envopt
