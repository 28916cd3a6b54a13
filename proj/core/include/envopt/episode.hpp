#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "envopt/mdp.hpp"
#include "envopt/rvo.hpp"
#include "envopt/scenario.hpp"

namespace envopt {

struct CollisionEvent {
    enum class Kind { AgentAgent, AgentObstacle };
    Kind kind = Kind::AgentAgent;
    int first = 0;   // agent index
    int second = 0;  // agent or obstacle index

    bool operator==(const CollisionEvent& o) const {
        return kind == o.kind && first == o.first && second == o.second;
    }
};

struct TraceStep {
    int t = 0;
    std::vector<Vec2> agent_positions;
    std::vector<Vec2> agent_velocities;
    std::vector<uint8_t> agent_arrived;
    std::vector<Vec2> obstacle_positions;
    std::vector<Vec2> obstacle_velocities;
    std::vector<double> agent_rewards;
    double obstacle_reward = 0.0;
    std::vector<double> constraint_values;  // parallel to the configured constraints
    std::vector<CollisionEvent> collisions;
};

struct EpisodeTrace {
    std::vector<Vec2> initial_obstacle_positions;
    std::vector<std::string> constraint_names;
    std::vector<TraceStep> steps;
    std::vector<uint8_t> success;
    std::vector<int> navigation_time;  // first arrival step; -1 when an agent never arrives
    bool timed_out = false;

    bool all_succeeded() const {
        for (auto s : success)
            if (!s) return false;
        return true;
    }
};

// Obstacle controller for online scenes: desired velocity per obstacle.
using ObstaclePolicyFn = std::function<std::vector<Vec2>(const SystemState&, const Scenario&)>;

struct SimulationOptions {
    PlannerConfig planner;
    std::optional<RewardConfig> rewards;          // defaults to the scenario's
    std::vector<ConstraintSpec> constraints;
    std::optional<double> capacity_per_step;      // online obstacle area budget
    int max_steps_override = 0;                   // 0: use scenario.max_steps
    bool run_to_horizon = false;                  // keep ticking after all agents arrive
    double dt = 1.0;
};

// Rolls the scene forward: obstacles first (via the supplied policy, online
// scenes only), then all agents via the velocity-obstacle planner, until all
// agents are within goal tolerance or the step cap is hit. A timeout is a
// recorded outcome, not an error.
EpisodeTrace simulate_navigation(const Scenario& s, ObstaclePolicyFn obstacle_policy = nullptr,
                                 const SimulationOptions& options = {});

// One synchronous agent step against the current obstacle state: planner
// commands from the pre-move snapshot, integration, arrival marking (goal
// tolerance = agent radius). Arrived agents hold position.
void advance_agents(SystemState& state, const Scenario& s, const PlannerConfig& planner,
                    double dt);

// Collision predicate used when recording trace events; exposed so traces
// can be re-verified geometrically.
std::vector<CollisionEvent> detect_collisions(const Scenario& s,
                                              std::span<const Vec2> agent_positions,
                                              std::span<const Vec2> obstacle_positions);

double traveled_length(const EpisodeTrace& trace, const Scenario& s, int agent_index);

void save_trace(const EpisodeTrace& trace, const Scenario& s, const std::string& path);
std::pair<EpisodeTrace, Scenario> load_trace(const std::string& path);

} // namespace envopt
