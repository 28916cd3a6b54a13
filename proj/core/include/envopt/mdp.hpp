#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "envopt/scenario.hpp"

namespace envopt {

struct EpisodeTrace;

// Joint state of the controllable obstacles and the navigating agents.
struct SystemState {
    std::vector<Vec2> obstacle_positions;
    std::vector<Vec2> obstacle_velocities;
    std::vector<Vec2> initial_obstacle_positions;  // anchors the deviation constraint
    std::vector<Vec2> agent_positions;
    std::vector<Vec2> agent_velocities;
    std::vector<uint8_t> agent_arrived;
    int t = 0;
    // Offline bookkeeping: obstacles act one per sub-step, m sub-steps form a round.
    int current_obstacle = 0;
    int round = 0;
};

SystemState initial_state(const Scenario& s);

enum class Move { Up = 0, Down = 1, Left = 2, Right = 3, Stay = 4 };
constexpr int kNumMoves = 5;

struct DiscreteAction {
    int obstacle_index = 0;
    Move move = Move::Stay;
};

struct RewardConfig {
    std::vector<double> priorities;   // per agent; defaults to scenario priorities
    std::vector<double> betas;        // per obstacle; defaults to scenario betas
    double gamma = 0.99;
    double collision_penalty = -1.0;
    double displacement_penalty = 0.0;  // local cost per unit of obstacle motion
    int max_round = 8;                  // offline episode cap, in rounds

    static RewardConfig defaults_for(const Scenario& s);
};

struct ConstraintSpec {
    enum class Kind { DeviationDistance, TotalSpeed };
    Kind kind = Kind::DeviationDistance;
    double bound = 10.0;      // C_d or C_v
    double constant = 90.0;   // lower bound on the discounted constraint return
    double delta = 0.1;
    double eps = 0.0;

    std::string name() const {
        return kind == Kind::DeviationDistance ? "deviation_distance" : "total_speed";
    }
};

struct StepResult {
    std::vector<double> local_rewards;  // per obstacle, collision penalties
    bool blocked = false;
    double displaced_area = 0.0;        // obstacle area moved this step
};

// Discrete transition: move one obstacle to an adjacent cell. Blocked targets
// (outside the grid, another obstacle, the start/goal regions) leave the
// obstacle in place and charge the collision penalty. Advances the
// sub-step/round bookkeeping.
StepResult step_offline(SystemState& state, const DiscreteAction& action, const Scenario& s,
                        const RewardConfig& cfg);

// Continuous transition: steer every obstacle toward its desired velocity
// under the acceleration bound, then integrate. A move that would overlap
// another obstacle, an agent or leave the scene is cancelled (the obstacle
// brakes at the acceleration limit, penalty charged). When capacity_per_step
// is set, obstacles past the area budget stay put without penalty.
StepResult step_online(SystemState& state, std::span<const Vec2> desired, const Scenario& s,
                       const RewardConfig& cfg, double dt = 1.0,
                       std::optional<double> capacity_per_step = std::nullopt);

// Projection of the agent velocity onto its goal direction; positive when
// moving toward the goal, zero at the goal.
double agent_reward_online(const Vec2& position, const Vec2& goal, const Vec2& velocity);

// Per-agent terminal rewards of a completed rollout: mean fractional speed
// plus the reference-to-traveled distance ratio (both in [0,1]).
std::vector<double> team_reward_offline(const EpisodeTrace& trace, const Scenario& s);

struct ObstacleRewards {
    std::vector<double> per_obstacle;  // priority-weighted team term + beta * local
    double total = 0.0;                // sum over obstacles
};

ObstacleRewards obstacle_reward(std::span<const double> agent_rewards,
                                std::span<const double> local_rewards, const RewardConfig& cfg);

// Signed constraint value: <= 0 means satisfied.
double constraint_value(const SystemState& state, const ConstraintSpec& spec);

inline double constraint_indicator(double h) { return h <= 0.0 ? 1.0 : 0.0; }

} // namespace envopt
