#pragma once

#include <deque>
#include <functional>
#include <optional>

#include "envopt/episode.hpp"
#include "envopt/policy.hpp"
#include "envopt/scenario.hpp"

namespace envopt {

enum class StepStatus { Running, Terminal, Truncated };

template <class Obs>
struct EnvStep {
    Obs observation;
    double reward = 0.0;
    std::vector<double> constraint_indicators;
    StepStatus status = StepStatus::Running;
};

// Draws the scenario for the next episode; defaults to a fixed scene.
using ScenarioSampler = std::function<Scenario(Rng&)>;

struct OfflineEnvOptions {
    std::optional<RewardConfig> rewards;
    PlannerConfig planner;     // drives the terminal navigation rollout
    ScenarioSampler sampler;   // defaults to the base scene
    int rollout_max_steps = 0; // 0: the scenario's step cap
};

// Layout-optimization episodes on a discrete scene: the policy considers one
// obstacle per sub-step (m sub-steps per round, max_round rounds). Rewards
// are the per-obstacle collision penalties each sub-step, plus the
// priority-weighted team term at the terminal sub-step, computed from a full
// navigation rollout on the final layout.
class OfflineLayoutEnv {
public:
    using Observation = GridObservation;
    using Action = int;
    using Options = OfflineEnvOptions;

    explicit OfflineLayoutEnv(Scenario base, Options options = {});

    Observation reset(Rng& rng);
    EnvStep<Observation> step(Action action, Rng& rng);
    int num_constraints() const { return 0; }

    const Scenario& scenario() const { return scenario_; }
    // The scene with obstacles at their current positions.
    Scenario current_layout() const;
    Observation observe() const;
    const EpisodeTrace* last_trace() const { return last_trace_ ? &*last_trace_ : nullptr; }
    const SystemState& state() const { return state_; }

    GridPolicyConfig policy_config() const;

private:
    Scenario base_;
    Options options_;
    Scenario scenario_;
    RewardConfig rewards_;
    SystemState state_;
    std::optional<EpisodeTrace> last_trace_;
    bool done_ = true;
};

struct OnlineEnvOptions {
    std::optional<RewardConfig> rewards;
    PlannerConfig planner;
    std::vector<ConstraintSpec> constraints;
    ScenarioSampler sampler;
    std::optional<double> capacity_per_step;
    bool run_to_horizon = true;  // keep episodes at full length for the constraint returns
    double comm_radius = 2.0;
    int max_steps_override = 0;
};

// Concurrent obstacle/agent episodes on a continuous scene. Actions are
// desired obstacle velocities; rewards follow the priority-weighted team
// term plus collision penalties; constraint indicators are emitted per step.
class OnlineNavEnv {
public:
    using Observation = GraphObservation;
    using Action = std::vector<Vec2>;
    using Options = OnlineEnvOptions;

    explicit OnlineNavEnv(Scenario base, Options options = {});

    Observation reset(Rng& rng);
    EnvStep<Observation> step(const Action& desired, Rng& rng);
    int num_constraints() const { return int(options_.constraints.size()); }

    const Scenario& scenario() const { return scenario_; }
    const SystemState& state() const { return state_; }
    Observation observe() const;

private:
    Scenario base_;
    Options options_;
    Scenario scenario_;
    RewardConfig rewards_;
    SystemState state_;
    int max_steps_ = 0;
    bool done_ = true;
};

// Graph snapshot of a scene state: obstacle nodes then agent nodes, features
// normalized by scene size / max speed, edges within the communication radius.
GraphObservation build_graph_observation(const SystemState& state, const Scenario& s,
                                         double comm_radius);

// Image snapshot of a discrete scene state: obstacle occupancy, agent cells,
// goal cells, and the obstacle currently under consideration.
GridObservation build_grid_observation(const SystemState& state, const Scenario& s,
                                       int current_obstacle);

// Wraps a graph policy as an obstacle controller for simulate_navigation.
// The policy and parameters are captured by value.
ObstaclePolicyFn gnn_obstacle_policy(GnnPolicy policy, std::vector<double> theta,
                                     double comm_radius, bool greedy, uint64_t seed);

// Runs one layout-optimization episode with the grid policy on a fixed scene
// and returns the scene with the final obstacle layout.
Scenario optimize_layout_with_policy(const Scenario& s, const GridPolicy& policy,
                                     std::span<const double> theta, bool greedy, uint64_t seed,
                                     const RewardConfig& rewards);

} // namespace envopt
