#include "envopt/env.hpp"

#include <algorithm>
#include <memory>

#include "envopt/errors.hpp"

namespace envopt {

GridObservation build_grid_observation(const SystemState& state, const Scenario& s,
                                       int current_obstacle) {
    GridObservation obs(4, s.grid_height(), s.grid_width());
    for (size_t j = 0; j < s.obstacles.size(); ++j) {
        ObstacleSpec moved = s.obstacles[j];
        moved.position = state.obstacle_positions[j];
        for (const auto& c : s.obstacle_cells(moved)) {
            if (!s.in_grid(c)) continue;
            obs.at(0, c.y, c.x) = 1.0;
            if (int(j) == current_obstacle) obs.at(3, c.y, c.x) = 1.0;
        }
    }
    for (size_t i = 0; i < s.agents.size(); ++i) {
        GridCell a = s.cell_of(state.agent_positions[i]);
        GridCell g = s.cell_of(s.agents[i].goal);
        if (s.in_grid(a)) obs.at(1, a.y, a.x) += 1.0;
        if (s.in_grid(g)) obs.at(2, g.y, g.x) += 1.0;
    }
    return obs;
}

GraphObservation build_graph_observation(const SystemState& state, const Scenario& s,
                                         double comm_radius) {
    const int m = int(s.obstacles.size());
    const int n = int(s.agents.size());
    GraphObservation obs;
    obs.node_dim = 7;
    obs.edge_dim = 3;

    auto push_node = [&](const Vec2& p, const Vec2& v, const Vec2& goal_offset, double kind) {
        obs.nodes.push_back({p.x / s.width, p.y / s.height, v.x / s.max_speed, v.y / s.max_speed,
                             goal_offset.x / s.width, goal_offset.y / s.height, kind});
    };
    std::vector<Vec2> centers;
    for (int j = 0; j < m; ++j) {
        push_node(state.obstacle_positions[j], state.obstacle_velocities[j],
                  state.initial_obstacle_positions[j] - state.obstacle_positions[j], 0.0);
        centers.push_back(state.obstacle_positions[j]);
        obs.obstacle_nodes.push_back(j);
    }
    for (int i = 0; i < n; ++i) {
        push_node(state.agent_positions[i], state.agent_velocities[i],
                  s.agents[i].goal - state.agent_positions[i], 1.0);
        centers.push_back(state.agent_positions[i]);
    }

    int total = m + n;
    obs.neighbors.assign(total, {});
    obs.edges.assign(total, {});
    for (int i = 0; i < total; ++i) {
        for (int j = 0; j < total; ++j) {
            if (i == j) continue;
            Vec2 d = centers[j] - centers[i];
            double dist = d.norm();
            if (dist > comm_radius) continue;
            obs.neighbors[i].push_back(j);
            obs.edges[i].push_back({d.x / comm_radius, d.y / comm_radius, dist / comm_radius});
        }
    }
    return obs;
}

// ------------------------------------------------------------------ offline

OfflineLayoutEnv::OfflineLayoutEnv(Scenario base, Options options)
    : base_(std::move(base)), options_(std::move(options)) {
    if (base_.mode != Mode::OfflineDiscrete)
        throw ConfigError("layout-optimization episodes need a discrete scene");
    scenario_ = base_;
    rewards_ = options_.rewards.value_or(RewardConfig::defaults_for(base_));
}

GridPolicyConfig OfflineLayoutEnv::policy_config() const {
    GridPolicyConfig cfg;
    cfg.grid_height = base_.grid_height();
    cfg.grid_width = base_.grid_width();
    return cfg;
}

OfflineLayoutEnv::Observation OfflineLayoutEnv::reset(Rng& rng) {
    scenario_ = options_.sampler ? options_.sampler(rng) : base_;
    if (!options_.rewards) rewards_ = RewardConfig::defaults_for(scenario_);
    state_ = initial_state(scenario_);
    last_trace_.reset();
    done_ = false;
    return observe();
}

OfflineLayoutEnv::Observation OfflineLayoutEnv::observe() const {
    return build_grid_observation(state_, scenario_, state_.current_obstacle);
}

Scenario OfflineLayoutEnv::current_layout() const {
    Scenario out = scenario_;
    for (size_t j = 0; j < out.obstacles.size(); ++j)
        out.obstacles[j].position = state_.obstacle_positions[j];
    return out;
}

EnvStep<GridObservation> OfflineLayoutEnv::step(Action action, Rng&) {
    if (done_) throw ConfigError("layout env: step after episode end");
    DiscreteAction a{state_.current_obstacle, Move(action)};
    auto res = step_offline(state_, a, scenario_, rewards_);

    EnvStep<Observation> out;
    std::vector<double> zeros(scenario_.agents.size(), 0.0);
    out.reward = obstacle_reward(zeros, res.local_rewards, rewards_).total;

    if (state_.round >= rewards_.max_round) {
        // Episode over: navigate the final layout and grant the team term.
        SimulationOptions sim;
        sim.planner = options_.planner;
        sim.max_steps_override = options_.rollout_max_steps;
        last_trace_ = simulate_navigation(current_layout(), nullptr, sim);
        auto team = team_reward_offline(*last_trace_, scenario_);
        std::vector<double> zero_local(scenario_.obstacles.size(), 0.0);
        out.reward += obstacle_reward(team, zero_local, rewards_).total;
        out.status = StepStatus::Terminal;
        done_ = true;
    }
    out.observation = observe();
    return out;
}

// ------------------------------------------------------------------- online

OnlineNavEnv::OnlineNavEnv(Scenario base, Options options)
    : base_(std::move(base)), options_(std::move(options)) {
    if (base_.mode != Mode::OnlineContinuous)
        throw ConfigError("online navigation episodes need a continuous scene");
    scenario_ = base_;
    rewards_ = options_.rewards.value_or(RewardConfig::defaults_for(base_));
    max_steps_ = options_.max_steps_override > 0 ? options_.max_steps_override : base_.max_steps;
}

OnlineNavEnv::Observation OnlineNavEnv::reset(Rng& rng) {
    scenario_ = options_.sampler ? options_.sampler(rng) : base_;
    if (!options_.rewards) rewards_ = RewardConfig::defaults_for(scenario_);
    max_steps_ = options_.max_steps_override > 0 ? options_.max_steps_override : scenario_.max_steps;
    state_ = initial_state(scenario_);
    for (size_t i = 0; i < scenario_.agents.size(); ++i) {
        double tol = scenario_.agents[i].radius * options_.planner.goal_tolerance_scale;
        if (distance(scenario_.agents[i].start, scenario_.agents[i].goal) <= tol)
            state_.agent_arrived[i] = 1;
    }
    done_ = false;
    return observe();
}

OnlineNavEnv::Observation OnlineNavEnv::observe() const {
    return build_graph_observation(state_, scenario_, options_.comm_radius);
}

EnvStep<GraphObservation> OnlineNavEnv::step(const Action& desired, Rng&) {
    if (done_) throw ConfigError("online env: step after episode end");
    auto res = step_online(state_, desired, scenario_, rewards_, 1.0, options_.capacity_per_step);
    advance_agents(state_, scenario_, options_.planner, 1.0);

    EnvStep<Observation> out;
    std::vector<double> agent_rewards;
    for (size_t i = 0; i < scenario_.agents.size(); ++i)
        agent_rewards.push_back(agent_reward_online(state_.agent_positions[i],
                                                    scenario_.agents[i].goal,
                                                    state_.agent_velocities[i]));
    out.reward = obstacle_reward(agent_rewards, res.local_rewards, rewards_).total;
    for (const auto& c : options_.constraints)
        out.constraint_indicators.push_back(constraint_indicator(constraint_value(state_, c)));

    bool all_arrived = true;
    for (auto f : state_.agent_arrived)
        if (!f) all_arrived = false;
    if (state_.t >= max_steps_ || (all_arrived && !options_.run_to_horizon)) {
        out.status = StepStatus::Terminal;
        done_ = true;
    }
    out.observation = observe();
    return out;
}

// ------------------------------------------------------------------ helpers

ObstaclePolicyFn gnn_obstacle_policy(GnnPolicy policy, std::vector<double> theta,
                                     double comm_radius, bool greedy, uint64_t seed) {
    auto rng = std::make_shared<Rng>(seed);
    return [policy = std::move(policy), theta = std::move(theta), comm_radius, greedy,
            rng](const SystemState& state, const Scenario& s) -> std::vector<Vec2> {
        auto obs = build_graph_observation(state, s, comm_radius);
        auto dist = policy.forward(obs, theta);
        return greedy ? greedy_action(dist) : sample_action(dist, *rng);
    };
}

Scenario optimize_layout_with_policy(const Scenario& s, const GridPolicy& policy,
                                     std::span<const double> theta, bool greedy, uint64_t seed,
                                     const RewardConfig& rewards) {
    Rng rng(seed);
    SystemState state = initial_state(s);
    int m = int(s.obstacles.size());
    int total = rewards.max_round * m;
    for (int k = 0; k < total && m > 0; ++k) {
        auto obs = build_grid_observation(state, s, state.current_obstacle);
        auto dist = policy.forward(obs, theta);
        int action = greedy ? greedy_action(dist) : sample_action(dist, rng);
        DiscreteAction a{state.current_obstacle, Move(action)};
        step_offline(state, a, s, rewards);
    }
    Scenario out = s;
    for (int j = 0; j < m; ++j) out.obstacles[j].position = state.obstacle_positions[j];
    return out;
}

} // namespace envopt
