#include "envopt/mdp.hpp"

#include <algorithm>
#include <set>

#include "envopt/episode.hpp"
#include "envopt/errors.hpp"
#include "envopt/metrics.hpp"

namespace envopt {

SystemState initial_state(const Scenario& s) {
    SystemState st;
    for (const auto& ob : s.obstacles) {
        st.obstacle_positions.push_back(ob.position);
        st.obstacle_velocities.push_back(ob.velocity);
    }
    st.initial_obstacle_positions = st.obstacle_positions;
    for (const auto& a : s.agents) {
        st.agent_positions.push_back(a.start);
        st.agent_velocities.push_back({});
        st.agent_arrived.push_back(0);
    }
    return st;
}

RewardConfig RewardConfig::defaults_for(const Scenario& s) {
    RewardConfig cfg;
    for (const auto& a : s.agents) cfg.priorities.push_back(a.priority);
    for (const auto& ob : s.obstacles) cfg.betas.push_back(ob.beta);
    return cfg;
}

namespace {

Rect rect_at(const ObstacleSpec& spec, const Scenario& s, const Vec2& position) {
    ObstacleSpec moved = spec;
    moved.position = position;
    return s.obstacle_rect(moved);
}

std::vector<GridCell> cells_at(const ObstacleSpec& spec, const Scenario& s, const Vec2& position) {
    ObstacleSpec moved = spec;
    moved.position = position;
    return s.obstacle_cells(moved);
}

} // namespace

StepResult step_offline(SystemState& state, const DiscreteAction& action, const Scenario& s,
                        const RewardConfig& cfg) {
    int m = int(s.obstacles.size());
    StepResult out;
    out.local_rewards.assign(m, 0.0);
    if (action.obstacle_index < 0 || action.obstacle_index >= m)
        throw ConfigError("step_offline: obstacle index out of range");

    int j = action.obstacle_index;
    if (action.move != Move::Stay) {
        double cs = s.cell_size();
        Vec2 delta{};
        switch (action.move) {
            case Move::Up: delta = {0.0, cs}; break;
            case Move::Down: delta = {0.0, -cs}; break;
            case Move::Left: delta = {-cs, 0.0}; break;
            case Move::Right: delta = {cs, 0.0}; break;
            case Move::Stay: break;
        }
        Vec2 target = state.obstacle_positions[j] + delta;
        auto target_cells = cells_at(s.obstacles[j], s, target);

        std::set<GridCell> others;
        for (int k = 0; k < m; ++k) {
            if (k == j) continue;
            for (const auto& c : cells_at(s.obstacles[k], s, state.obstacle_positions[k]))
                others.insert(c);
        }
        std::set<GridCell> keepout(s.start_region.cells.begin(), s.start_region.cells.end());
        keepout.insert(s.goal_region.cells.begin(), s.goal_region.cells.end());

        bool free = true;
        for (const auto& c : target_cells) {
            if (!s.in_grid(c) || others.count(c) || keepout.count(c)) {
                free = false;
                break;
            }
        }
        if (free) {
            double moved = double(cells_at(s.obstacles[j], s, target).size()) * cs * cs;
            Rect before = rect_at(s.obstacles[j], s, state.obstacle_positions[j]);
            Rect after = rect_at(s.obstacles[j], s, target);
            out.displaced_area = moved - before.overlap_area(after);
            state.obstacle_positions[j] = target;
        } else {
            out.blocked = true;
            out.local_rewards[j] = cfg.collision_penalty;
        }
    }

    state.t += 1;
    state.current_obstacle += 1;
    if (state.current_obstacle >= m) {
        state.current_obstacle = 0;
        state.round += 1;
    }
    return out;
}

StepResult step_online(SystemState& state, std::span<const Vec2> desired, const Scenario& s,
                       const RewardConfig& cfg, double dt, std::optional<double> capacity_per_step) {
    int m = int(s.obstacles.size());
    if (int(desired.size()) != m) throw ConfigError("step_online: desired velocity count mismatch");
    StepResult out;
    out.local_rewards.assign(m, 0.0);

    double a_max = s.max_accel * dt;
    double budget = capacity_per_step.value_or(std::numeric_limits<double>::infinity());

    std::vector<Rect> rects(m);
    for (int j = 0; j < m; ++j) rects[j] = rect_at(s.obstacles[j], s, state.obstacle_positions[j]);

    for (int j = 0; j < m; ++j) {
        // Cap the request to the speed bound first, then steer under the
        // acceleration bound; the result stays inside both bounds.
        Vec2 want = desired[j];
        double wn = want.norm();
        if (wn > s.max_speed) want = want * (s.max_speed / wn);
        Vec2 dv = want - state.obstacle_velocities[j];
        double dvn = dv.norm();
        if (dvn > a_max) dv = dv * (a_max / dvn);
        Vec2 vel = state.obstacle_velocities[j] + dv;

        Vec2 target = state.obstacle_positions[j] + vel * dt;
        Rect moved = rect_at(s.obstacles[j], s, target);

        bool collides = moved.lo.x < 0.0 || moved.lo.y < 0.0 || moved.hi.x > s.width ||
                        moved.hi.y > s.height;
        for (int k = 0; k < m && !collides; ++k)
            if (k != j && moved.overlaps(rects[k])) collides = true;
        for (size_t i = 0; i < state.agent_positions.size() && !collides; ++i)
            if (disk_rect_overlap(state.agent_positions[i], s.agents[i].radius, moved))
                collides = true;

        double displacement = moved.area() - rects[j].overlap_area(moved);
        bool over_capacity = !collides && displacement > budget + 1e-12;

        if (collides || over_capacity) {
            // Hold position and brake at the acceleration limit. Collisions
            // are penalized; running out of relocation capacity is not.
            Vec2 v = state.obstacle_velocities[j];
            double vn = v.norm();
            state.obstacle_velocities[j] = vn > a_max ? v * ((vn - a_max) / vn) : Vec2{};
            if (collides) {
                out.blocked = true;
                out.local_rewards[j] = cfg.collision_penalty;
            }
        } else {
            out.local_rewards[j] -=
                cfg.displacement_penalty * distance(state.obstacle_positions[j], target);
            state.obstacle_positions[j] = target;
            state.obstacle_velocities[j] = vel;
            rects[j] = moved;
            out.displaced_area += displacement;
            budget -= displacement;
        }
    }
    state.t += 1;
    return out;
}

std::vector<double> team_reward_offline(const EpisodeTrace& trace, const Scenario& s) {
    auto shortest = reference_lengths(s);
    auto pct = pct_speed(trace, s.max_speed);
    auto ratio = distance_ratio(trace, s, shortest);
    std::vector<double> out;
    for (size_t i = 0; i < pct.size(); ++i) out.push_back(pct[i] + ratio[i]);
    return out;
}

double agent_reward_online(const Vec2& position, const Vec2& goal, const Vec2& velocity) {
    Vec2 to_goal = goal - position;
    double d = to_goal.norm();
    if (d <= 0.0) return 0.0;
    return to_goal.dot(velocity) / d;
}

ObstacleRewards obstacle_reward(std::span<const double> agent_rewards,
                                std::span<const double> local_rewards, const RewardConfig& cfg) {
    if (agent_rewards.size() != cfg.priorities.size())
        throw ConfigError("obstacle_reward: agent reward / priority length mismatch");
    if (local_rewards.size() != cfg.betas.size())
        throw ConfigError("obstacle_reward: local reward / beta length mismatch");

    double team = 0.0;
    size_t n = agent_rewards.size();
    for (size_t i = 0; i < n; ++i) team += cfg.priorities[i] * agent_rewards[i];
    if (n > 0) team /= double(n);

    ObstacleRewards out;
    for (size_t j = 0; j < local_rewards.size(); ++j) {
        out.per_obstacle.push_back(team + cfg.betas[j] * local_rewards[j]);
        out.total += out.per_obstacle.back();
    }
    return out;
}

double constraint_value(const SystemState& state, const ConstraintSpec& spec) {
    double sum = 0.0;
    switch (spec.kind) {
        case ConstraintSpec::Kind::DeviationDistance:
            for (size_t j = 0; j < state.obstacle_positions.size(); ++j)
                sum += distance(state.obstacle_positions[j], state.initial_obstacle_positions[j]);
            break;
        case ConstraintSpec::Kind::TotalSpeed:
            for (const auto& v : state.obstacle_velocities) sum += v.norm();
            break;
    }
    return sum - spec.bound;
}

} // namespace envopt
