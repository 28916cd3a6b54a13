#include "envopt/episode.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "envopt/errors.hpp"
#include "envopt/grid_path.hpp"
#include "envopt/scenario_io.hpp"

namespace envopt {

using nlohmann::json;

std::vector<CollisionEvent> detect_collisions(const Scenario& s,
                                              std::span<const Vec2> agent_positions,
                                              std::span<const Vec2> obstacle_positions) {
    std::vector<CollisionEvent> events;
    size_t n = agent_positions.size();
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            double min_sep = s.agents[i].radius + s.agents[j].radius;
            if (distance(agent_positions[i], agent_positions[j]) < min_sep - 1e-12)
                events.push_back({CollisionEvent::Kind::AgentAgent, int(i), int(j)});
        }
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < obstacle_positions.size(); ++j) {
            ObstacleSpec moved = s.obstacles[j];
            moved.position = obstacle_positions[j];
            if (disk_rect_overlap(agent_positions[i], s.agents[i].radius - 1e-12,
                                  s.obstacle_rect(moved)))
                events.push_back({CollisionEvent::Kind::AgentObstacle, int(i), int(j)});
        }
    }
    return events;
}

namespace {

// Blocked-cell mask with the obstacles at their current positions. Agents
// parked at their goals act as static blockers for steering purposes: every
// cell its disk touches is closed, so routes keep a full cell of clearance.
std::vector<uint8_t> occupancy_from_state(const SystemState& state, const Scenario& s,
                                          int exclude_agent) {
    int w = s.grid_width();
    int h = s.grid_height();
    std::vector<uint8_t> blocked(size_t(w) * h, 0);
    for (size_t j = 0; j < s.obstacles.size(); ++j) {
        ObstacleSpec moved = s.obstacles[j];
        moved.position = state.obstacle_positions[j];
        Rect r = s.obstacle_rect(moved);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if (!blocked[size_t(x) + size_t(y) * w] && s.cell_rect({x, y}).overlaps(r))
                    blocked[size_t(x) + size_t(y) * w] = 1;
    }
    for (size_t i = 0; i < state.agent_positions.size(); ++i) {
        if (int(i) == exclude_agent || !state.agent_arrived[i]) continue;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if (!blocked[size_t(x) + size_t(y) * w] &&
                    disk_rect_overlap(state.agent_positions[i], s.agents[i].radius,
                                      s.cell_rect({x, y})))
                    blocked[size_t(x) + size_t(y) * w] = 1;
    }
    return blocked;
}

// Straight segment stays on free cells of the mask.
bool segment_clear(const std::vector<uint8_t>& blocked, const Scenario& s, const Vec2& from,
                   const Vec2& to) {
    int w = s.grid_width();
    double len = distance(from, to);
    int samples = std::max(2, int(len / (0.25 * s.cell_size())) + 1);
    for (int k = 0; k <= samples; ++k) {
        Vec2 p = from + (to - from) * (double(k) / samples);
        GridCell c = s.cell_of(p);
        if (!s.in_grid(c)) return false;
        if (blocked[size_t(c.x) + size_t(c.y) * w]) return false;
    }
    return true;
}

// Local steering target: the farthest point of the agent's current shortest
// path visible along a straight line (the goal itself in open space); the
// next waypoint past `lookahead` when nothing further is visible; the goal
// when no path exists.
Vec2 steering_target(const std::vector<uint8_t>& blocked, const SystemState& state,
                     const Scenario& s, int i, double lookahead) {
    const Vec2 pos = state.agent_positions[i];
    const Vec2 goal = s.agents[i].goal;
    if (lookahead <= 0.0 || distance(pos, goal) <= lookahead) return goal;
    if (segment_clear(blocked, s, pos, goal)) return goal;
    int w = s.grid_width();
    // Wedged between blockers (own cell masked): steer at the nearest free
    // cell to get back onto the graph.
    GridCell own = s.cell_of(pos);
    if (s.in_grid(own) && blocked[size_t(own.x) + size_t(own.y) * w]) {
        double best = 1e18;
        Vec2 escape = goal;
        for (int y = 0; y < s.grid_height(); ++y)
            for (int x = 0; x < w; ++x) {
                if (blocked[size_t(x) + size_t(y) * w]) continue;
                Vec2 c = s.cell_center({x, y});
                double d = distance(pos, c);
                if (d < best) {
                    best = d;
                    escape = c;
                }
            }
        return escape;
    }
    auto cells = grid_shortest_cells(blocked, w, s.grid_height(), s.cell_of(pos), s.cell_of(goal));
    if (!cells || cells->size() < 2) return goal;

    std::vector<Vec2> waypoints;
    for (size_t k = 1; k < cells->size(); ++k) waypoints.push_back(s.cell_center((*cells)[k]));
    waypoints.back() = goal;
    for (size_t k = waypoints.size(); k-- > 0;) {
        if (distance(pos, waypoints[k]) >= 1e-9 && segment_clear(blocked, s, pos, waypoints[k]))
            return waypoints[k];
    }
    for (const auto& wp : waypoints)
        if (distance(pos, wp) >= lookahead) return wp;
    return goal;
}

} // namespace

void advance_agents(SystemState& state, const Scenario& s, const PlannerConfig& planner,
                    double dt) {
    const int n = int(s.agents.size());
    const int m = int(s.obstacles.size());
    std::vector<ObstacleState> ob_states(m);
    for (int j = 0; j < m; ++j) {
        ObstacleSpec moved = s.obstacles[j];
        moved.position = state.obstacle_positions[j];
        ob_states[j] = {s.obstacle_rect(moved), state.obstacle_velocities[j]};
    }
    std::vector<Vec2> commands(n);
    for (int i = 0; i < n; ++i) {
        if (state.agent_arrived[i]) continue;
        Vec2 target = s.agents[i].goal;
        if (planner.waypoint_lookahead > 0.0) {
            auto blocked = occupancy_from_state(state, s, i);
            target = steering_target(blocked, state, s, i, planner.waypoint_lookahead);
        }
        AgentState self{state.agent_positions[i], state.agent_velocities[i], s.agents[i].radius,
                        target, false};
        std::vector<AgentState> neighbors;
        for (int k = 0; k < n; ++k) {
            if (k == i) continue;
            neighbors.push_back({state.agent_positions[k], state.agent_velocities[k],
                                 s.agents[k].radius, s.agents[k].goal,
                                 state.agent_arrived[k] != 0});
        }
        commands[i] = rvo_step(self, neighbors, ob_states, s.bounds(), s.max_speed, dt, planner);
    }
    for (int i = 0; i < n; ++i) {
        if (state.agent_arrived[i]) {
            state.agent_velocities[i] = {};
            continue;
        }
        state.agent_velocities[i] = commands[i];
        state.agent_positions[i] += commands[i] * dt;
        double tol = s.agents[i].radius * planner.goal_tolerance_scale;
        if (distance(state.agent_positions[i], s.agents[i].goal) <= tol)
            state.agent_arrived[i] = 1;
    }
}

EpisodeTrace simulate_navigation(const Scenario& s, ObstaclePolicyFn obstacle_policy,
                                 const SimulationOptions& options) {
    const int n = int(s.agents.size());
    const int m = int(s.obstacles.size());
    RewardConfig rewards = options.rewards.value_or(RewardConfig::defaults_for(s));
    int max_steps = options.max_steps_override > 0 ? options.max_steps_override : s.max_steps;

    SystemState state = initial_state(s);
    EpisodeTrace trace;
    trace.initial_obstacle_positions = state.obstacle_positions;
    for (const auto& c : options.constraints) trace.constraint_names.push_back(c.name());
    trace.navigation_time.assign(n, -1);

    auto tolerance = [&](int i) { return s.agents[i].radius * options.planner.goal_tolerance_scale; };
    for (int i = 0; i < n; ++i) {
        if (distance(s.agents[i].start, s.agents[i].goal) <= tolerance(i)) {
            state.agent_arrived[i] = 1;
            trace.navigation_time[i] = 0;
        }
    }

    auto all_arrived = [&] {
        for (int i = 0; i < n; ++i)
            if (!state.agent_arrived[i]) return false;
        return true;
    };

    PlannerConfig planner = options.planner;
    planner.preferred_speed = std::min(planner.preferred_speed, s.max_speed);

    for (int t = 0; t < max_steps; ++t) {
        if (all_arrived() && !options.run_to_horizon) break;

        StepResult ob_step;
        ob_step.local_rewards.assign(m, 0.0);
        if (s.mode == Mode::OnlineContinuous && obstacle_policy && m > 0) {
            auto desired = obstacle_policy(state, s);
            ob_step = step_online(state, desired, s, rewards, options.dt,
                                  options.capacity_per_step);
        } else {
            state.t += 1;
        }

        std::vector<uint8_t> was_arrived = state.agent_arrived;
        advance_agents(state, s, planner, options.dt);
        std::vector<double> agent_rewards(n, 0.0);
        for (int i = 0; i < n; ++i) {
            if (!was_arrived[i] && state.agent_arrived[i]) trace.navigation_time[i] = t + 1;
            agent_rewards[i] = agent_reward_online(state.agent_positions[i], s.agents[i].goal,
                                                   state.agent_velocities[i]);
        }

        TraceStep step;
        step.t = t;
        step.agent_positions = state.agent_positions;
        step.agent_velocities = state.agent_velocities;
        step.agent_arrived = state.agent_arrived;
        step.obstacle_positions = state.obstacle_positions;
        step.obstacle_velocities = state.obstacle_velocities;
        step.agent_rewards = agent_rewards;
        step.obstacle_reward =
            obstacle_reward(agent_rewards, ob_step.local_rewards, rewards).total;
        for (const auto& c : options.constraints)
            step.constraint_values.push_back(constraint_value(state, c));
        step.collisions = detect_collisions(s, state.agent_positions, state.obstacle_positions);
        trace.steps.push_back(std::move(step));
    }

    trace.success.assign(n, 0);
    for (int i = 0; i < n; ++i) trace.success[i] = state.agent_arrived[i];
    trace.timed_out = !all_arrived();
    return trace;
}

double traveled_length(const EpisodeTrace& trace, const Scenario& s, int agent_index) {
    double len = 0.0;
    Vec2 prev = s.agents[agent_index].start;
    for (const auto& step : trace.steps) {
        len += distance(prev, step.agent_positions[agent_index]);
        prev = step.agent_positions[agent_index];
    }
    return len;
}

namespace {

json vec2_to(const Vec2& v) { return json::array({v.x, v.y}); }
Vec2 vec2_from(const json& j) { return {j[0].get<double>(), j[1].get<double>()}; }

json vecs_to(const std::vector<Vec2>& vs) {
    json out = json::array();
    for (const auto& v : vs) out.push_back(vec2_to(v));
    return out;
}

std::vector<Vec2> vecs_from(const json& j) {
    std::vector<Vec2> out;
    for (const auto& v : j) out.push_back(vec2_from(v));
    return out;
}

} // namespace

void save_trace(const EpisodeTrace& trace, const Scenario& s, const std::string& path) {
    json j;
    j["scenario"] = json::parse(scenario_to_json_text(s));
    j["initial_obstacles"] = vecs_to(trace.initial_obstacle_positions);
    j["constraint_names"] = trace.constraint_names;
    json steps = json::array();
    for (const auto& st : trace.steps) {
        json sj;
        sj["t"] = st.t;
        sj["agent_positions"] = vecs_to(st.agent_positions);
        sj["agent_velocities"] = vecs_to(st.agent_velocities);
        sj["agent_arrived"] = st.agent_arrived;
        sj["obstacle_positions"] = vecs_to(st.obstacle_positions);
        sj["obstacle_velocities"] = vecs_to(st.obstacle_velocities);
        sj["agent_rewards"] = st.agent_rewards;
        sj["obstacle_reward"] = st.obstacle_reward;
        sj["constraint_values"] = st.constraint_values;
        json cols = json::array();
        for (const auto& c : st.collisions) {
            cols.push_back({{"kind", c.kind == CollisionEvent::Kind::AgentAgent ? "agent_agent"
                                                                                : "agent_obstacle"},
                            {"first", c.first},
                            {"second", c.second}});
        }
        sj["collisions"] = cols;
        steps.push_back(sj);
    }
    j["steps"] = steps;
    j["success"] = trace.success;
    j["navigation_time"] = trace.navigation_time;
    j["timed_out"] = trace.timed_out;

    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write trace file: " + path);
    out << j.dump() << "\n";
}

std::pair<EpisodeTrace, Scenario> load_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open trace file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    json j;
    try {
        j = json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("trace JSON: ") + e.what());
    }
    try {
        Scenario s = scenario_from_json_text(j.at("scenario").dump());
        EpisodeTrace trace;
        trace.initial_obstacle_positions = vecs_from(j.at("initial_obstacles"));
        trace.constraint_names = j.value("constraint_names", std::vector<std::string>{});
        for (const auto& sj : j.at("steps")) {
            TraceStep st;
            st.t = sj.at("t").get<int>();
            st.agent_positions = vecs_from(sj.at("agent_positions"));
            st.agent_velocities = vecs_from(sj.at("agent_velocities"));
            st.agent_arrived = sj.at("agent_arrived").get<std::vector<uint8_t>>();
            st.obstacle_positions = vecs_from(sj.at("obstacle_positions"));
            st.obstacle_velocities = vecs_from(sj.at("obstacle_velocities"));
            st.agent_rewards = sj.at("agent_rewards").get<std::vector<double>>();
            st.obstacle_reward = sj.at("obstacle_reward").get<double>();
            st.constraint_values = sj.at("constraint_values").get<std::vector<double>>();
            for (const auto& cj : sj.at("collisions")) {
                CollisionEvent ev;
                ev.kind = cj.at("kind").get<std::string>() == "agent_agent"
                              ? CollisionEvent::Kind::AgentAgent
                              : CollisionEvent::Kind::AgentObstacle;
                ev.first = cj.at("first").get<int>();
                ev.second = cj.at("second").get<int>();
                st.collisions.push_back(ev);
            }
            trace.steps.push_back(std::move(st));
        }
        trace.success = j.at("success").get<std::vector<uint8_t>>();
        trace.navigation_time = j.at("navigation_time").get<std::vector<int>>();
        trace.timed_out = j.at("timed_out").get<bool>();
        return {trace, s};
    } catch (const json::exception& e) {
        throw ParseError(std::string("trace JSON: ") + e.what());
    }
}

} // namespace envopt
