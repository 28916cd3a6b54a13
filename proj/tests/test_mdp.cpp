#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "envopt/env.hpp"
#include "envopt/episode.hpp"
#include "envopt/errors.hpp"
#include "envopt/mdp.hpp"
#include "envopt/random.hpp"
#include "support/helpers.hpp"

using namespace envopt;
using namespace envopt::testing;

TEST_CASE("a discrete move into a free cell updates the position") {
    auto s = make_grid_scenario(8, 8, {{0, 0}}, {{7, 7}}, {{4, 4}});
    auto cfg = RewardConfig::defaults_for(s);
    auto st = initial_state(s);
    auto res = step_offline(st, {0, Move::Right}, s, cfg);
    CHECK_FALSE(res.blocked);
    CHECK(res.local_rewards[0] == 0.0);
    CHECK(st.obstacle_positions[0] == s.cell_center({5, 4}));
    CHECK(st.current_obstacle == 0);  // single obstacle: next round
    CHECK(st.round == 1);
}

TEST_CASE("a discrete move into an occupied cell is penalized and held") {
    auto s = make_grid_scenario(8, 8, {{0, 0}}, {{7, 7}}, {{4, 4}, {5, 4}});
    auto cfg = RewardConfig::defaults_for(s);
    auto st = initial_state(s);
    auto res = step_offline(st, {0, Move::Right}, s, cfg);
    CHECK(res.blocked);
    CHECK(res.local_rewards[0] == cfg.collision_penalty);
    CHECK(st.obstacle_positions[0] == s.cell_center({4, 4}));
}

TEST_CASE("moves off the grid and into regions are blocked") {
    auto s = make_grid_scenario(8, 8, {{1, 0}}, {{7, 7}}, {{0, 0}});
    auto cfg = RewardConfig::defaults_for(s);
    auto st = initial_state(s);
    auto res = step_offline(st, {0, Move::Left}, s, cfg);  // off the grid
    CHECK(res.blocked);
    auto res2 = step_offline(st, {0, Move::Right}, s, cfg);  // into the start cell
    CHECK(res2.blocked);
}

TEST_CASE("staying put is the identity with zero reward") {
    auto s = make_grid_scenario(8, 8, {{0, 0}}, {{7, 7}}, {{4, 4}});
    auto cfg = RewardConfig::defaults_for(s);
    auto st = initial_state(s);
    auto before = st.obstacle_positions[0];
    auto res = step_offline(st, {0, Move::Stay}, s, cfg);
    CHECK_FALSE(res.blocked);
    CHECK(res.local_rewards[0] == 0.0);
    CHECK(st.obstacle_positions[0] == before);
}

TEST_CASE("discrete transitions keep one obstacle per cell") {
    auto s = make_grid_scenario(6, 6, {{0, 0}}, {{5, 5}}, {{2, 2}, {3, 2}, {2, 3}, {3, 3}});
    auto cfg = RewardConfig::defaults_for(s);
    auto st = initial_state(s);
    Rng rng(5);
    for (int k = 0; k < 200; ++k) {
        DiscreteAction a{st.current_obstacle, Move(rng.uniform_int(5))};
        step_offline(st, a, s, cfg);
        std::set<std::pair<int, int>> cells;
        for (size_t j = 0; j < st.obstacle_positions.size(); ++j) {
            ObstacleSpec moved = s.obstacles[j];
            moved.position = st.obstacle_positions[j];
            for (const auto& c : s.obstacle_cells(moved)) CHECK(cells.insert({c.x, c.y}).second);
        }
        CHECK(cells.size() == 4);
    }
}

TEST_CASE("uniform motion when the desired velocity matches the current one") {
    auto s = make_continuous_scenario(8, 8, {{1, 1}}, {{7, 7}}, {Rect::from_center({4, 4}, 1, 1)});
    auto cfg = RewardConfig::defaults_for(s);
    auto st = initial_state(s);
    st.obstacle_velocities[0] = {0.03, 0.0};
    std::vector<Vec2> desired = {{0.03, 0.0}};
    auto res = step_online(st, desired, s, cfg);
    CHECK_FALSE(res.blocked);
    CHECK(st.obstacle_velocities[0].x == doctest::Approx(0.03));
    CHECK(st.obstacle_positions[0].x == doctest::Approx(4.03));
}

TEST_CASE("velocity changes clamp at the acceleration bound") {
    auto s = make_continuous_scenario(8, 8, {{1, 1}}, {{7, 7}}, {Rect::from_center({4, 4}, 1, 1)});
    auto cfg = RewardConfig::defaults_for(s);
    auto st = initial_state(s);
    st.obstacle_velocities[0] = {0.05, 0.0};
    std::vector<Vec2> desired = {{-0.05, 0.0}};  // full reversal requested
    step_online(st, desired, s, cfg);
    CHECK(st.obstacle_velocities[0].x == doctest::Approx(0.0));  // change = a_max = 0.05
}

TEST_CASE("an obstacle overlapping an agent is held in place and penalized") {
    auto s = make_continuous_scenario(8, 8, {{3.3, 4.0}}, {{7, 7}},
                                      {Rect::from_center({4.0, 4.0}, 1.0, 1.0)}, 0.25);
    auto cfg = RewardConfig::defaults_for(s);
    auto st = initial_state(s);
    std::vector<Vec2> desired = {{-0.05, 0.0}};  // toward the agent
    auto res = step_online(st, desired, s, cfg, 1.0);
    CHECK(res.blocked);
    CHECK(res.local_rewards[0] == cfg.collision_penalty);
    CHECK(st.obstacle_positions[0].x == doctest::Approx(4.0));
}

TEST_CASE("the acceleration clamp holds along random online traces") {
    auto s = make_continuous_scenario(
        8, 8, {{1, 1}, {1, 7}}, {{7, 7}, {7, 1}},
        {Rect::from_center({4, 4}, 1, 1), Rect::from_center({2.5, 4}, 0.8, 0.8)});
    auto cfg = RewardConfig::defaults_for(s);
    auto st = initial_state(s);
    Rng rng(13);
    Vec2 prev[2] = {st.obstacle_velocities[0], st.obstacle_velocities[1]};
    for (int t = 0; t < 300; ++t) {
        std::vector<Vec2> desired = {{rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)},
                                     {rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)}};
        step_online(st, desired, s, cfg);
        for (int j = 0; j < 2; ++j) {
            CHECK(distance(st.obstacle_velocities[j], prev[j]) <= s.max_accel + 1e-12);
            CHECK(st.obstacle_velocities[j].norm() <= s.max_speed + 1e-12);
            prev[j] = st.obstacle_velocities[j];
        }
    }
}

TEST_CASE("capacity budgets bound the displaced area per step") {
    auto s = make_continuous_scenario(
        8, 8, {{1, 1}}, {{7, 7}},
        {Rect::from_center({4, 4}, 1, 1), Rect::from_center({2, 4}, 1, 1),
         Rect::from_center({6, 4}, 1, 1)});
    auto cfg = RewardConfig::defaults_for(s);
    auto st = initial_state(s);
    double cap = 0.06;
    for (int t = 0; t < 50; ++t) {
        std::vector<Vec2> desired = {{0.05, 0.0}, {0.05, 0.0}, {0.05, 0.0}};
        auto res = step_online(st, desired, s, cfg, 1.0, cap);
        CHECK(res.displaced_area <= cap + 1e-9);
    }
}

TEST_CASE("goalward velocity projection rewards approach and ignores drift") {
    CHECK(agent_reward_online({1, 0}, {0, 0}, {-2, 0}) == doctest::Approx(2.0));
    CHECK(agent_reward_online({1, 0}, {0, 0}, {0, 0}) == doctest::Approx(0.0));
    CHECK(agent_reward_online({1, 0}, {0, 0}, {0, 3}) == doctest::Approx(0.0));
    CHECK(agent_reward_online({2, 2}, {2, 2}, {1, 1}) == 0.0);  // at the goal
}

TEST_CASE("terminal team rewards follow speed plus path efficiency") {
    auto s = make_continuous_scenario(8, 4, {{1, 2}}, {{6.95, 2}}, {}, 0.25);
    s.max_steps = 200;
    auto trace = simulate_navigation(s);
    REQUIRE(trace.all_succeeded());
    auto r = team_reward_offline(trace, s);
    REQUIRE(r.size() == 1);
    // Straight full-speed run: both terms close to 1.
    CHECK(r[0] > 1.8);
    CHECK(r[0] <= 2.0 + 1e-9);
}

TEST_CASE("an agent that never moves earns zero team reward") {
    auto s = make_continuous_scenario(8, 4, {{1, 2}}, {{7, 2}}, {}, 0.25);
    EpisodeTrace trace;
    trace.success = {0};
    trace.navigation_time = {-1};
    for (int t = 0; t < 10; ++t) {
        TraceStep st;
        st.t = t;
        st.agent_positions = {{1, 2}};
        st.agent_velocities = {{0, 0}};
        st.agent_arrived = {0};
        trace.steps.push_back(st);
    }
    auto r = team_reward_offline(trace, s);
    CHECK(r[0] == doctest::Approx(0.0));
}

TEST_CASE("half-efficiency at half speed scores one") {
    // Hand-built trace: traveled = 2 x reference at half the speed bound.
    auto s = make_grid_scenario(8, 1, {{0, 0}}, {{4, 0}}, {}, 0.25);
    s.max_steps = 400;
    EpisodeTrace trace;
    trace.success = {1};
    int steps = 320;  // 8 units at 0.025 per step
    trace.navigation_time = {steps};
    Vec2 p = s.agents[0].start;
    for (int t = 0; t < steps; ++t) {
        TraceStep st;
        st.t = t;
        // Zig-zag: twice the straight distance.
        p += Vec2{0.0125, t % 2 == 0 ? 0.021650635094610966 : -0.021650635094610966};
        st.agent_positions = {p};
        st.agent_velocities = {{0.0125, t % 2 == 0 ? 0.021650635094610966 : -0.021650635094610966}};
        st.agent_arrived = {uint8_t(t + 1 == steps)};
        trace.steps.push_back(st);
    }
    auto r = team_reward_offline(trace, s);
    CHECK(r[0] == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("reward aggregation matches the weighted team plus local form") {
    RewardConfig cfg;
    cfg.priorities = {2.0, 1.0};
    cfg.betas = {0.5};
    std::vector<double> r_a = {1.0, 1.0};
    std::vector<double> local = {-1.0};
    auto out = obstacle_reward(r_a, local, cfg);
    CHECK(out.per_obstacle[0] == doctest::Approx(1.0));  // 1.5 - 0.5
    CHECK(out.total == doctest::Approx(1.0));
}

TEST_CASE("the total reward is the sum of the per-obstacle rewards") {
    RewardConfig cfg;
    cfg.priorities = {2.0, 1.0};
    cfg.betas = {0.5, 0.5, 0.5};
    std::vector<double> r_a = {1.0, 1.0};
    std::vector<double> local = {-1.0, -1.0, -1.0};
    auto out = obstacle_reward(r_a, local, cfg);
    CHECK(out.total == doctest::Approx(3.0));
    double sum = 0.0;
    for (double v : out.per_obstacle) sum += v;
    CHECK(out.total == doctest::Approx(sum));
}

TEST_CASE("zero priorities leave only the local term") {
    RewardConfig cfg;
    cfg.priorities = {};
    cfg.betas = {0.75};
    std::vector<double> local = {-2.0};
    auto out = obstacle_reward({}, local, cfg);
    CHECK(out.per_obstacle[0] == doctest::Approx(-1.5));
}

TEST_CASE("scaling priorities scales the team term linearly") {
    Rng rng(17);
    for (int rep = 0; rep < 20; ++rep) {
        RewardConfig a, b;
        int n = 1 + rng.uniform_int(4);
        double k = 0.5 + 2.0 * rng.uniform();
        std::vector<double> r_a;
        for (int i = 0; i < n; ++i) {
            a.priorities.push_back(rng.uniform(0.1, 2.0));
            b.priorities.push_back(a.priorities.back() * k);
            r_a.push_back(rng.uniform(-1.0, 1.0));
        }
        a.betas = {0.5};
        b.betas = {0.5};
        std::vector<double> local = {rng.uniform(-1.0, 0.0)};
        auto ra = obstacle_reward(r_a, local, a);
        auto rb = obstacle_reward(r_a, local, b);
        double team_a = ra.per_obstacle[0] - 0.5 * local[0];
        double team_b = rb.per_obstacle[0] - 0.5 * local[0];
        CHECK(team_b == doctest::Approx(team_a * k));
    }
}

TEST_CASE("constraint values are signed distances to the bound") {
    auto s = make_continuous_scenario(8, 8, {{1, 1}}, {{7, 7}},
                                      {Rect::from_center({4, 4}, 1, 1),
                                       Rect::from_center({2, 2}, 1, 1)});
    auto st = initial_state(s);
    ConstraintSpec dev{ConstraintSpec::Kind::DeviationDistance, 10.0, 90.0, 0.1, 0.0};
    CHECK(constraint_value(st, dev) == doctest::Approx(-10.0));

    st.obstacle_positions[0].x += 3.0;
    st.obstacle_positions[1].y += 3.0;
    CHECK(constraint_value(st, dev) == doctest::Approx(-4.0));

    ConstraintSpec speed{ConstraintSpec::Kind::TotalSpeed, 3.5, 90.0, 0.1, 0.0};
    st.obstacle_velocities = {{3.0, 0.0}, {0.5, 0.0}};
    CHECK(constraint_value(st, speed) == doctest::Approx(0.0));
}

TEST_CASE("the indicator is one exactly on satisfied constraints") {
    CHECK(constraint_indicator(-0.2) == 1.0);
    CHECK(constraint_indicator(0.0) == 1.0);
    CHECK(constraint_indicator(0.3) == 0.0);
}

TEST_CASE("indicator composed with the value is monotone in the violation") {
    ConstraintSpec dev{ConstraintSpec::Kind::DeviationDistance, 5.0, 90.0, 0.1, 0.0};
    auto s = make_continuous_scenario(10, 10, {{1, 1}}, {{9, 9}},
                                      {Rect::from_center({5, 5}, 1, 1)});
    auto st = initial_state(s);
    double prev = 1.0;
    for (double shift = 0.0; shift < 8.0; shift += 0.5) {
        st.obstacle_positions[0] = Vec2{5.0 + shift, 5.0};
        double ind = constraint_indicator(constraint_value(st, dev));
        CHECK(ind <= prev);
        prev = ind;
    }
}
