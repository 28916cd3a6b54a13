#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>

#include "envopt/episode.hpp"
#include "envopt/errors.hpp"
#include "envopt/grid_path.hpp"
#include "envopt/random.hpp"
#include "envopt/rvo.hpp"
#include "support/helpers.hpp"

using namespace envopt;
using namespace envopt::testing;

namespace {

// One depth-first path on the same grid graph (fixed neighbor order); any
// such path upper-bounds the shortest length.
std::optional<int> dfs_path_steps(const std::vector<uint8_t>& blocked, int w, int h, GridCell from,
                                  GridCell to) {
    auto idx = [&](GridCell c) { return size_t(c.x) + size_t(c.y) * w; };
    if (blocked[idx(from)] || blocked[idx(to)]) return std::nullopt;
    std::vector<uint8_t> visited(size_t(w) * h, 0);
    std::function<std::optional<int>(GridCell)> go = [&](GridCell c) -> std::optional<int> {
        if (c == to) return 0;
        visited[idx(c)] = 1;
        const int dx[4] = {1, 0, -1, 0};
        const int dy[4] = {0, 1, 0, -1};
        for (int k = 0; k < 4; ++k) {
            GridCell nb{c.x + dx[k], c.y + dy[k]};
            if (nb.x < 0 || nb.x >= w || nb.y < 0 || nb.y >= h) continue;
            if (blocked[idx(nb)] || visited[idx(nb)]) continue;
            if (auto rest = go(nb)) return *rest + 1;
        }
        return std::nullopt;
    };
    return go(from);
}

} // namespace

TEST_CASE("shortest path crosses an empty 3x3 grid in 4 steps") {
    auto s = make_grid_scenario(3, 3, {}, {}, {});
    auto p = shortest_path(s, s.cell_center({0, 0}), s.cell_center({2, 2}));
    REQUIRE(p);
    CHECK(p->length == doctest::Approx(4.0));
    CHECK(p->waypoints.size() == 5);
}

TEST_CASE("shortest path from a point to itself is a single waypoint") {
    auto s = make_grid_scenario(3, 3, {}, {}, {});
    auto p = shortest_path(s, {1.5, 1.5}, {1.5, 1.5});
    REQUIRE(p);
    CHECK(p->length == 0.0);
    CHECK(p->waypoints.size() == 1);
}

TEST_CASE("a fully blocked middle column is unreachable") {
    auto s = make_grid_scenario(3, 3, {}, {}, {{1, 0}, {1, 1}, {1, 2}});
    auto p = shortest_path(s, s.cell_center({0, 1}), s.cell_center({2, 1}));
    CHECK_FALSE(p);
}

TEST_CASE("shortest path never exceeds a depth-first path on small grids") {
    Rng rng(17);
    int compared = 0;
    for (int rep = 0; rep < 200; ++rep) {
        int w = 3 + rng.uniform_int(4);  // up to 6x6
        int h = 3 + rng.uniform_int(4);
        std::vector<uint8_t> blocked(size_t(w) * h, 0);
        for (auto& b : blocked) b = rng.uniform() < 0.3 ? 1 : 0;
        GridCell from{rng.uniform_int(w), rng.uniform_int(h)};
        GridCell to{rng.uniform_int(w), rng.uniform_int(h)};
        blocked[size_t(from.x) + size_t(from.y) * w] = 0;
        blocked[size_t(to.x) + size_t(to.y) * w] = 0;

        auto bfs = grid_shortest_cells(blocked, w, h, from, to);
        auto dfs = dfs_path_steps(blocked, w, h, from, to);
        CHECK(bool(bfs) == bool(dfs));  // connectivity agrees
        if (bfs && dfs) {
            CHECK(int(bfs->size()) - 1 <= *dfs);
            ++compared;
        }
    }
    CHECK(compared > 50);
}

TEST_CASE("shortest path length is invariant under translation and rotation") {
    std::vector<GridCell> obstacles = {{2, 1}, {2, 2}, {2, 3}, {4, 4}};
    auto s = make_grid_scenario(8, 8, {}, {}, {});
    for (const auto& c : obstacles) {
        ObstacleSpec ob;
        ob.id = int(s.obstacles.size()) + 1;
        ob.position = s.cell_center(c);
        s.obstacles.push_back(ob);
    }
    auto base = shortest_path(s, s.cell_center({0, 2}), s.cell_center({6, 2}));
    REQUIRE(base);

    auto st = make_grid_scenario(9, 9, {}, {}, {});
    for (const auto& c : obstacles) {
        ObstacleSpec ob;
        ob.id = int(st.obstacles.size()) + 1;
        ob.position = st.cell_center({c.x + 1, c.y + 1});
        st.obstacles.push_back(ob);
    }
    auto moved = shortest_path(st, st.cell_center({1, 3}), st.cell_center({7, 3}));
    REQUIRE(moved);
    CHECK(moved->length == doctest::Approx(base->length));

    // Quarter turn: (x, y) -> (y, W-1-x).
    auto sr = make_grid_scenario(8, 8, {}, {}, {});
    auto rot = [&](GridCell c) { return GridCell{c.y, 7 - c.x}; };
    for (const auto& c : obstacles) {
        ObstacleSpec ob;
        ob.id = int(sr.obstacles.size()) + 1;
        ob.position = sr.cell_center(rot(c));
        sr.obstacles.push_back(ob);
    }
    auto rotated = shortest_path(sr, sr.cell_center(rot({0, 2})), sr.cell_center(rot({6, 2})));
    REQUIRE(rotated);
    CHECK(rotated->length == doctest::Approx(base->length));
}

TEST_CASE("an unobstructed agent commands its preferred velocity") {
    AgentState self{{1.0, 1.0}, {}, 0.25, {5.0, 1.0}, false};
    PlannerConfig cfg;
    Vec2 cmd = rvo_step(self, {}, {}, {{0, 0}, {8, 8}}, 0.05, 1.0, cfg);
    CHECK(cmd.x == doctest::Approx(0.05));
    CHECK(cmd.y == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("an agent at its goal commands zero velocity") {
    AgentState self{{2.0, 2.0}, {0.01, 0.0}, 0.25, {2.0, 2.0}, false};
    PlannerConfig cfg;
    Vec2 cmd = rvo_step(self, {}, {}, {{0, 0}, {8, 8}}, 0.05, 1.0, cfg);
    CHECK(cmd.norm() == 0.0);
}

TEST_CASE("planner command speed never exceeds the bound") {
    Rng rng(5);
    PlannerConfig cfg;
    for (int rep = 0; rep < 200; ++rep) {
        AgentState self{{rng.uniform(1, 7), rng.uniform(1, 7)},
                        {rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05)},
                        0.25,
                        {rng.uniform(1, 7), rng.uniform(1, 7)},
                        false};
        std::vector<AgentState> nbrs;
        for (int k = 0; k < 3; ++k)
            nbrs.push_back({{rng.uniform(1, 7), rng.uniform(1, 7)},
                            {rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05)},
                            0.25,
                            {0, 0},
                            false});
        std::vector<ObstacleState> obs = {
            {Rect::from_center({rng.uniform(1, 7), rng.uniform(1, 7)}, 1.0, 1.0), {}}};
        Vec2 cmd = rvo_step(self, nbrs, obs, {{0, 0}, {8, 8}}, 0.05, 1.0, cfg);
        CHECK(cmd.norm() <= 0.05 + 1e-12);
    }
}

TEST_CASE("head-on agents pass each other without penetrating") {
    // Two identical agents approach along the x axis; full rollout oracle
    // checks the pairwise separation every step.
    auto s = make_continuous_scenario(8, 4, {{1.0, 2.0}, {7.0, 2.0}}, {{7.0, 2.0}, {1.0, 2.0}},
                                      {}, 0.3);
    auto trace = simulate_navigation(s);
    REQUIRE(trace.all_succeeded());
    double min_sep = 1e9;
    for (const auto& st : trace.steps)
        min_sep = std::min(min_sep, distance(st.agent_positions[0], st.agent_positions[1]));
    CHECK(min_sep >= 0.6 - 1e-9);
}

TEST_CASE("unobstructed navigation travels close to the straight line") {
    auto s = make_continuous_scenario(8, 4, {{1.0, 2.0}}, {{6.0, 2.0}}, {}, 0.25);
    auto trace = simulate_navigation(s);
    REQUIRE(trace.all_succeeded());
    double traveled = traveled_length(trace, s, 0);
    double straight = 5.0;
    CHECK(traveled <= straight * 1.05);
    // Arrival tolerance is one radius, so the traveled length may fall just
    // short of the full straight distance.
    CHECK(traveled >= straight - s.agents[0].radius - 1e-9);
}

TEST_CASE("an agent starting at its goal succeeds at step zero") {
    auto s = make_continuous_scenario(8, 4, {{2.0, 2.0}}, {{2.0, 2.0}}, {}, 0.25);
    auto trace = simulate_navigation(s);
    CHECK(trace.all_succeeded());
    CHECK(trace.navigation_time[0] == 0);
    CHECK(trace.steps.empty());
}

TEST_CASE("a walled-off goal times out as an outcome") {
    std::vector<Rect> walls = {Rect::from_center({6.0, 1.0}, 0.5, 2.0),
                               Rect::from_center({7.5, 1.0}, 0.5, 2.0),
                               Rect::from_center({6.75, 0.25}, 2.0, 0.5),
                               Rect::from_center({6.75, 1.75}, 2.0, 0.5)};
    auto s = make_continuous_scenario(8, 4, {{1.0, 1.0}}, {{6.75, 1.0}}, walls, 0.2);
    s.max_steps = 120;
    auto trace = simulate_navigation(s);
    CHECK_FALSE(trace.all_succeeded());
    CHECK(trace.timed_out);
    CHECK(int(trace.steps.size()) == 120);
}

TEST_CASE("success implies the final position is inside the goal tolerance") {
    Rng rng(29);
    for (int rep = 0; rep < 5; ++rep) {
        auto s = make_continuous_scenario(
            8, 8, {{rng.uniform(1, 3), rng.uniform(1, 7)}, {rng.uniform(1, 3), rng.uniform(1, 3)}},
            {{rng.uniform(5, 7), rng.uniform(1, 7)}, {rng.uniform(5, 7), rng.uniform(5, 7)}},
            {Rect::from_center({4.0, rng.uniform(2, 6)}, 0.8, 1.6)}, 0.2);
        s.max_steps = 400;
        try {
            validate_scenario(s);
        } catch (const InvalidScenario&) {
            continue;  // separation rejection; draw again
        }
        auto trace = simulate_navigation(s);
        if (trace.steps.empty()) continue;
        const auto& last = trace.steps.back();
        for (size_t i = 0; i < s.agents.size(); ++i) {
            if (trace.success[i]) {
                CHECK(distance(last.agent_positions[i], s.agents[i].goal) <=
                      s.agents[i].radius + 1e-9);
            }
        }
    }
}

TEST_CASE("trace collision events match a geometric recomputation") {
    auto s = make_continuous_scenario(
        8, 8, {{1.0, 1.0}, {1.0, 4.0}, {1.0, 7.0}}, {{7.0, 7.0}, {7.0, 4.0}, {7.0, 1.0}},
        {Rect::from_center({4.0, 4.0}, 1.0, 1.0)}, 0.25);
    s.max_steps = 300;
    auto trace = simulate_navigation(s);
    CHECK(!trace.steps.empty());
    for (const auto& st : trace.steps) {
        auto recomputed = detect_collisions(s, st.agent_positions, st.obstacle_positions);
        CHECK(recomputed == st.collisions);
    }
}
