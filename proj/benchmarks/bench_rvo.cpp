#include <benchmark/benchmark.h>

#include "envopt/episode.hpp"
#include "envopt/random.hpp"
#include "envopt/rvo.hpp"

using namespace envopt;

static void VelocityCandidateScoring(benchmark::State& state) {
    int n_obstacles = int(state.range(0));
    Rng rng(7);
    AgentState self{{4.0, 4.0}, {0.05, 0.0}, 0.25, {7.5, 4.0}, false};
    std::vector<AgentState> neighbors;
    for (int k = 0; k < 3; ++k)
        neighbors.push_back({{rng.uniform(2, 6), rng.uniform(2, 6)},
                             {rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05)},
                             0.25,
                             {7.5, 4.0},
                             false});
    std::vector<ObstacleState> obstacles;
    for (int k = 0; k < n_obstacles; ++k)
        obstacles.push_back(
            {Rect::from_center({rng.uniform(1, 7), rng.uniform(1, 7)}, 0.9, 0.9), {}});
    PlannerConfig cfg;
    for (auto _ : state) {
        Vec2 cmd = rvo_step(self, neighbors, obstacles, {{0, 0}, {8, 8}}, 0.05, 1.0, cfg);
        benchmark::DoNotOptimize(cmd);
    }
}
BENCHMARK(VelocityCandidateScoring)->Arg(4)->Arg(10)->Arg(18);

static void FullEpisode(benchmark::State& state) {
    Scenario s;
    s.mode = Mode::OnlineContinuous;
    s.width = 8;
    s.height = 8;
    s.max_steps = 300;
    for (int i = 0; i < 4; ++i) {
        AgentSpec a;
        a.id = i + 1;
        a.radius = 0.25;
        a.start = {0.7, 1.0 + 2.0 * i};
        a.goal = {7.3, 1.0 + 2.0 * i};
        s.agents.push_back(a);
        s.start_region.disks.push_back({a.start, a.radius});
        s.goal_region.disks.push_back({a.goal, a.radius});
    }
    for (int j = 0; j < 4; ++j) {
        ObstacleSpec ob;
        ob.id = j + 1;
        ob.shape = RectShape{0.9, 0.9};
        ob.position = {3.0 + (j % 2) * 1.6, 1.0 + 2.0 * j};
        s.obstacles.push_back(ob);
    }
    for (auto _ : state) {
        auto trace = simulate_navigation(s);
        benchmark::DoNotOptimize(trace);
    }
}
BENCHMARK(FullEpisode)->Unit(benchmark::kMillisecond);
