#include <benchmark/benchmark.h>

#include "envopt/grid_path.hpp"
#include "envopt/random.hpp"
#include "envopt/scenario.hpp"

using namespace envopt;

namespace {

Scenario grid_scene(int side, int obstacles) {
    Scenario s;
    s.mode = Mode::OfflineDiscrete;
    s.width = side;
    s.height = side;
    Rng rng(13);
    for (int j = 0; j < obstacles; ++j) {
        ObstacleSpec ob;
        ob.id = j + 1;
        ob.position = s.cell_center({1 + rng.uniform_int(side - 2), 1 + rng.uniform_int(side - 2)});
        s.obstacles.push_back(ob);
    }
    return s;
}

} // namespace

static void ShortestPathGrid(benchmark::State& state) {
    int side = int(state.range(0));
    auto s = grid_scene(side, side * side / 6);
    Vec2 from = s.cell_center({0, 0});
    Vec2 to = s.cell_center({side - 1, side - 1});
    for (auto _ : state) {
        auto p = shortest_path(s, from, to);
        benchmark::DoNotOptimize(p);
    }
}
BENCHMARK(ShortestPathGrid)->Arg(8)->Arg(16)->Arg(32);

static void OccupancyRaster(benchmark::State& state) {
    auto s = grid_scene(int(state.range(0)), 12);
    for (auto _ : state) {
        auto grid = occupancy_grid(s);
        benchmark::DoNotOptimize(grid);
    }
}
BENCHMARK(OccupancyRaster)->Arg(8)->Arg(32);

BENCHMARK_MAIN();
