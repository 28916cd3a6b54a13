#include <benchmark/benchmark.h>

#include "envopt/env.hpp"
#include "envopt/policy.hpp"
#include "envopt/random.hpp"

using namespace envopt;

static void GridPolicyForward(benchmark::State& state) {
    GridPolicy policy;
    Rng rng(3);
    auto theta = policy.init(rng);
    GridObservation obs(4, 8, 8);
    for (auto& v : obs.data) v = rng.uniform() < 0.2 ? 1.0 : 0.0;
    for (auto _ : state) {
        auto d = policy.forward(obs, theta);
        benchmark::DoNotOptimize(d);
    }
}
BENCHMARK(GridPolicyForward);

static void GridPolicyGradient(benchmark::State& state) {
    GridPolicy policy;
    Rng rng(3);
    auto theta = policy.init(rng);
    GridObservation obs(4, 8, 8);
    for (auto& v : obs.data) v = rng.uniform() < 0.2 ? 1.0 : 0.0;
    std::vector<double> grad(policy.param_count());
    for (auto _ : state) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double lp = policy.log_prob_grad(obs, 2, theta, grad);
        benchmark::DoNotOptimize(lp);
    }
}
BENCHMARK(GridPolicyGradient);

static void GraphPolicyGradient(benchmark::State& state) {
    int nodes = int(state.range(0));
    GnnPolicy policy;
    Rng rng(5);
    auto theta = policy.init(rng);

    GraphObservation obs;
    obs.node_dim = 7;
    obs.edge_dim = 3;
    for (int i = 0; i < nodes; ++i) {
        std::vector<double> f(7);
        for (auto& v : f) v = rng.uniform(-1, 1);
        obs.nodes.push_back(f);
    }
    obs.neighbors.assign(size_t(nodes), {});
    obs.edges.assign(size_t(nodes), {});
    for (int i = 0; i < nodes; ++i)
        for (int j = 0; j < nodes; ++j) {
            if (i == j || rng.uniform() > 0.4) continue;
            obs.neighbors[size_t(i)].push_back(j);
            obs.edges[size_t(i)].push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform()});
        }
    for (int i = 0; i < nodes / 2; ++i) obs.obstacle_nodes.push_back(i);

    auto dist = policy.forward(obs, theta);
    auto action = sample_action(dist, rng);
    std::vector<double> grad(policy.param_count());
    for (auto _ : state) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double lp = policy.log_prob_grad(obs, action, theta, grad);
        benchmark::DoNotOptimize(lp);
    }
}
BENCHMARK(GraphPolicyGradient)->Arg(8)->Arg(14)->Arg(20);
