#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "envopt/checkpoint.hpp"
#include "envopt/env.hpp"
#include "envopt/errors.hpp"
#include "envopt/policy.hpp"
#include "envopt/random.hpp"
#include "support/helpers.hpp"

using namespace envopt;
using namespace envopt::testing;

namespace {

// Central finite differences against an analytic gradient on sampled
// coordinates.
void check_gradient(std::function<double(std::span<const double>)> f,
                    std::span<const double> params, std::span<const double> analytic, Rng& rng,
                    int coords, double h = 1e-5, double tol = 1e-4) {
    for (int k = 0; k < coords; ++k) {
        size_t i = size_t(rng.uniform_int(int(params.size())));
        std::vector<double> p(params.begin(), params.end());
        p[i] += h;
        double up = f(p);
        p[i] -= 2 * h;
        double dn = f(p);
        double fd = (up - dn) / (2 * h);
        double denom = std::max(std::abs(fd), std::abs(analytic[i]));
        if (denom < 1e-7) {
            CHECK(std::abs(fd - analytic[i]) < 1e-7);
        } else {
            CHECK(std::abs(fd - analytic[i]) / denom <= tol);
        }
    }
}

GridObservation random_grid_obs(Rng& rng, const GridPolicyConfig& cfg) {
    GridObservation obs(cfg.in_channels, cfg.grid_height, cfg.grid_width);
    for (auto& v : obs.data) v = rng.uniform() < 0.2 ? 1.0 : 0.0;
    return obs;
}

GraphObservation random_graph_obs(Rng& rng, int nodes, int obstacles) {
    auto s = make_continuous_scenario(8, 8, {}, {}, {});
    SystemState st;
    for (int j = 0; j < obstacles; ++j) {
        ObstacleSpec ob;
        ob.id = j + 1;
        ob.shape = RectShape{0.5, 0.5};
        ob.position = {rng.uniform(1, 7), rng.uniform(1, 7)};
        s.obstacles.push_back(ob);
        st.obstacle_positions.push_back(ob.position);
        st.obstacle_velocities.push_back({rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05)});
    }
    st.initial_obstacle_positions = st.obstacle_positions;
    for (int i = obstacles; i < nodes; ++i) {
        AgentSpec a;
        a.id = i + 1;
        a.radius = 0.25;
        a.start = {rng.uniform(1, 7), rng.uniform(1, 7)};
        a.goal = {rng.uniform(1, 7), rng.uniform(1, 7)};
        s.agents.push_back(a);
        st.agent_positions.push_back(a.start);
        st.agent_velocities.push_back({rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05)});
        st.agent_arrived.push_back(0);
    }
    return build_graph_observation(st, s, 2.0);
}

} // namespace

TEST_CASE("zero parameters give the uniform move distribution") {
    GridPolicy policy;
    std::vector<double> theta(policy.param_count(), 0.0);
    Rng rng(1);
    auto obs = random_grid_obs(rng, policy.config());
    auto dist = policy.forward(obs, theta);
    for (double p : dist.probs) CHECK(p == doctest::Approx(0.2));
}

TEST_CASE("move probabilities always sum to one") {
    GridPolicy policy;
    Rng rng(2);
    auto theta = policy.init(rng);
    for (int rep = 0; rep < 20; ++rep) {
        auto obs = random_grid_obs(rng, policy.config());
        auto dist = policy.forward(obs, theta);
        double sum = 0.0;
        for (double p : dist.probs) {
            CHECK(p >= 0.0);
            sum += p;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
}

TEST_CASE("convolution features translate with the scene away from borders") {
    // Direct forward comparison: shifting the input by one cell shifts the
    // feature map in the overlapping interior, with changes confined to the
    // borders.
    nn::ParamLayout layout;
    auto conv = nn::make_conv(layout, "c", 1, 3, 2, 8, 8);
    Rng rng(3);
    auto params = nn::init_params(layout, rng);

    std::vector<double> base(64, 0.0);
    for (auto& v : base) v = rng.uniform() < 0.3 ? 1.0 : 0.0;
    std::vector<double> shifted(64, 0.0);
    for (int y = 0; y < 8; ++y)
        for (int x = 1; x < 8; ++x) shifted[y * 8 + x] = base[y * 8 + (x - 1)];

    std::vector<double> out_a(3 * 7 * 7), out_b(3 * 7 * 7);
    nn::conv_forward(params, conv, base, out_a);
    nn::conv_forward(params, conv, shifted, out_b);
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < 7; ++y)
            for (int x = 1; x < 7; ++x)
                CHECK(out_b[(c * 7 + y) * 7 + x] ==
                      doctest::Approx(out_a[(c * 7 + y) * 7 + (x - 1)]));
}

TEST_CASE("an isolated node sees only its own features") {
    GnnPolicy policy;
    Rng rng(5);
    auto theta = policy.init(rng);

    GraphObservation lone;
    lone.node_dim = 7;
    lone.edge_dim = 3;
    lone.nodes = {{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.0}};
    lone.neighbors = {{}};
    lone.edges = {{}};
    lone.obstacle_nodes = {0};

    GraphObservation crowd = lone;
    crowd.nodes.push_back({0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 1.0});
    crowd.neighbors = {{}, {}};  // the second node is out of range
    crowd.edges = {{}, {}};

    auto a = policy.forward(lone, theta);
    auto b = policy.forward(crowd, theta);
    CHECK(a.mean[0].x == b.mean[0].x);
    CHECK(a.mean[0].y == b.mean[0].y);
}

TEST_CASE("messages aggregate by summation") {
    // With the message net emitting a constant c, two identical neighbors
    // must match one neighbor under a doubled constant exactly.
    GnnPolicyConfig cfg;
    GnnPolicy policy(cfg);
    Rng rng(7);
    auto theta = policy.init(rng);

    size_t bias_off = 0, bias_len = 0;
    for (const auto& s : policy.layout().slices) {
        if (s.name == "msg.l1.w" || s.name == "msg.l1.b" || s.name == "msg.l2.w") {
            for (size_t i = 0; i < s.size; ++i) theta[s.offset + i] = 0.0;
        }
        if (s.name == "msg.l2.b") {
            bias_off = s.offset;
            bias_len = s.size;
        }
    }
    REQUIRE(bias_len > 0);
    for (size_t i = 0; i < bias_len; ++i) theta[bias_off + i] = 0.01 * double(i + 1);

    std::vector<double> self = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.0};
    std::vector<double> nbr = {0.5, 0.5, 0.1, 0.1, 0.2, 0.2, 1.0};
    std::vector<double> edge = {0.3, 0.4, 0.5};

    GraphObservation two;
    two.node_dim = 7;
    two.edge_dim = 3;
    two.nodes = {self, nbr, nbr};
    two.neighbors = {{1, 2}, {}, {}};
    two.edges = {{edge, edge}, {}, {}};
    two.obstacle_nodes = {0};

    GraphObservation one = two;
    one.nodes = {self, nbr};
    one.neighbors = {{1}, {}};
    one.edges = {{edge}, {}};

    auto theta_doubled = theta;
    for (size_t i = 0; i < bias_len; ++i) theta_doubled[bias_off + i] *= 2.0;

    auto a = policy.forward(two, theta);
    auto b = policy.forward(one, theta_doubled);
    CHECK(a.mean[0].x == b.mean[0].x);
    CHECK(a.mean[0].y == b.mean[0].y);
}

TEST_CASE("permuting node labels permutes the outputs bit-exactly") {
    GnnPolicy policy;
    Rng rng(9);
    auto theta = policy.init(rng);
    for (int rep = 0; rep < 10; ++rep) {
        auto obs = random_graph_obs(rng, 7, 4);
        std::vector<int> perm(obs.num_nodes());
        for (int i = 0; i < obs.num_nodes(); ++i) perm[i] = i;
        for (int i = obs.num_nodes() - 1; i > 0; --i)
            std::swap(perm[i], perm[rng.uniform_int(i + 1)]);

        GraphObservation po;
        po.node_dim = obs.node_dim;
        po.edge_dim = obs.edge_dim;
        po.nodes.resize(obs.nodes.size());
        po.neighbors.resize(obs.neighbors.size());
        po.edges.resize(obs.edges.size());
        for (int i = 0; i < obs.num_nodes(); ++i) {
            po.nodes[perm[i]] = obs.nodes[i];
            std::vector<int> nbrs;
            for (int j : obs.neighbors[i]) nbrs.push_back(perm[j]);
            po.neighbors[perm[i]] = nbrs;
            po.edges[perm[i]] = obs.edges[i];
        }
        for (int o : obs.obstacle_nodes) po.obstacle_nodes.push_back(perm[o]);

        auto a = policy.forward(obs, theta);
        auto b = policy.forward(po, theta);
        REQUIRE(a.mean.size() == b.mean.size());
        for (size_t k = 0; k < a.mean.size(); ++k) {
            CHECK(a.mean[k].x == b.mean[k].x);
            CHECK(a.mean[k].y == b.mean[k].y);
        }
    }
}

TEST_CASE("outputs depend only on the communication neighborhood") {
    GnnPolicy policy;
    Rng rng(11);
    auto theta = policy.init(rng);
    auto obs = random_graph_obs(rng, 8, 4);

    // Find an obstacle node and some node outside its neighborhood.
    int target = obs.obstacle_nodes[0];
    int outsider = -1;
    for (int i = 0; i < obs.num_nodes(); ++i) {
        if (i == target) continue;
        bool adjacent = false;
        for (int j : obs.neighbors[target])
            if (j == i) adjacent = true;
        if (!adjacent) {
            outsider = i;
            break;
        }
    }
    if (outsider < 0) return;  // fully connected draw; nothing to test

    auto before = policy.forward(obs, theta);
    obs.nodes[outsider][0] += 0.123;
    obs.nodes[outsider][4] -= 0.321;
    auto after = policy.forward(obs, theta);
    CHECK(before.mean[0].x == after.mean[0].x);
    CHECK(before.mean[0].y == after.mean[0].y);
}

TEST_CASE("value heads are zero at zero parameters and deterministic") {
    GridValue gv;
    Rng rng(13);
    std::vector<double> omega(gv.param_count(), 0.0);
    auto obs = random_grid_obs(rng, GridPolicyConfig{});
    CHECK(gv.value(obs, omega) == 0.0);

    auto omega2 = gv.init(rng);
    CHECK(gv.value(obs, omega2) == gv.value(obs, omega2));

    GnnValue nv;
    std::vector<double> omega3(nv.param_count(), 0.0);
    auto gobs = random_graph_obs(rng, 6, 3);
    CHECK(nv.value(gobs, omega3) == 0.0);
}

TEST_CASE("value output stays finite for large features") {
    GnnValue nv;
    Rng rng(15);
    auto omega = nv.init(rng);
    auto obs = random_graph_obs(rng, 6, 3);
    for (auto& node : obs.nodes)
        for (auto& v : node) v *= 1e3;
    CHECK(std::isfinite(nv.value(obs, omega)));
}

TEST_CASE("log probability of the uniform categorical is log one fifth") {
    GridPolicy policy;
    std::vector<double> theta(policy.param_count(), 0.0);
    std::vector<double> grad(policy.param_count(), 0.0);
    Rng rng(17);
    auto obs = random_grid_obs(rng, policy.config());
    double lp = policy.log_prob_grad(obs, 2, theta, grad);
    CHECK(lp == doctest::Approx(std::log(0.2)));
}

TEST_CASE("grid policy gradients match finite differences") {
    GridPolicy policy;
    Rng rng(19);
    auto theta = policy.init(rng);
    for (int rep = 0; rep < 3; ++rep) {
        auto obs = random_grid_obs(rng, policy.config());
        int action = rng.uniform_int(5);
        std::vector<double> grad(policy.param_count(), 0.0);
        policy.log_prob_grad(obs, action, theta, grad);
        check_gradient(
            [&](std::span<const double> p) {
                return std::log(policy.forward(obs, p).probs[action]);
            },
            theta, grad, rng, 10);
    }
}

TEST_CASE("graph policy gradients match finite differences") {
    GnnPolicy policy;
    Rng rng(21);
    auto theta = policy.init(rng);
    for (int rep = 0; rep < 3; ++rep) {
        auto obs = random_graph_obs(rng, 6, 3);
        auto dist = policy.forward(obs, theta);
        auto action = sample_action(dist, rng);
        std::vector<double> grad(policy.param_count(), 0.0);
        policy.log_prob_grad(obs, action, theta, grad);
        check_gradient(
            [&](std::span<const double> p) {
                auto d = policy.forward(obs, p);
                double var = d.stddev * d.stddev;
                double lp = 0.0;
                for (size_t k = 0; k < action.size(); ++k) {
                    double dx = action[k].x - d.mean[k].x;
                    double dy = action[k].y - d.mean[k].y;
                    lp += -0.5 * (dx * dx + dy * dy) / var -
                          2.0 * (std::log(d.stddev) + 0.5 * std::log(2.0 * M_PI));
                }
                return lp;
            },
            theta, grad, rng, 10);
    }
}

TEST_CASE("value gradients match finite differences") {
    GridValue gv;
    Rng rng(23);
    auto omega = gv.init(rng);
    auto obs = random_grid_obs(rng, GridPolicyConfig{});
    std::vector<double> grad(gv.param_count(), 0.0);
    gv.value_grad(obs, omega, grad);
    check_gradient([&](std::span<const double> p) { return gv.value(obs, p); }, omega, grad, rng,
                   10);

    GnnValue nv;
    auto omega2 = nv.init(rng);
    auto gobs = random_graph_obs(rng, 6, 3);
    std::vector<double> grad2(nv.param_count(), 0.0);
    nv.value_grad(gobs, omega2, grad2);
    check_gradient([&](std::span<const double> p) { return nv.value(gobs, p); }, omega2, grad2,
                   rng, 10);
}

TEST_CASE("tabular gradients match finite differences") {
    TabularPolicy policy({3, 4});
    Rng rng(25);
    std::vector<double> theta(policy.param_count());
    for (auto& v : theta) v = rng.uniform(-1.0, 1.0);
    std::vector<double> grad(policy.param_count(), 0.0);
    policy.log_prob_grad(1, 2, theta, grad);
    check_gradient(
        [&](std::span<const double> p) { return std::log(policy.forward(1, p).probs[2]); }, theta,
        grad, rng, 10);
}

TEST_CASE("a degenerate categorical always samples its support") {
    CategoricalDistribution d{{1.0, 0.0, 0.0, 0.0, 0.0}};
    Rng rng(27);
    for (int k = 0; k < 50; ++k) CHECK(sample_action(d, rng) == 0);
}

TEST_CASE("sampling is reproducible for a fixed seed") {
    GaussianDistribution d;
    d.mean = {{0.01, -0.02}, {0.0, 0.03}};
    d.stddev = 0.02;
    d.speed_cap = 0.05;
    Rng a(99), b(99);
    for (int k = 0; k < 20; ++k) {
        auto va = sample_action(d, a);
        auto vb = sample_action(d, b);
        for (size_t i = 0; i < va.size(); ++i) {
            CHECK(va[i].x == vb[i].x);
            CHECK(va[i].y == vb[i].y);
        }
    }
}

TEST_CASE("a vanishing standard deviation collapses to the mean") {
    GaussianDistribution d;
    d.mean = {{0.02, -0.01}};
    d.stddev = 1e-300;
    d.speed_cap = 0.05;
    Rng rng(31);
    auto v = sample_action(d, rng);
    CHECK(v[0].x == doctest::Approx(0.02));
    CHECK(v[0].y == doctest::Approx(-0.01));
    CHECK(greedy_action(d)[0].x == doctest::Approx(0.02));
}

TEST_CASE("samples never exceed the speed cap") {
    GaussianDistribution d;
    d.mean = {{0.05, 0.05}};
    d.stddev = 0.05;
    d.speed_cap = 0.05;
    Rng rng(33);
    for (int k = 0; k < 100; ++k) {
        auto v = sample_action(d, rng);
        CHECK(v[0].norm() <= 0.05 + 1e-12);
    }
}

TEST_CASE("checkpoints round-trip bit-exactly") {
    GnnPolicy policy;
    Rng rng(35);
    Checkpoint ck;
    ck.policy_kind = "gnn";
    ck.arch = arch_to_json(policy.config());
    ck.theta = policy.init(rng);
    ck.theta[0] = 0.1 + 0.2;  // a value with a non-terminating binary tail
    ck.omega = GnnValue(policy.config()).init(rng);
    ck.lambda = {0.25, 1.0 / 3.0};
    ck.seed = 1234;
    ck.iteration = 77;

    std::string path = "/tmp/envopt_test_checkpoint.json";
    save_checkpoint(ck, path);
    auto back = load_checkpoint(path);
    CHECK(back.policy_kind == ck.policy_kind);
    CHECK(back.seed == ck.seed);
    CHECK(back.iteration == ck.iteration);
    REQUIRE(back.theta.size() == ck.theta.size());
    for (size_t i = 0; i < ck.theta.size(); ++i) CHECK(back.theta[i] == ck.theta[i]);
    for (size_t i = 0; i < ck.omega.size(); ++i) CHECK(back.omega[i] == ck.omega[i]);
    for (size_t i = 0; i < ck.lambda.size(); ++i) CHECK(back.lambda[i] == ck.lambda[i]);

    auto cfg = gnn_config_from_json(back.arch);
    CHECK(cfg.msg_hidden == policy.config().msg_hidden);
}

TEST_CASE("sampled actions outside the support are rejected") {
    TabularPolicy policy({1, 2});
    std::vector<double> theta(policy.param_count(), 0.0);
    std::vector<double> grad(policy.param_count(), 0.0);
    CHECK_THROWS_AS(policy.log_prob_grad(0, 5, theta, grad), ConfigError);
}
