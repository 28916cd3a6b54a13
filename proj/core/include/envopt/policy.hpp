#pragma once

#include <span>
#include <vector>

#include "envopt/geometry.hpp"
#include "envopt/nn.hpp"
#include "envopt/random.hpp"

namespace envopt {

struct CategoricalDistribution {
    std::vector<double> probs;
};

struct GaussianDistribution {
    std::vector<Vec2> mean;  // per controlled obstacle
    double stddev = 0.02;
    double speed_cap = 0.05;  // samples are clamped to this magnitude
};

int sample_action(const CategoricalDistribution& d, Rng& rng);
std::vector<Vec2> sample_action(const GaussianDistribution& d, Rng& rng);
int greedy_action(const CategoricalDistribution& d);
std::vector<Vec2> greedy_action(const GaussianDistribution& d);

// ---------------------------------------------------------------- grid CNN

// Channel-major image stack fed to the grid policy: obstacle occupancy,
// agent one-hots, goal map, indicator of the obstacle under consideration.
struct GridObservation {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> data;

    GridObservation() = default;
    GridObservation(int c, int h, int w)
        : channels(c), height(h), width(w), data(size_t(c) * h * w, 0.0) {}
    double& at(int c, int y, int x) { return data[(size_t(c) * height + y) * width + x]; }
    double at(int c, int y, int x) const { return data[(size_t(c) * height + y) * width + x]; }
};

struct GridPolicyConfig {
    int grid_height = 8;
    int grid_width = 8;
    int in_channels = 4;
    int conv_layers = 4;
    int conv_channels = 25;
    int kernel = 2;
    int num_actions = 5;
};

// Convolution stack, tanh activations, global mean pool, affine head,
// softmax over the moves. All-zero parameters give the uniform distribution.
class GridPolicy {
public:
    using Observation = GridObservation;
    using Action = int;
    using Distribution = CategoricalDistribution;

    explicit GridPolicy(const GridPolicyConfig& cfg = {});

    const GridPolicyConfig& config() const { return cfg_; }
    const nn::ParamLayout& layout() const { return layout_; }
    size_t param_count() const { return layout_.total; }
    std::vector<double> init(Rng& rng) const { return nn::init_params(layout_, rng); }

    Distribution forward(const Observation& obs, std::span<const double> params) const;
    // Returns log pi(action | obs) and accumulates its parameter gradient.
    double log_prob_grad(const Observation& obs, Action action, std::span<const double> params,
                         std::span<double> grad) const;

private:
    GridPolicyConfig cfg_;
    nn::ParamLayout layout_;
    std::vector<nn::ConvSpec> convs_;
    nn::AffineSpec head_;

    friend class GridValue;
    std::vector<std::vector<double>> encode(const Observation& obs,
                                            std::span<const double> params,
                                            std::vector<double>& pooled) const;
};

// Same encoder shape with its own parameters and a scalar head.
class GridValue {
public:
    using Observation = GridObservation;

    explicit GridValue(const GridPolicyConfig& cfg = {});

    const nn::ParamLayout& layout() const { return layout_; }
    size_t param_count() const { return layout_.total; }
    std::vector<double> init(Rng& rng) const { return nn::init_params(layout_, rng); }

    double value(const Observation& obs, std::span<const double> params) const;
    double value_grad(const Observation& obs, std::span<const double> params,
                      std::span<double> grad) const;

private:
    GridPolicyConfig cfg_;
    nn::ParamLayout layout_;
    std::vector<nn::ConvSpec> convs_;
    nn::AffineSpec head_;
};

// ------------------------------------------------------------- graph policy

// Nodes are obstacles and agents; edges connect pairs within the
// communication radius. Feature layout is fixed by the builder in env.hpp.
struct GraphObservation {
    int node_dim = 0;
    int edge_dim = 0;
    std::vector<std::vector<double>> nodes;
    std::vector<std::vector<int>> neighbors;               // per node
    std::vector<std::vector<std::vector<double>>> edges;   // parallel to neighbors
    std::vector<int> obstacle_nodes;                       // nodes with an action head

    int num_nodes() const { return int(nodes.size()); }
};

struct GnnPolicyConfig {
    int node_dim = 7;
    int edge_dim = 3;
    int msg_hidden = 32;
    int msg_out = 32;
    int upd_hidden = 32;
    int upd_out = 32;
    double stddev = 0.02;
    double output_scale = 0.05;  // bounds the commanded mean speed
};

// Single message-passing layer
//   h_i = F_u(x_i, sum_{j in N_i} F_m(x_i, x_j, e_ij))
// with two-layer perceptrons F_m, F_u and a per-obstacle affine head emitting
// a tanh-bounded Gaussian mean velocity. Messages are summed in an order
// keyed on neighbor content, so permuting node indices permutes the outputs
// bit-exactly, and each output depends on its radius-neighborhood only.
class GnnPolicy {
public:
    using Observation = GraphObservation;
    using Action = std::vector<Vec2>;
    using Distribution = GaussianDistribution;

    explicit GnnPolicy(const GnnPolicyConfig& cfg = {});

    const GnnPolicyConfig& config() const { return cfg_; }
    const nn::ParamLayout& layout() const { return layout_; }
    size_t param_count() const { return layout_.total; }
    std::vector<double> init(Rng& rng) const { return nn::init_params(layout_, rng); }

    Distribution forward(const Observation& obs, std::span<const double> params) const;
    double log_prob_grad(const Observation& obs, const Action& action,
                         std::span<const double> params, std::span<double> grad) const;

private:
    GnnPolicyConfig cfg_;
    nn::ParamLayout layout_;
    nn::MlpSpec msg_;
    nn::MlpSpec upd_;
    nn::AffineSpec head_;
};

// Graph encoder with a scalar head; the state value is the mean of the
// per-node outputs.
class GnnValue {
public:
    using Observation = GraphObservation;

    explicit GnnValue(const GnnPolicyConfig& cfg = {});

    const nn::ParamLayout& layout() const { return layout_; }
    size_t param_count() const { return layout_.total; }
    std::vector<double> init(Rng& rng) const { return nn::init_params(layout_, rng); }

    double value(const Observation& obs, std::span<const double> params) const;
    double value_grad(const Observation& obs, std::span<const double> params,
                      std::span<double> grad) const;

private:
    GnnPolicyConfig cfg_;
    nn::ParamLayout layout_;
    nn::MlpSpec msg_;
    nn::MlpSpec upd_;
    nn::AffineSpec head_;
};

// ------------------------------------------------------------ tabular pair

// Softmax-over-logits policy on an enumerated state space; the workhorse for
// small benchmark problems.
struct TabularConfig {
    int num_states = 1;
    int num_actions = 2;
};

class TabularPolicy {
public:
    using Observation = int;
    using Action = int;
    using Distribution = CategoricalDistribution;

    explicit TabularPolicy(const TabularConfig& cfg) : cfg_(cfg) {}

    const TabularConfig& config() const { return cfg_; }
    size_t param_count() const { return size_t(cfg_.num_states) * cfg_.num_actions; }
    std::vector<double> init(Rng&) const { return std::vector<double>(param_count(), 0.0); }

    Distribution forward(int state, std::span<const double> params) const;
    double log_prob_grad(int state, int action, std::span<const double> params,
                         std::span<double> grad) const;

private:
    TabularConfig cfg_;
};

class TabularValue {
public:
    using Observation = int;

    explicit TabularValue(const TabularConfig& cfg) : cfg_(cfg) {}

    size_t param_count() const { return size_t(cfg_.num_states); }
    std::vector<double> init(Rng&) const { return std::vector<double>(param_count(), 0.0); }

    double value(int state, std::span<const double> params) const { return params[state]; }
    double value_grad(int state, std::span<const double> params, std::span<double> grad) const {
        grad[state] += 1.0;
        return params[state];
    }

private:
    TabularConfig cfg_;
};

} // namespace envopt
