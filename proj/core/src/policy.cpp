#include "envopt/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "envopt/errors.hpp"

namespace envopt {

int sample_action(const CategoricalDistribution& d, Rng& rng) {
    return rng.categorical(d.probs);
}

std::vector<Vec2> sample_action(const GaussianDistribution& d, Rng& rng) {
    std::vector<Vec2> out;
    out.reserve(d.mean.size());
    for (const auto& mu : d.mean) {
        Vec2 v{mu.x + d.stddev * rng.normal(), mu.y + d.stddev * rng.normal()};
        double n = v.norm();
        if (n > d.speed_cap) v = v * (d.speed_cap / n);
        out.push_back(v);
    }
    return out;
}

int greedy_action(const CategoricalDistribution& d) {
    return int(std::max_element(d.probs.begin(), d.probs.end()) - d.probs.begin());
}

std::vector<Vec2> greedy_action(const GaussianDistribution& d) {
    std::vector<Vec2> out = d.mean;
    for (auto& v : out) {
        double n = v.norm();
        if (n > d.speed_cap) v = v * (d.speed_cap / n);
    }
    return out;
}

// ---------------------------------------------------------------- grid CNN

namespace {

std::vector<nn::ConvSpec> build_convs(const GridPolicyConfig& cfg, nn::ParamLayout& layout) {
    std::vector<nn::ConvSpec> convs;
    int h = cfg.grid_height, w = cfg.grid_width, c = cfg.in_channels;
    for (int l = 0; l < cfg.conv_layers; ++l) {
        if (h - cfg.kernel + 1 < 1 || w - cfg.kernel + 1 < 1)
            throw ConfigError("grid policy: conv stack shrinks the grid below 1x1");
        convs.push_back(
            nn::make_conv(layout, "conv" + std::to_string(l), c, cfg.conv_channels, cfg.kernel, h, w));
        h = convs.back().h_out();
        w = convs.back().w_out();
        c = cfg.conv_channels;
    }
    return convs;
}

void check_obs(const GridPolicyConfig& cfg, const GridObservation& obs) {
    if (obs.channels != cfg.in_channels || obs.height != cfg.grid_height ||
        obs.width != cfg.grid_width)
        throw ConfigError("grid policy: observation shape mismatch");
}

// Shared conv-stack walk; returns per-layer activations (index 0 = input).
std::vector<std::vector<double>> run_encoder(const std::vector<nn::ConvSpec>& convs,
                                             std::span<const double> params,
                                             const GridObservation& obs,
                                             std::vector<double>& pooled) {
    std::vector<std::vector<double>> acts;
    acts.push_back(obs.data);
    for (const auto& conv : convs) {
        std::vector<double> out(size_t(conv.c_out) * conv.h_out() * conv.w_out());
        nn::conv_forward(params, conv, acts.back(), out);
        nn::tanh_inplace(out);
        acts.push_back(std::move(out));
    }
    const auto& last = convs.back();
    int spatial = last.h_out() * last.w_out();
    pooled.assign(size_t(last.c_out), 0.0);
    for (int c = 0; c < last.c_out; ++c) {
        double acc = 0.0;
        for (int i = 0; i < spatial; ++i) acc += acts.back()[size_t(c) * spatial + i];
        pooled[c] = acc / spatial;
    }
    return acts;
}

void encoder_backward(const std::vector<nn::ConvSpec>& convs, std::span<const double> params,
                      const std::vector<std::vector<double>>& acts,
                      std::span<const double> dpooled, std::span<double> grad) {
    const auto& last = convs.back();
    int spatial = last.h_out() * last.w_out();
    std::vector<double> da(size_t(last.c_out) * spatial);
    for (int c = 0; c < last.c_out; ++c)
        for (int i = 0; i < spatial; ++i) da[size_t(c) * spatial + i] = dpooled[c] / spatial;

    for (int l = int(convs.size()) - 1; l >= 0; --l) {
        nn::tanh_backward(acts[l + 1], da);
        std::vector<double> dprev(acts[l].size(), 0.0);
        nn::conv_backward(params, convs[l], acts[l], da,
                          grad, l > 0 ? std::span<double>(dprev) : std::span<double>{});
        da = std::move(dprev);
    }
}

} // namespace

GridPolicy::GridPolicy(const GridPolicyConfig& cfg) : cfg_(cfg) {
    convs_ = build_convs(cfg_, layout_);
    head_ = nn::make_affine(layout_, "head", cfg_.conv_channels, cfg_.num_actions);
}

std::vector<std::vector<double>> GridPolicy::encode(const Observation& obs,
                                                    std::span<const double> params,
                                                    std::vector<double>& pooled) const {
    check_obs(cfg_, obs);
    return run_encoder(convs_, params, obs, pooled);
}

CategoricalDistribution GridPolicy::forward(const Observation& obs,
                                            std::span<const double> params) const {
    std::vector<double> pooled;
    encode(obs, params, pooled);
    std::vector<double> logits(size_t(cfg_.num_actions));
    nn::affine_forward(params, head_, pooled, logits);
    return {nn::softmax(logits)};
}

double GridPolicy::log_prob_grad(const Observation& obs, Action action,
                                 std::span<const double> params, std::span<double> grad) const {
    std::vector<double> pooled;
    auto acts = encode(obs, params, pooled);
    std::vector<double> logits(size_t(cfg_.num_actions));
    nn::affine_forward(params, head_, pooled, logits);
    auto probs = nn::softmax(logits);
    if (action < 0 || action >= cfg_.num_actions || probs[action] <= 0.0)
        throw ConfigError("grid policy: action outside the distribution support");

    std::vector<double> dlogits(probs.size());
    for (size_t k = 0; k < probs.size(); ++k)
        dlogits[k] = (int(k) == action ? 1.0 : 0.0) - probs[k];
    std::vector<double> dpooled(pooled.size(), 0.0);
    nn::affine_backward(params, head_, pooled, dlogits, grad, dpooled);
    encoder_backward(convs_, params, acts, dpooled, grad);
    return std::log(probs[action]);
}

GridValue::GridValue(const GridPolicyConfig& cfg) : cfg_(cfg) {
    convs_ = build_convs(cfg_, layout_);
    head_ = nn::make_affine(layout_, "value_head", cfg_.conv_channels, 1);
}

double GridValue::value(const Observation& obs, std::span<const double> params) const {
    check_obs(cfg_, obs);
    std::vector<double> pooled;
    run_encoder(convs_, params, obs, pooled);
    double v = 0.0;
    nn::affine_forward(params, head_, pooled, std::span<double>(&v, 1));
    return v;
}

double GridValue::value_grad(const Observation& obs, std::span<const double> params,
                             std::span<double> grad) const {
    check_obs(cfg_, obs);
    std::vector<double> pooled;
    auto acts = run_encoder(convs_, params, obs, pooled);
    double v = 0.0;
    nn::affine_forward(params, head_, pooled, std::span<double>(&v, 1));

    double dv = 1.0;
    std::vector<double> dpooled(pooled.size(), 0.0);
    nn::affine_backward(params, head_, pooled, std::span<const double>(&dv, 1), grad, dpooled);
    encoder_backward(convs_, params, acts, dpooled, grad);
    return v;
}

// ------------------------------------------------------------- graph policy

namespace {

void check_graph(const GnnPolicyConfig& cfg, const GraphObservation& obs) {
    if (obs.node_dim != cfg.node_dim || obs.edge_dim != cfg.edge_dim)
        throw ConfigError("graph policy: feature dimension mismatch");
}

// Neighbor visit order keyed on content, not index, so relabelings reduce in
// the same arithmetic order.
std::vector<int> sorted_slots(const GraphObservation& obs, int i) {
    const auto& nbrs = obs.neighbors[i];
    std::vector<int> slots(nbrs.size());
    std::iota(slots.begin(), slots.end(), 0);
    std::sort(slots.begin(), slots.end(), [&](int a, int b) {
        const auto& fa = obs.nodes[nbrs[a]];
        const auto& fb = obs.nodes[nbrs[b]];
        if (fa != fb) return fa < fb;
        return obs.edges[i][a] < obs.edges[i][b];
    });
    return slots;
}

struct NodeCache {
    std::vector<int> slots;
    std::vector<std::vector<double>> msg_in;      // per slot
    std::vector<std::vector<double>> msg_hidden;  // per slot
    std::vector<double> agg;
    std::vector<double> upd_in;
    std::vector<double> upd_hidden;
    std::vector<double> h;
};

NodeCache encode_node(const GnnPolicyConfig& cfg, const nn::MlpSpec& msg, const nn::MlpSpec& upd,
                      std::span<const double> params, const GraphObservation& obs, int i) {
    NodeCache c;
    c.slots = sorted_slots(obs, i);
    c.agg.assign(size_t(cfg.msg_out), 0.0);
    const auto& xi = obs.nodes[i];
    for (int slot : c.slots) {
        int j = obs.neighbors[i][slot];
        std::vector<double> in;
        in.reserve(size_t(2) * cfg.node_dim + cfg.edge_dim);
        in.insert(in.end(), xi.begin(), xi.end());
        in.insert(in.end(), obs.nodes[j].begin(), obs.nodes[j].end());
        in.insert(in.end(), obs.edges[i][slot].begin(), obs.edges[i][slot].end());
        std::vector<double> hidden(size_t(cfg.msg_hidden));
        std::vector<double> out(size_t(cfg.msg_out));
        nn::mlp_forward(params, msg, in, hidden, out);
        for (int k = 0; k < cfg.msg_out; ++k) c.agg[k] += out[k];
        c.msg_in.push_back(std::move(in));
        c.msg_hidden.push_back(std::move(hidden));
    }
    c.upd_in.reserve(size_t(cfg.node_dim) + cfg.msg_out);
    c.upd_in.insert(c.upd_in.end(), xi.begin(), xi.end());
    c.upd_in.insert(c.upd_in.end(), c.agg.begin(), c.agg.end());
    c.upd_hidden.assign(size_t(cfg.upd_hidden), 0.0);
    c.h.assign(size_t(cfg.upd_out), 0.0);
    nn::mlp_forward(params, upd, c.upd_in, c.upd_hidden, c.h);
    return c;
}

void backward_node(const GnnPolicyConfig& cfg, const nn::MlpSpec& msg, const nn::MlpSpec& upd,
                   std::span<const double> params, const NodeCache& c, std::span<const double> dh,
                   std::span<double> grad) {
    std::vector<double> dupd_in(c.upd_in.size(), 0.0);
    nn::mlp_backward(params, upd, c.upd_in, c.upd_hidden, dh, grad, dupd_in);
    std::span<const double> dagg(dupd_in.data() + cfg.node_dim, size_t(cfg.msg_out));
    for (size_t s = 0; s < c.msg_in.size(); ++s)
        nn::mlp_backward(params, msg, c.msg_in[s], c.msg_hidden[s], dagg, grad, {});
}

} // namespace

GnnPolicy::GnnPolicy(const GnnPolicyConfig& cfg) : cfg_(cfg) {
    msg_ = nn::make_mlp(layout_, "msg", 2 * cfg_.node_dim + cfg_.edge_dim, cfg_.msg_hidden,
                        cfg_.msg_out);
    upd_ = nn::make_mlp(layout_, "upd", cfg_.node_dim + cfg_.msg_out, cfg_.upd_hidden,
                        cfg_.upd_out);
    head_ = nn::make_affine(layout_, "head", cfg_.upd_out, 2);
}

GaussianDistribution GnnPolicy::forward(const Observation& obs,
                                        std::span<const double> params) const {
    check_graph(cfg_, obs);
    GaussianDistribution d;
    d.stddev = cfg_.stddev;
    d.speed_cap = cfg_.output_scale;
    for (int o : obs.obstacle_nodes) {
        auto c = encode_node(cfg_, msg_, upd_, params, obs, o);
        double u[2];
        nn::affine_forward(params, head_, c.h, u);
        d.mean.push_back(
            {cfg_.output_scale * std::tanh(u[0]), cfg_.output_scale * std::tanh(u[1])});
    }
    return d;
}

double GnnPolicy::log_prob_grad(const Observation& obs, const Action& action,
                                std::span<const double> params, std::span<double> grad) const {
    check_graph(cfg_, obs);
    if (action.size() != obs.obstacle_nodes.size())
        throw ConfigError("graph policy: action count mismatch");
    double var = cfg_.stddev * cfg_.stddev;
    double logp = 0.0;
    for (size_t a = 0; a < action.size(); ++a) {
        int o = obs.obstacle_nodes[a];
        auto c = encode_node(cfg_, msg_, upd_, params, obs, o);
        double u[2];
        nn::affine_forward(params, head_, c.h, u);
        double th[2] = {std::tanh(u[0]), std::tanh(u[1])};
        double mu[2] = {cfg_.output_scale * th[0], cfg_.output_scale * th[1]};
        double av[2] = {action[a].x, action[a].y};

        double du[2];
        for (int k = 0; k < 2; ++k) {
            double diff = av[k] - mu[k];
            logp += -0.5 * diff * diff / var - std::log(cfg_.stddev) - 0.5 * std::log(2.0 * M_PI);
            double dmu = diff / var;
            du[k] = dmu * cfg_.output_scale * (1.0 - th[k] * th[k]);
        }
        std::vector<double> dh(size_t(cfg_.upd_out), 0.0);
        nn::affine_backward(params, head_, c.h, du, grad, dh);
        backward_node(cfg_, msg_, upd_, params, c, dh, grad);
    }
    return logp;
}

GnnValue::GnnValue(const GnnPolicyConfig& cfg) : cfg_(cfg) {
    msg_ = nn::make_mlp(layout_, "v_msg", 2 * cfg_.node_dim + cfg_.edge_dim, cfg_.msg_hidden,
                        cfg_.msg_out);
    upd_ = nn::make_mlp(layout_, "v_upd", cfg_.node_dim + cfg_.msg_out, cfg_.upd_hidden,
                        cfg_.upd_out);
    head_ = nn::make_affine(layout_, "v_head", cfg_.upd_out, 1);
}

double GnnValue::value(const Observation& obs, std::span<const double> params) const {
    check_graph(cfg_, obs);
    if (obs.num_nodes() == 0) return 0.0;
    double sum = 0.0;
    for (int i = 0; i < obs.num_nodes(); ++i) {
        auto c = encode_node(cfg_, msg_, upd_, params, obs, i);
        double v = 0.0;
        nn::affine_forward(params, head_, c.h, std::span<double>(&v, 1));
        sum += v;
    }
    return sum / obs.num_nodes();
}

double GnnValue::value_grad(const Observation& obs, std::span<const double> params,
                            std::span<double> grad) const {
    check_graph(cfg_, obs);
    if (obs.num_nodes() == 0) return 0.0;
    double sum = 0.0;
    double dv = 1.0 / obs.num_nodes();
    for (int i = 0; i < obs.num_nodes(); ++i) {
        auto c = encode_node(cfg_, msg_, upd_, params, obs, i);
        double v = 0.0;
        nn::affine_forward(params, head_, c.h, std::span<double>(&v, 1));
        sum += v;
        std::vector<double> dh(size_t(cfg_.upd_out), 0.0);
        nn::affine_backward(params, head_, c.h, std::span<const double>(&dv, 1), grad, dh);
        backward_node(cfg_, msg_, upd_, params, c, dh, grad);
    }
    return sum / obs.num_nodes();
}

// ------------------------------------------------------------ tabular pair

CategoricalDistribution TabularPolicy::forward(int state, std::span<const double> params) const {
    std::span<const double> logits(params.data() + size_t(state) * cfg_.num_actions,
                                   size_t(cfg_.num_actions));
    return {nn::softmax(logits)};
}

double TabularPolicy::log_prob_grad(int state, int action, std::span<const double> params,
                                    std::span<double> grad) const {
    auto d = forward(state, params);
    if (action < 0 || action >= cfg_.num_actions || d.probs[action] <= 0.0)
        throw ConfigError("tabular policy: action outside the distribution support");
    for (int k = 0; k < cfg_.num_actions; ++k)
        grad[size_t(state) * cfg_.num_actions + k] += (k == action ? 1.0 : 0.0) - d.probs[k];
    return std::log(d.probs[action]);
}

} // namespace envopt
