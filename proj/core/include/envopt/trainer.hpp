#pragma once

#include <chrono>
#include <cmath>
#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "envopt/env.hpp"
#include "envopt/errors.hpp"
#include "envopt/policy.hpp"

namespace envopt {

// Nonnegative multipliers of the constrained objective.
struct DualVars {
    std::vector<double> lambda;

    void project() {
        for (auto& l : lambda) l = std::max(0.0, l);
    }
};

// (1 - delta + eps) / (1 - gamma); the level a discounted constraint return
// must reach for the per-step guarantee to follow.
double constraint_constant(double delta, double eps, double gamma);

// r_o + sum_q lambda_q (r_q - (1-gamma) C_q) + gamma V' - V
double td_error(double r_o, std::span<const double> r_q, std::span<const double> lambda,
                std::span<const double> constants, double gamma, double v, double v_next);

// theta += alpha * delta * grad_log_prob
void primal_step(std::span<double> theta, std::span<const double> grad_log_prob, double delta,
                 double alpha);

// lambda' = [lambda - beta (R_hat - C)]_+
std::vector<double> dual_step(std::span<const double> lambda, std::span<const double> r_hat,
                              std::span<const double> constants, double beta_dual);

struct TrainerConfig {
    double alpha = 3e-3;         // actor step size
    double alpha_critic = -1.0;  // defaults to alpha
    double beta_dual = 1e-2;
    int psi = 10;                // primal steps per dual step
    double gamma = 0.99;
    int t_batch = 10;            // trajectories per constraint estimate
    int iterations = 100;
    uint64_t seed = 0;
    enum class Surrogate { Vanilla, Clipped };
    Surrogate surrogate = Surrogate::Vanilla;
    double clip_ratio = 0.2;
    int clip_epochs = 1;  // passes over the batch in clipped mode
    // Reuse the constraint returns of recently finished on-policy episodes
    // instead of sampling fresh trajectories every iteration.
    bool fresh_constraint_rollouts = false;
    std::vector<double> constraint_constants;
    std::vector<double> lambda0;  // defaults to zeros
    std::function<void(int iteration, const std::vector<double>& theta,
                       const std::vector<double>& omega, const std::vector<double>& lambda)>
        iteration_hook;
};

struct TrainLogRow {
    int iteration = 0;
    double mean_episode_reward = 0.0;
    std::vector<double> r_hat;
    std::vector<double> lambda;
    double wallclock = 0.0;
};

struct TrainResult {
    std::vector<double> theta;
    std::vector<double> omega;
    std::vector<double> lambda;
    int iterations_completed = 0;
    bool diverged = false;
    std::string diagnostic;
    std::vector<TrainLogRow> log;
};

// CSV: iteration, mean_episode_reward, R_q_hat[*], lambda[*], wallclock.
void write_training_log(const std::string& path, const std::vector<TrainLogRow>& rows);

// Monte-Carlo estimate of the discounted constraint returns under the
// current policy: (1/T) sum_traj sum_t gamma^t 1[h_q <= 0].
template <class Env, class Policy>
std::vector<double> estimate_constraint_return(Env& env, const Policy& policy,
                                               std::span<const double> theta, int trajectories,
                                               double gamma, Rng& rng) {
    int q_count = env.num_constraints();
    std::vector<double> acc(q_count, 0.0);
    if (trajectories < 1) throw ConfigError("constraint estimate needs at least one trajectory");
    for (int tau = 0; tau < trajectories; ++tau) {
        auto obs = env.reset(rng);
        double disc = 1.0;
        while (true) {
            auto dist = policy.forward(obs, theta);
            auto action = sample_action(dist, rng);
            auto sr = env.step(action, rng);
            for (int q = 0; q < q_count; ++q) acc[q] += disc * sr.constraint_indicators[q];
            disc *= gamma;
            obs = std::move(sr.observation);
            if (sr.status != StepStatus::Running) break;
        }
    }
    for (auto& a : acc) a /= double(trajectories);
    return acc;
}

// Alternating actor-critic ascent on the multiplier-penalized return and
// projected descent on the multipliers: psi policy-gradient steps with the
// one-step estimation error, a constraint-return estimate, one dual step.
// Deterministic given (seed, config). Divergence aborts with the parameters
// of the last completed iteration.
template <class Env, class Policy, class Value>
TrainResult train(Env& env, const Policy& policy, const Value& value, const TrainerConfig& cfg,
                  std::vector<double> theta0 = {}, std::vector<double> omega0 = {}) {
    using Obs = typename Env::Observation;
    using Action = typename Env::Action;

    const int q_count = env.num_constraints();
    if (int(cfg.constraint_constants.size()) != q_count)
        throw ConfigError("trainer: one constraint constant per environment constraint required");
    if (cfg.psi < 1) throw ConfigError("trainer: psi must be >= 1");
    if (cfg.gamma < 0.0 || cfg.gamma >= 1.0)
        throw ConfigError("trainer: gamma must lie in [0, 1)");
    if (!cfg.lambda0.empty() && int(cfg.lambda0.size()) != q_count)
        throw ConfigError("trainer: lambda0 size mismatch");

    Rng rng(cfg.seed);
    std::vector<double> theta = theta0.empty() ? policy.init(rng) : std::move(theta0);
    std::vector<double> omega = omega0.empty() ? value.init(rng) : std::move(omega0);
    DualVars dual;
    dual.lambda = cfg.lambda0.empty() ? std::vector<double>(q_count, 0.0) : cfg.lambda0;
    dual.project();
    const double alpha_critic = cfg.alpha_critic > 0.0 ? cfg.alpha_critic : cfg.alpha;

    TrainResult result;
    result.theta = theta;
    result.omega = omega;
    result.lambda = dual.lambda;
    if (cfg.iterations == 0) return result;

    auto t_start = std::chrono::steady_clock::now();
    auto wallclock = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    };

    std::vector<double> grad(theta.size(), 0.0);
    std::vector<double> vgrad(omega.size(), 0.0);

    bool episode_live = false;
    Obs obs{};
    double ep_reward = 0.0;
    double ep_disc = 1.0;
    std::vector<double> ep_constraints(q_count, 0.0);
    std::deque<std::vector<double>> finished_constraint_returns;
    double last_mean_reward = 0.0;

    struct Transition {
        Obs obs;
        Action action;
        double logp_old = 0.0;
        double reward = 0.0;
        std::vector<double> cons;
        StepStatus status = StepStatus::Running;
        Obs next;
    };

    for (int iter = 1; iter <= cfg.iterations; ++iter) {
        std::vector<double> completed_rewards;

        auto begin_episode_if_needed = [&] {
            if (!episode_live) {
                obs = env.reset(rng);
                ep_reward = 0.0;
                ep_disc = 1.0;
                ep_constraints.assign(q_count, 0.0);
                episode_live = true;
            }
        };
        auto finish_transition = [&](const EnvStep<Obs>& sr) {
            ep_reward += sr.reward;
            for (int q = 0; q < q_count; ++q)
                ep_constraints[q] += ep_disc * sr.constraint_indicators[q];
            ep_disc *= cfg.gamma;
            if (sr.status != StepStatus::Running) {
                completed_rewards.push_back(ep_reward);
                finished_constraint_returns.push_back(ep_constraints);
                while (int(finished_constraint_returns.size()) > std::max(cfg.t_batch, 64))
                    finished_constraint_returns.pop_front();
                episode_live = false;
            }
        };
        auto critic_step = [&](const Obs& at, double delta) {
            std::fill(vgrad.begin(), vgrad.end(), 0.0);
            value.value_grad(at, omega, vgrad);
            for (size_t i = 0; i < omega.size(); ++i) omega[i] += alpha_critic * delta * vgrad[i];
        };

        bool bad = false;
        if (cfg.surrogate == TrainerConfig::Surrogate::Vanilla) {
            for (int step = 0; step < cfg.psi && !bad; ++step) {
                begin_episode_if_needed();
                auto dist = policy.forward(obs, theta);
                auto action = sample_action(dist, rng);
                std::fill(grad.begin(), grad.end(), 0.0);
                policy.log_prob_grad(obs, action, theta, grad);
                double v = value.value(obs, omega);
                auto sr = env.step(action, rng);
                double v_next =
                    sr.status == StepStatus::Running ? value.value(sr.observation, omega) : 0.0;
                double delta = td_error(sr.reward, sr.constraint_indicators, dual.lambda,
                                        cfg.constraint_constants, cfg.gamma, v, v_next);
                if (!std::isfinite(delta)) {
                    result.diagnostic = "non-finite estimation error at iteration " +
                                        std::to_string(iter);
                    bad = true;
                    break;
                }
                primal_step(theta, grad, delta, cfg.alpha);
                critic_step(obs, delta);
                finish_transition(sr);
                obs = std::move(sr.observation);
            }
        } else {
            // Collect a batch under the frozen policy, then update through
            // the clipped importance ratio.
            std::vector<Transition> batch;
            batch.reserve(size_t(cfg.psi));
            for (int step = 0; step < cfg.psi; ++step) {
                begin_episode_if_needed();
                auto dist = policy.forward(obs, theta);
                auto action = sample_action(dist, rng);
                std::fill(grad.begin(), grad.end(), 0.0);
                double logp = policy.log_prob_grad(obs, action, theta, grad);
                auto sr = env.step(action, rng);
                Transition tr;
                tr.obs = obs;
                tr.action = action;
                tr.logp_old = logp;
                tr.reward = sr.reward;
                tr.cons = sr.constraint_indicators;
                tr.status = sr.status;
                tr.next = sr.observation;
                batch.push_back(std::move(tr));
                finish_transition(sr);
                obs = std::move(sr.observation);
            }
            // Advantages from the frozen critic, centered over the batch to
            // kill the common-mode drift a lagging critic would inject.
            std::vector<double> advantage(batch.size(), 0.0);
            double adv_mean = 0.0;
            for (size_t k = 0; k < batch.size(); ++k) {
                const auto& tr = batch[k];
                double v = value.value(tr.obs, omega);
                double v_next =
                    tr.status == StepStatus::Running ? value.value(tr.next, omega) : 0.0;
                advantage[k] = td_error(tr.reward, tr.cons, dual.lambda,
                                        cfg.constraint_constants, cfg.gamma, v, v_next);
                if (!std::isfinite(advantage[k])) {
                    result.diagnostic = "non-finite estimation error at iteration " +
                                        std::to_string(iter);
                    bad = true;
                    break;
                }
                adv_mean += advantage[k];
            }
            if (bad) {
                result.diverged = true;
                return result;
            }
            adv_mean /= double(batch.size());
            for (int epoch = 0; epoch < std::max(1, cfg.clip_epochs) && !bad; ++epoch) {
                for (const auto& tr : batch) {
                    size_t k = size_t(&tr - batch.data());
                    double delta = advantage[k] - adv_mean;
                    std::fill(grad.begin(), grad.end(), 0.0);
                    double logp_new = policy.log_prob_grad(tr.obs, tr.action, theta, grad);
                    double ratio = std::exp(logp_new - tr.logp_old);
                    double clipped =
                        std::clamp(ratio, 1.0 - cfg.clip_ratio, 1.0 + cfg.clip_ratio);
                    if (ratio * delta <= clipped * delta)
                        primal_step(theta, grad, ratio * delta, cfg.alpha);
                }
            }
            for (size_t k = 0; k < batch.size(); ++k) critic_step(batch[k].obs, advantage[k]);
        }

        for (double p : theta)
            if (!std::isfinite(p)) {
                result.diagnostic = "non-finite policy parameters at iteration " +
                                    std::to_string(iter);
                bad = true;
                break;
            }
        if (bad) {
            result.diverged = true;
            return result;  // parameters of the last completed iteration
        }

        std::vector<double> r_hat(q_count, 0.0);
        if (q_count > 0) {
            if (cfg.fresh_constraint_rollouts || finished_constraint_returns.empty()) {
                r_hat = estimate_constraint_return(env, policy, theta, cfg.t_batch, cfg.gamma, rng);
                episode_live = false;  // estimation rollouts consumed the env state
            } else {
                int take = std::min<int>(cfg.t_batch, int(finished_constraint_returns.size()));
                for (int k = 0; k < take; ++k) {
                    const auto& row =
                        finished_constraint_returns[finished_constraint_returns.size() - 1 - k];
                    for (int q = 0; q < q_count; ++q) r_hat[q] += row[q];
                }
                for (auto& v : r_hat) v /= double(take);
            }
            dual.lambda = dual_step(dual.lambda, r_hat, cfg.constraint_constants, cfg.beta_dual);
        }

        if (!completed_rewards.empty()) {
            double sum = 0.0;
            for (double r : completed_rewards) sum += r;
            last_mean_reward = sum / double(completed_rewards.size());
        }
        result.log.push_back({iter, last_mean_reward, r_hat, dual.lambda, wallclock()});

        result.theta = theta;
        result.omega = omega;
        result.lambda = dual.lambda;
        result.iterations_completed = iter;
        if (cfg.iteration_hook) cfg.iteration_hook(iter, theta, omega, dual.lambda);
    }
    return result;
}

// Joint constraint-satisfaction survival, estimated over repeated policy
// rollouts: for each step t, the fraction of episodes with h_q <= 0 at every
// step up to t (episodes that end satisfied stay satisfied). Reports the
// minimum over steps and constraints with its 95% Wilson lower bound.
struct DeltaReport {
    int episodes = 0;
    double delta = 0.0;
    double min_probability = 1.0;
    double wilson_lower_95 = 1.0;
    bool pass = false;  // min_probability >= 1 - delta
    std::vector<double> joint_satisfaction;  // per step, min over constraints
};

double wilson_lower_bound(double p_hat, int n, double z = 1.959963984540054);

DeltaReport verify_delta_constrained(const Scenario& s, const GnnPolicy& policy,
                                     std::span<const double> theta,
                                     const std::vector<ConstraintSpec>& constraints, double delta,
                                     int episodes, uint64_t seed,
                                     const SimulationOptions& sim_options = {},
                                     double comm_radius = 2.0, bool greedy = false);

} // namespace envopt
