#include "envopt/trainer.hpp"

#include <algorithm>
#include <fstream>

namespace envopt {

double constraint_constant(double delta, double eps, double gamma) {
    if (gamma >= 1.0 || gamma < 0.0)
        throw ConfigError("constraint constant: gamma must lie in [0, 1)");
    if (eps < 0.0 || delta > 1.0 || eps > delta)
        throw ConfigError("constraint constant: need 0 <= eps <= delta <= 1");
    return (1.0 - delta + eps) / (1.0 - gamma);
}

double td_error(double r_o, std::span<const double> r_q, std::span<const double> lambda,
                std::span<const double> constants, double gamma, double v, double v_next) {
    if (r_q.size() != lambda.size() || lambda.size() != constants.size())
        throw ConfigError("estimation error: constraint vector length mismatch");
    double acc = r_o;
    for (size_t q = 0; q < r_q.size(); ++q)
        acc += lambda[q] * (r_q[q] - (1.0 - gamma) * constants[q]);
    return acc + gamma * v_next - v;
}

void primal_step(std::span<double> theta, std::span<const double> grad_log_prob, double delta,
                 double alpha) {
    for (size_t i = 0; i < theta.size(); ++i) theta[i] += alpha * delta * grad_log_prob[i];
}

std::vector<double> dual_step(std::span<const double> lambda, std::span<const double> r_hat,
                              std::span<const double> constants, double beta_dual) {
    std::vector<double> out(lambda.size());
    for (size_t q = 0; q < lambda.size(); ++q)
        out[q] = std::max(0.0, lambda[q] - beta_dual * (r_hat[q] - constants[q]));
    return out;
}

void write_training_log(const std::string& path, const std::vector<TrainLogRow>& rows) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write training log: " + path);
    size_t q_count = rows.empty() ? 0 : rows.front().r_hat.size();
    out << "iteration,mean_episode_reward";
    for (size_t q = 0; q < q_count; ++q) out << ",r_hat_" << q;
    for (size_t q = 0; q < q_count; ++q) out << ",lambda_" << q;
    out << ",wallclock\n";
    char buf[64];
    auto emit = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.6f", v);
        out << buf;
    };
    for (const auto& r : rows) {
        out << r.iteration << ",";
        emit(r.mean_episode_reward);
        for (double v : r.r_hat) {
            out << ",";
            emit(v);
        }
        for (double v : r.lambda) {
            out << ",";
            emit(v);
        }
        out << ",";
        emit(r.wallclock);
        out << "\n";
    }
}

double wilson_lower_bound(double p_hat, int n, double z) {
    if (n <= 0) return 0.0;
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = p_hat + z2 / (2.0 * n);
    double margin = z * std::sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * double(n) * n));
    return std::max(0.0, (center - margin) / denom);
}

DeltaReport verify_delta_constrained(const Scenario& s, const GnnPolicy& policy,
                                     std::span<const double> theta,
                                     const std::vector<ConstraintSpec>& constraints, double delta,
                                     int episodes, uint64_t seed,
                                     const SimulationOptions& sim_options, double comm_radius,
                                     bool greedy) {
    if (episodes < 1) throw ConfigError("verification needs at least one episode");
    DeltaReport rep;
    rep.episodes = episodes;
    rep.delta = delta;

    SimulationOptions options = sim_options;
    options.constraints = constraints;

    size_t q_count = constraints.size();
    // survived[q][e]: whether episode e satisfied constraint q at every step
    // so far; episodes that end satisfied remain satisfied afterwards.
    std::vector<std::vector<uint8_t>> final_ok(q_count, std::vector<uint8_t>(episodes, 1));
    std::vector<std::vector<int>> violate_step(q_count,
                                               std::vector<int>(episodes, -1));  // first violation
    int max_len = 0;

    for (int e = 0; e < episodes; ++e) {
        std::vector<double> params(theta.begin(), theta.end());
        auto fn = gnn_obstacle_policy(policy, std::move(params), comm_radius, greedy,
                                      Rng::derive(seed, uint64_t(e)));
        auto trace = simulate_navigation(s, fn, options);
        max_len = std::max(max_len, int(trace.steps.size()));
        for (size_t q = 0; q < q_count; ++q) {
            for (size_t t = 0; t < trace.steps.size(); ++t) {
                if (trace.steps[t].constraint_values[q] > 0.0) {
                    violate_step[q][e] = int(t);
                    final_ok[q][e] = 0;
                    break;
                }
            }
        }
    }

    rep.joint_satisfaction.assign(size_t(std::max(max_len, 1)), 1.0);
    for (int t = 0; t < std::max(max_len, 1); ++t) {
        double worst = 1.0;
        for (size_t q = 0; q < q_count; ++q) {
            int alive = 0;
            for (int e = 0; e < episodes; ++e)
                if (violate_step[q][e] < 0 || violate_step[q][e] > t) ++alive;
            worst = std::min(worst, double(alive) / episodes);
        }
        rep.joint_satisfaction[size_t(t)] = worst;
    }
    rep.min_probability = *std::min_element(rep.joint_satisfaction.begin(),
                                            rep.joint_satisfaction.end());
    rep.wilson_lower_95 = wilson_lower_bound(rep.min_probability, episodes);
    rep.pass = rep.min_probability >= 1.0 - delta;
    return rep;
}

} // namespace envopt
