// Command-line front end: feasibility checks, layout construction,
// simulation, training, evaluation and rendering for obstacle-layout
// optimization scenes.
//
// Exit codes: 0 success, 2 bad configuration, 3 infeasible construction.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "envopt/baseline.hpp"
#include "envopt/checkpoint.hpp"
#include "envopt/completeness.hpp"
#include "envopt/env.hpp"
#include "envopt/errors.hpp"
#include "envopt/experiment.hpp"
#include "envopt/render.hpp"
#include "envopt/scenario_io.hpp"
#include "envopt/trainer.hpp"

using namespace envopt;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

void print_report(const CompletenessReport& rep) {
    const char* verdict = rep.verdict == Verdict::Pass ? "PASS"
                          : rep.verdict == Verdict::Fail ? "FAIL"
                                                         : "N/A";
    std::printf("%-24s %10.4f  >=  %10.4f   %s\n", rep.kind.c_str(), rep.condition_value,
                rep.threshold, verdict);
    if (!rep.per_agent_bounds.empty()) {
        std::printf("  per-agent bounds:");
        for (double b : rep.per_agent_bounds) std::printf(" %.4f", b);
        std::printf("\n");
    }
    if (!rep.note.empty()) std::printf("  note: %s\n", rep.note.c_str());
}

std::vector<ConstraintSpec> constraints_from_json(const json& j, double gamma) {
    std::vector<ConstraintSpec> out;
    for (const auto& cj : j) {
        ConstraintSpec spec;
        std::string kind = cj.at("kind").get<std::string>();
        if (kind == "deviation_distance")
            spec.kind = ConstraintSpec::Kind::DeviationDistance;
        else if (kind == "total_speed")
            spec.kind = ConstraintSpec::Kind::TotalSpeed;
        else
            throw ConfigError("unknown constraint kind: " + kind);
        spec.bound = cj.at("bound").get<double>();
        spec.delta = cj.value("delta", 0.1);
        spec.eps = cj.value("eps", 0.0);
        spec.constant = cj.contains("constant")
                            ? cj.at("constant").get<double>()
                            : constraint_constant(spec.delta, spec.eps, gamma);
        out.push_back(spec);
    }
    return out;
}

struct TrainFileConfig {
    TrainerConfig trainer;
    std::vector<ConstraintSpec> constraints;
    int max_steps_override = 0;
    std::string architecture;  // "grid" (discrete) or "gnn" (continuous)
};

TrainFileConfig load_train_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open training config: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("training config: ") + e.what());
    }
    TrainFileConfig out;
    auto& t = out.trainer;
    t.alpha = j.value("alpha", t.alpha);
    t.alpha_critic = j.value("alpha_critic", t.alpha_critic);
    t.beta_dual = j.value("beta_dual", t.beta_dual);
    t.psi = j.value("psi", t.psi);
    t.gamma = j.value("gamma", t.gamma);
    t.t_batch = j.value("t_batch", t.t_batch);
    t.iterations = j.value("iterations", t.iterations);
    t.clip_ratio = j.value("clip_ratio", t.clip_ratio);
    t.fresh_constraint_rollouts = j.value("fresh_constraint_rollouts", false);
    std::string surrogate = j.value("surrogate", std::string("vanilla"));
    if (surrogate == "vanilla")
        t.surrogate = TrainerConfig::Surrogate::Vanilla;
    else if (surrogate == "clipped")
        t.surrogate = TrainerConfig::Surrogate::Clipped;
    else
        throw ConfigError("training config: surrogate must be vanilla or clipped");
    if (j.contains("constraints"))
        out.constraints = constraints_from_json(j.at("constraints"), t.gamma);
    for (const auto& c : out.constraints) t.constraint_constants.push_back(c.constant);
    out.max_steps_override = j.value("max_steps", 0);
    out.architecture = j.value("architecture", std::string());
    return out;
}

int cmd_check(const std::string& scenario_path, const std::string& json_path, double capacity) {
    Scenario s = load_scenario(scenario_path);
    auto rep_off = check_offline_unprioritized(s);
    auto decomp = decompose_components(s);
    auto rep_pri = check_offline_prioritized(s, decomp);
    double cap = capacity >= 0.0 ? capacity : 2.0 * s.agents.size() * s.max_agent_radius() *
                                                  s.max_speed;
    auto rep_on = check_online_capacity(s, cap);
    auto partial = partial_offline_guarantee(s, decomp);

    print_report(rep_off);
    print_report(rep_pri);
    print_report(rep_on);
    std::printf("partial guarantee: b=%d, agents:", partial.b);
    for (int id : partial.guaranteed_ids) std::printf(" %d", id);
    std::printf("\n");

    if (!json_path.empty()) {
        json j;
        j["offline_unprioritized"] = json::parse(rep_off.to_json());
        j["offline_prioritized"] = json::parse(rep_pri.to_json());
        j["online_capacity"] = json::parse(rep_on.to_json());
        j["partial_guarantee"] = {{"b", partial.b}, {"agents", partial.guaranteed_ids}};
        std::ofstream out(json_path);
        if (!out) throw ConfigError("cannot write report: " + json_path);
        out << j.dump(2) << "\n";
    }
    return kExitOk;
}

int cmd_construct(const std::string& scenario_path, const std::string& out_path) {
    Scenario s = load_scenario(scenario_path);
    auto layout = construct_wellformed_layout(s);
    if (!layout.feasible) {
        std::fprintf(stderr, "construction infeasible: %s\n", layout.reason.c_str());
        return kExitInfeasible;
    }
    Scenario out = s;
    out.obstacles = layout.obstacles;
    save_scenario(out, out_path);
    std::printf("relocated %d obstacle(s); layout written to %s\n", layout.relocated,
                out_path.c_str());
    return kExitOk;
}

int cmd_simulate(const std::string& scenario_path, const std::string& checkpoint_path,
                 const std::string& trace_path, const std::string& svg_path, uint64_t seed) {
    Scenario s = load_scenario(scenario_path);
    ObstaclePolicyFn fn = nullptr;
    if (!checkpoint_path.empty() && s.mode == Mode::OnlineContinuous) {
        auto ck = load_checkpoint(checkpoint_path);
        if (ck.policy_kind != "gnn")
            throw ConfigError("continuous scenes need a graph-policy checkpoint");
        GnnPolicy policy(gnn_config_from_json(ck.arch));
        fn = gnn_obstacle_policy(std::move(policy), ck.theta, 2.0, true, seed);
    }
    SimulationOptions options;
    auto trace = simulate_navigation(s, fn, options);

    int succ = 0;
    for (auto v : trace.success) succ += v ? 1 : 0;
    std::printf("steps: %zu, success: %d/%zu%s\n", trace.steps.size(), succ, trace.success.size(),
                trace.timed_out ? " (timed out)" : "");
    if (!trace_path.empty()) save_trace(trace, s, trace_path);
    if (!svg_path.empty()) render_trace(trace, s, svg_path);
    return kExitOk;
}

int cmd_train(const std::string& scenario_path, const std::string& config_path,
              const std::string& out_path, const std::string& log_path, uint64_t seed) {
    Scenario s = load_scenario(scenario_path);
    TrainFileConfig cfg = config_path.empty() ? TrainFileConfig{} : load_train_config(config_path);
    cfg.trainer.seed = seed;

    Checkpoint ck;
    ck.seed = seed;
    TrainResult result;
    if (s.mode == Mode::OfflineDiscrete) {
        OfflineLayoutEnv::Options opts;
        opts.sampler = [base = s](Rng& rng) { return randomize_scenario(base, rng); };
        OfflineLayoutEnv env(s, opts);
        GridPolicy policy(env.policy_config());
        GridValue value(env.policy_config());
        result = train(env, policy, value, cfg.trainer);
        ck.policy_kind = "grid";
        ck.arch = arch_to_json(env.policy_config());
    } else {
        OnlineNavEnv::Options opts;
        opts.constraints = cfg.constraints;
        opts.sampler = [base = s](Rng& rng) { return randomize_scenario(base, rng); };
        if (cfg.max_steps_override > 0) opts.max_steps_override = cfg.max_steps_override;
        OnlineNavEnv env(s, opts);
        GnnPolicyConfig pcfg;
        pcfg.output_scale = s.max_speed;
        GnnPolicy policy(pcfg);
        GnnValue value(pcfg);
        result = train(env, policy, value, cfg.trainer);
        ck.policy_kind = "gnn";
        ck.arch = arch_to_json(pcfg);
    }

    ck.theta = result.theta;
    ck.omega = result.omega;
    ck.lambda = result.lambda;
    ck.iteration = result.iterations_completed;
    save_checkpoint(ck, out_path);
    if (!log_path.empty()) write_training_log(log_path, result.log);

    if (result.diverged) {
        std::fprintf(stderr, "training aborted: %s (checkpoint holds the last good state)\n",
                     result.diagnostic.c_str());
        return kExitConfig;
    }
    std::printf("trained %d iteration(s); checkpoint written to %s\n",
                result.iterations_completed, out_path.c_str());
    return kExitOk;
}

int cmd_eval(const std::string& scenario_path, const std::string& method,
             const std::string& checkpoint_path, int trials, uint64_t seed,
             const std::string& csv_path, const std::string& json_path) {
    Scenario s = load_scenario(scenario_path);
    ExperimentConfig cfg;
    if (method == "none")
        cfg.method = ExperimentConfig::Method::None;
    else if (method == "heuristic")
        cfg.method = ExperimentConfig::Method::Heuristic;
    else if (method == "learned")
        cfg.method = ExperimentConfig::Method::Learned;
    else
        throw ConfigError("method must be none, heuristic or learned");
    cfg.checkpoint_path = checkpoint_path;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.csv_path = csv_path;
    cfg.json_path = json_path;
    auto summary = run_experiment(s, cfg);
    std::printf("%-10s SPL %.4f +- %.4f | speed %.4f +- %.4f | success %.4f\n",
                summary.method.c_str(), summary.spl.mean, summary.spl.stddev,
                summary.pct_speed.mean, summary.pct_speed.stddev, summary.success_rate.mean);
    return kExitOk;
}

int cmd_baseline(const std::string& scenario_path, const std::string& out_path, int rounds,
                 uint64_t seed) {
    Scenario s = load_scenario(scenario_path);
    Rng rng(seed);
    Scenario optimized = heuristic_baseline(s, rounds, rng);
    if (!out_path.empty()) save_scenario(optimized, out_path);
    int moved = 0;
    for (size_t j = 0; j < s.obstacles.size(); ++j)
        if (!(s.obstacles[j].position == optimized.obstacles[j].position)) ++moved;
    std::printf("heuristic moved %d obstacle(s)\n", moved);
    return kExitOk;
}

int cmd_render(const std::string& trace_path, const std::string& svg_path) {
    auto [trace, scenario] = load_trace(trace_path);
    render_trace(trace, scenario, svg_path);
    std::printf("wrote %s\n", svg_path.c_str());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"obstacle-layout optimization for multi-agent navigation"};
    app.require_subcommand(1);

    std::string scenario_path, config_path, checkpoint_path, trace_path, out_path;
    std::string csv_path, json_path, svg_path, method = "none";
    int trials = 20;
    int rounds = 8;
    double capacity = -1.0;
    uint64_t seed = 0;

    auto* check = app.add_subcommand("check", "evaluate the feasibility conditions");
    check->add_option("--scenario", scenario_path)->required();
    check->add_option("--json", json_path);
    check->add_option("--capacity", capacity, "relocation capacity (area per step)");

    auto* construct = app.add_subcommand("construct", "rearrange obstacles for path existence");
    construct->add_option("--scenario", scenario_path)->required();
    construct->add_option("--out", out_path)->required();

    auto* simulate = app.add_subcommand("simulate", "roll one navigation episode");
    simulate->add_option("--scenario", scenario_path)->required();
    simulate->add_option("--checkpoint", checkpoint_path);
    simulate->add_option("--trace", trace_path);
    simulate->add_option("--svg", svg_path);
    simulate->add_option("--seed", seed);

    auto* train_cmd = app.add_subcommand("train", "run the constrained policy-gradient loop");
    train_cmd->add_option("--scenario", scenario_path)->required();
    train_cmd->add_option("--config", config_path);
    train_cmd->add_option("--out", out_path)->required();
    train_cmd->add_option("--log", csv_path);
    train_cmd->add_option("--seed", seed);

    auto* eval_cmd = app.add_subcommand("eval", "run seeded evaluation trials");
    eval_cmd->add_option("--scenario", scenario_path)->required();
    eval_cmd->add_option("--method", method, "none | heuristic | learned");
    eval_cmd->add_option("--checkpoint", checkpoint_path);
    eval_cmd->add_option("--trials", trials);
    eval_cmd->add_option("--seed", seed);
    eval_cmd->add_option("--csv", csv_path);
    eval_cmd->add_option("--json", json_path);

    auto* baseline_cmd = app.add_subcommand("baseline", "run the layout heuristic");
    baseline_cmd->add_option("--scenario", scenario_path)->required();
    baseline_cmd->add_option("--out", out_path);
    baseline_cmd->add_option("--rounds", rounds);
    baseline_cmd->add_option("--seed", seed);

    auto* render_cmd = app.add_subcommand("render", "draw a saved trace as SVG");
    render_cmd->add_option("--trace", trace_path)->required();
    render_cmd->add_option("--svg", svg_path)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) return cmd_check(scenario_path, json_path, capacity);
        if (construct->parsed()) return cmd_construct(scenario_path, out_path);
        if (simulate->parsed())
            return cmd_simulate(scenario_path, checkpoint_path, trace_path, svg_path, seed);
        if (train_cmd->parsed())
            return cmd_train(scenario_path, config_path, out_path, csv_path, seed);
        if (eval_cmd->parsed())
            return cmd_eval(scenario_path, method, checkpoint_path, trials, seed, csv_path,
                            json_path);
        if (baseline_cmd->parsed()) return cmd_baseline(scenario_path, out_path, rounds, seed);
        if (render_cmd->parsed()) return cmd_render(trace_path, svg_path);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
    return kExitConfig;
}
