#include "envopt/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <set>

#include <json.hpp>

#include "envopt/baseline.hpp"
#include "envopt/checkpoint.hpp"
#include "envopt/env.hpp"
#include "envopt/errors.hpp"

namespace envopt {

using nlohmann::json;

std::string method_name(ExperimentConfig::Method m) {
    switch (m) {
        case ExperimentConfig::Method::None: return "none";
        case ExperimentConfig::Method::Heuristic: return "heuristic";
        case ExperimentConfig::Method::Learned: return "learned";
    }
    return "none";
}

namespace {

Scenario randomize_discrete(const Scenario& base, Rng& rng) {
    Scenario s = base;
    const int w = s.grid_width();
    const int h = s.grid_height();
    const int n = int(s.agents.size());

    for (int attempt = 0; attempt < 10000; ++attempt) {
        std::set<GridCell> used;
        auto draw_cell = [&]() -> std::optional<GridCell> {
            for (int tries = 0; tries < 64; ++tries) {
                GridCell c{rng.uniform_int(w), rng.uniform_int(h)};
                if (!used.count(c)) return c;
            }
            return std::nullopt;
        };

        bool ok = true;
        std::vector<GridCell> starts, goals;
        for (int i = 0; i < n && ok; ++i) {
            auto c = draw_cell();
            if (!c) ok = false;
            else {
                used.insert(*c);
                starts.push_back(*c);
            }
        }
        for (int i = 0; i < n && ok; ++i) {
            auto c = draw_cell();
            if (!c) ok = false;
            else {
                used.insert(*c);
                goals.push_back(*c);
            }
        }
        std::vector<Vec2> anchors;
        for (size_t j = 0; j < s.obstacles.size() && ok; ++j) {
            auto c = draw_cell();
            if (!c) ok = false;
            else {
                used.insert(*c);
                anchors.push_back(s.cell_center(*c));
            }
        }
        if (!ok) continue;

        // Center separations: distinct cells give at least one cell size.
        double rhat = s.max_agent_radius();
        if (2.0 * rhat > s.cell_size() + 1e-12) {
            bool sep = true;
            for (int i = 0; i < n && sep; ++i)
                for (int j = i + 1; j < n && sep; ++j) {
                    if (distance(s.cell_center(starts[i]), s.cell_center(starts[j])) <
                            2 * rhat - 1e-9 ||
                        distance(s.cell_center(goals[i]), s.cell_center(goals[j])) <
                            2 * rhat - 1e-9)
                        sep = false;
                }
            if (!sep) continue;
        }

        for (int i = 0; i < n; ++i) {
            s.agents[i].start = s.cell_center(starts[i]);
            s.agents[i].goal = s.cell_center(goals[i]);
        }
        for (size_t j = 0; j < s.obstacles.size(); ++j) s.obstacles[j].position = anchors[j];
        s.start_region.cells = starts;
        s.goal_region.cells = goals;
        validate_scenario(s);
        return s;
    }
    throw ConfigError("placement sampling failed; scene too crowded");
}

Scenario randomize_continuous(const Scenario& base, Rng& rng) {
    Scenario s = base;
    const int n = int(s.agents.size());
    double rhat = s.max_agent_radius();

    for (int attempt = 0; attempt < 10000; ++attempt) {
        auto draw = [&](double margin) {
            return Vec2{rng.uniform(margin, s.width - margin),
                        rng.uniform(margin, s.height - margin)};
        };
        std::vector<Vec2> starts, goals;
        bool ok = true;
        auto far_from = [&](const Vec2& p, const std::vector<Vec2>& others, double min_d) {
            for (const auto& o : others)
                if (distance(p, o) < min_d) return false;
            return true;
        };
        for (int i = 0; i < n && ok; ++i) {
            bool placed = false;
            for (int tries = 0; tries < 64; ++tries) {
                Vec2 p = draw(rhat);
                if (far_from(p, starts, 2 * rhat)) {
                    starts.push_back(p);
                    placed = true;
                    break;
                }
            }
            ok = placed;
        }
        for (int i = 0; i < n && ok; ++i) {
            bool placed = false;
            for (int tries = 0; tries < 64; ++tries) {
                Vec2 p = draw(rhat);
                if (far_from(p, goals, 2 * rhat) && distance(p, starts[i]) > 2 * rhat) {
                    goals.push_back(p);
                    placed = true;
                    break;
                }
            }
            ok = placed;
        }
        if (!ok) continue;

        std::vector<Rect> placed_rects;
        std::vector<Vec2> anchors;
        for (const auto& ob : s.obstacles) {
            if (!ok) break;
            const auto& rs = ob.rect_shape();
            bool placed = false;
            for (int tries = 0; tries < 128; ++tries) {
                Vec2 p = draw(std::max(rs.width, rs.height) * 0.5);
                Rect r = Rect::from_center(p, rs.width, rs.height);
                bool clear = true;
                for (const auto& q : placed_rects)
                    if (r.overlaps(q)) clear = false;
                for (int i = 0; i < n && clear; ++i) {
                    if (disk_rect_overlap(starts[i], s.agents[i].radius, r) ||
                        disk_rect_overlap(goals[i], s.agents[i].radius, r))
                        clear = false;
                }
                if (clear) {
                    placed_rects.push_back(r);
                    anchors.push_back(p);
                    placed = true;
                    break;
                }
            }
            ok = placed;
        }
        if (!ok) continue;

        for (int i = 0; i < n; ++i) {
            s.agents[i].start = starts[i];
            s.agents[i].goal = goals[i];
        }
        for (size_t j = 0; j < s.obstacles.size(); ++j) s.obstacles[j].position = anchors[j];
        s.start_region = {};
        s.goal_region = {};
        for (int i = 0; i < n; ++i) {
            s.start_region.disks.push_back({starts[i], s.agents[i].radius});
            s.goal_region.disks.push_back({goals[i], s.agents[i].radius});
        }
        try {
            validate_scenario(s);
        } catch (const InvalidScenario&) {
            continue;
        }
        return s;
    }
    throw ConfigError("placement sampling failed; scene too crowded");
}

Metrics run_trial(const Scenario& base, const ExperimentConfig& cfg, const Checkpoint* ck,
                  uint64_t trial_seed) {
    Rng rng(trial_seed);
    Scenario scene = cfg.randomize ? randomize_scenario(base, rng) : base;

    SimulationOptions sim;
    sim.planner = cfg.planner;
    sim.constraints = cfg.constraints;
    sim.capacity_per_step = cfg.capacity_per_step;

    EpisodeTrace trace;
    Scenario navigated = scene;
    if (scene.mode == Mode::OfflineDiscrete) {
        switch (cfg.method) {
            case ExperimentConfig::Method::None: break;
            case ExperimentConfig::Method::Heuristic: {
                navigated = heuristic_baseline(scene, cfg.max_rounds, rng);
                break;
            }
            case ExperimentConfig::Method::Learned: {
                if (ck->policy_kind != "grid")
                    throw ConfigError("discrete scenes need a grid-policy checkpoint");
                GridPolicy policy(grid_config_from_json(ck->arch));
                RewardConfig rewards = RewardConfig::defaults_for(scene);
                rewards.max_round = cfg.max_rounds;
                navigated = optimize_layout_with_policy(scene, policy, ck->theta, cfg.greedy_eval,
                                                        Rng::derive(trial_seed, 1), rewards);
                break;
            }
        }
        trace = simulate_navigation(navigated, nullptr, sim);
    } else {
        ObstaclePolicyFn fn = nullptr;
        if (cfg.method == ExperimentConfig::Method::Heuristic)
            throw ConfigError("the layout heuristic is centralized and offline; "
                              "continuous scenes support none/learned");
        if (cfg.method == ExperimentConfig::Method::Learned) {
            if (ck->policy_kind != "gnn")
                throw ConfigError("continuous scenes need a graph-policy checkpoint");
            GnnPolicy policy(gnn_config_from_json(ck->arch));
            fn = gnn_obstacle_policy(std::move(policy), ck->theta, 2.0, cfg.greedy_eval,
                                     Rng::derive(trial_seed, 2));
        }
        trace = simulate_navigation(scene, fn, sim);
    }
    // Reference lengths come from the pre-optimization scene so methods stay
    // comparable within a trial.
    return compute_metrics(trace, navigated, scene);
}

Aggregate aggregate_of(const std::vector<double>& xs) {
    Aggregate a;
    if (xs.empty()) return a;
    for (double x : xs) a.mean += x;
    a.mean /= double(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - a.mean) * (x - a.mean);
        a.stddev = std::sqrt(ss / double(xs.size() - 1));
    }
    return a;
}

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

void write_csv(const std::string& path, const std::string& method,
               const std::vector<TrialResult>& rows, int n_agents) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write experiment CSV: " + path);
    out << "method,trial,seed,success_rate,spl,pct_speed_mean,distance_ratio_mean";
    for (int i = 1; i <= n_agents; ++i) out << ",pct_speed_" << i;
    for (int i = 1; i <= n_agents; ++i) out << ",distance_ratio_" << i;
    for (int i = 1; i <= n_agents; ++i) out << ",success_" << i;
    for (int i = 1; i <= n_agents; ++i) out << ",navigation_time_" << i;
    out << "\n";
    for (const auto& r : rows) {
        out << method << "," << r.trial << "," << r.seed << "," << fmt6(r.metrics.success_rate)
            << "," << fmt6(r.metrics.spl) << "," << fmt6(r.metrics.pct_speed_mean) << ","
            << fmt6(r.metrics.distance_ratio_mean);
        for (double v : r.metrics.pct_speed) out << "," << fmt6(v);
        for (double v : r.metrics.distance_ratio) out << "," << fmt6(v);
        for (auto v : r.metrics.success) out << "," << int(v);
        for (int v : r.metrics.navigation_time) out << "," << v;
        out << "\n";
    }
}

} // namespace

Scenario randomize_scenario(const Scenario& base, Rng& rng) {
    return base.mode == Mode::OfflineDiscrete ? randomize_discrete(base, rng)
                                              : randomize_continuous(base, rng);
}

std::string ExperimentSummary::to_json() const {
    json j;
    j["method"] = method;
    j["trials"] = trials;
    auto agg = [](const Aggregate& a) { return json{{"mean", a.mean}, {"std", a.stddev}}; };
    j["spl"] = agg(spl);
    j["pct_speed"] = agg(pct_speed);
    j["distance_ratio"] = agg(distance_ratio);
    j["success_rate"] = agg(success_rate);
    json pa = json::array(), pr = json::array(), ps = json::array();
    for (const auto& a : per_agent_pct_speed) pa.push_back(agg(a));
    for (const auto& a : per_agent_distance_ratio) pr.push_back(agg(a));
    for (const auto& a : per_agent_success) ps.push_back(agg(a));
    j["per_agent_pct_speed"] = pa;
    j["per_agent_distance_ratio"] = pr;
    j["per_agent_success"] = ps;
    return j.dump(2);
}

ExperimentSummary run_experiment(const Scenario& base, const ExperimentConfig& cfg) {
    if (cfg.trials < 1) throw ConfigError("experiment needs at least one trial");
    if (cfg.method == ExperimentConfig::Method::Learned && cfg.checkpoint_path.empty())
        throw ConfigError("method=learned requires a checkpoint");

    ExperimentSummary summary;
    summary.method = method_name(cfg.method);
    summary.trials = cfg.trials;

    std::optional<Checkpoint> ck;
    if (cfg.method == ExperimentConfig::Method::Learned)
        ck = load_checkpoint(cfg.checkpoint_path);
    const Checkpoint* ck_ptr = ck ? &*ck : nullptr;

    std::vector<std::future<Metrics>> futures;
    std::vector<uint64_t> seeds;
    for (int t = 0; t < cfg.trials; ++t) {
        uint64_t ts = Rng::derive(cfg.seed, uint64_t(t));
        seeds.push_back(ts);
        futures.push_back(std::async(std::launch::async, [&base, &cfg, ck_ptr, ts] {
            return run_trial(base, cfg, ck_ptr, ts);
        }));
    }
    for (int t = 0; t < cfg.trials; ++t)
        summary.rows.push_back({t, seeds[size_t(t)], futures[size_t(t)].get()});

    int n = int(base.agents.size());
    std::vector<double> spls, pcts, ratios, succ;
    std::vector<std::vector<double>> pa(n), pr(n), ps(n);
    for (const auto& r : summary.rows) {
        spls.push_back(r.metrics.spl);
        pcts.push_back(r.metrics.pct_speed_mean);
        ratios.push_back(r.metrics.distance_ratio_mean);
        succ.push_back(r.metrics.success_rate);
        for (int i = 0; i < n; ++i) {
            pa[i].push_back(r.metrics.pct_speed[i]);
            pr[i].push_back(r.metrics.distance_ratio[i]);
            ps[i].push_back(r.metrics.success[i] ? 1.0 : 0.0);
        }
    }
    summary.spl = aggregate_of(spls);
    summary.pct_speed = aggregate_of(pcts);
    summary.distance_ratio = aggregate_of(ratios);
    summary.success_rate = aggregate_of(succ);
    for (int i = 0; i < n; ++i) {
        summary.per_agent_pct_speed.push_back(aggregate_of(pa[i]));
        summary.per_agent_distance_ratio.push_back(aggregate_of(pr[i]));
        summary.per_agent_success.push_back(aggregate_of(ps[i]));
    }

    if (!cfg.csv_path.empty()) write_csv(cfg.csv_path, summary.method, summary.rows, n);
    if (!cfg.json_path.empty()) {
        std::ofstream out(cfg.json_path);
        if (!out) throw ConfigError("cannot write experiment summary: " + cfg.json_path);
        out << summary.to_json() << "\n";
    }
    return summary;
}

} // namespace envopt
