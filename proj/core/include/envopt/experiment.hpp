#pragma once

#include <optional>
#include <string>
#include <vector>

#include "envopt/episode.hpp"
#include "envopt/metrics.hpp"
#include "envopt/random.hpp"
#include "envopt/scenario.hpp"

namespace envopt {

struct ExperimentConfig {
    enum class Method { None, Heuristic, Learned };
    Method method = Method::None;
    std::string checkpoint_path;  // required for Method::Learned
    int trials = 20;
    uint64_t seed = 0;
    bool randomize = true;  // fresh placements per trial
    PlannerConfig planner;
    std::vector<ConstraintSpec> constraints;
    std::optional<double> capacity_per_step;
    int max_rounds = 8;      // layout-change budget for heuristic/learned (discrete)
    bool greedy_eval = true; // learned policies act on the distribution mode
    std::string csv_path;
    std::string json_path;
};

struct TrialResult {
    int trial = 0;
    uint64_t seed = 0;
    Metrics metrics;
};

struct Aggregate {
    double mean = 0.0;
    double stddev = 0.0;
};

struct ExperimentSummary {
    std::string method;
    int trials = 0;
    std::vector<TrialResult> rows;
    Aggregate spl;
    Aggregate pct_speed;
    Aggregate distance_ratio;
    Aggregate success_rate;
    std::vector<Aggregate> per_agent_pct_speed;       // agents in priority order
    std::vector<Aggregate> per_agent_distance_ratio;
    std::vector<Aggregate> per_agent_success;

    std::string to_json() const;
};

// Fresh agent/obstacle placements on the base geometry: distinct cells in
// discrete scenes, rejection-sampled positions honoring the pairwise
// separation of starts and goals in continuous scenes. Radii, priorities and
// scene limits are kept.
Scenario randomize_scenario(const Scenario& base, Rng& rng);

// Runs the configured method over `trials` seeded placements (parallel
// across a worker pool, deterministic aggregation), writes the per-trial CSV
// and the aggregate JSON summary when paths are set.
ExperimentSummary run_experiment(const Scenario& base, const ExperimentConfig& cfg);

std::string method_name(ExperimentConfig::Method m);

} // namespace envopt
