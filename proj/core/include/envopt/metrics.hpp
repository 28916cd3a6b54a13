#pragma once

#include <span>
#include <vector>

#include "envopt/episode.hpp"
#include "envopt/scenario.hpp"

namespace envopt {

struct Metrics {
    double spl = 0.0;
    std::vector<double> pct_speed;       // per agent, in [0,1]
    double pct_speed_mean = 0.0;
    std::vector<double> distance_ratio;  // per agent, clamped to <= 1
    double distance_ratio_mean = 0.0;
    std::vector<uint8_t> success;
    double success_rate = 0.0;
    std::vector<int> navigation_time;
};

// Success weighted by path length: (1/n) sum_i S_i * l_i / max(p_i, l_i).
double spl(std::span<const uint8_t> success, std::span<const double> shortest_lengths,
           std::span<const double> traveled_lengths);

// Mean of |v|/max_speed over the agent's pre-arrival steps; 0 with no steps.
std::vector<double> pct_speed(const EpisodeTrace& trace, double max_speed);

// Reference-to-traveled length ratios, clamped to <= 1. Traveled lengths are
// capped at max_steps * max_speed; an agent that never moved scores 0 unless
// its reference length is 0.
std::vector<double> distance_ratio(const EpisodeTrace& trace, const Scenario& s,
                                   std::span<const double> shortest_lengths);

// Obstacle-avoiding reference lengths on `reference` (usually the scene before
// any layout change); falls back to the straight-line distance when a goal is
// unreachable on the reference grid.
std::vector<double> reference_lengths(const Scenario& reference);

// All of the above for one episode.
Metrics compute_metrics(const EpisodeTrace& trace, const Scenario& s,
                        const Scenario& reference);

} // namespace envopt
