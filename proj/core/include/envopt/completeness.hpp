#pragma once

#include <span>
#include <string>
#include <vector>

#include "envopt/components.hpp"
#include "envopt/scenario.hpp"

namespace envopt {

enum class Verdict { Pass, Fail, NotApplicable };

// Outcome of one feasibility condition: the measured quantity, the bound it
// is compared against (pass means condition_value >= threshold), per-agent
// performance bounds where the condition implies any, and which structural
// assumptions held.
struct CompletenessReport {
    std::string kind;
    double condition_value = 0.0;
    double threshold = 0.0;
    Verdict verdict = Verdict::Fail;
    std::vector<double> per_agent_bounds;      // distance bounds C_i or time bounds T_i
    std::vector<double> per_agent_bounds_alt;  // alternative summand reading, see note
    std::vector<int> guaranteed_agents;        // agent ids covered by the verdict
    int resource_level = -1;                   // b, where applicable
    bool assumption_separation = true;         // start/goal placement separations hold
    bool assumption_obstacle_free_solvable = true;  // caller-asserted empty-scene solvability
    bool assumption_component_distances = true;     // intra-region << inter-region distances
    std::string note;

    std::string to_json() const;
};

// Free area >= 2 n d_max r_max, with d_max the farthest start-to-goal region
// distance. Placement separations below 2 r_max make the check inapplicable.
CompletenessReport check_offline_unprioritized(const Scenario& s);

// Relocation capacity (area per step) >= 2 n r_max v_max. Also requires
// obstacles disjoint from the start/goal regions and nonempty free space.
CompletenessReport check_online_capacity(const Scenario& s, double capacity,
                                         bool obstacle_free_solvable = true);

// Priority-ordered free-area condition over region components:
//   free >= 2 d_{A1} r + sum_{i>=2} 2 (d_{Ai,S} + d_{Ai,D}) r
// with d_{Ai,S} the smallest farthest-distance from agent i's start component
// to a higher-priority agent's start component (0 when shared). Emits the
// distance bounds C_i; per_agent_bounds_alt carries the reading where the
// summand is indexed by the outer agent instead of the summation index.
CompletenessReport check_offline_prioritized(const Scenario& s,
                                             const ComponentDecomposition& d);

struct PartialGuarantee {
    int b = 0;                        // number of top-priority agents covered
    std::vector<int> guaranteed_ids;  // those agents plus component-sharing tails
    std::vector<double> thresholds;   // free-area threshold per b = 1..n
};

// Largest b whose free-area band is met, plus lower-priority agents sharing
// both components with a covered agent.
PartialGuarantee partial_offline_guarantee(const Scenario& s, const ComponentDecomposition& d);

struct ScheduleResult {
    int subtask_count = 0;                    // H
    long long h1 = 0;                         // minimal slice budget of agent 1
    std::vector<long long> slice_budgets;     // H_i = ceil(H_1 rho_1 / rho_i)
    std::vector<std::vector<int>> selection;  // per slice: agent indices served (<= b)
    double time_constant = 0.0;               // C_T = 2 H_1 rho_1 dt
    std::vector<double> time_bounds;          // T_i = 2 H_i dt
};

// Slice budget of agent i given agent 1's budget (safe integer ceiling).
long long slice_budget(long long h1, double rho1, double rho_i);

// Time-sliced service schedule: finds the minimal H_1 >= H such that every
// priority prefix {1..i} can be served H times within its budgets with at
// most b selections per slice, then emits a feasible selection
// (earliest-deadline-first). Throws ConfigError on non-positive priorities or
// when no H_1 below the search cap works.
ScheduleResult prioritized_online_schedule(std::span<const double> priorities, int b, int subtasks,
                                           double dt);

// Largest eta <= n of top-priority agents that can finish within t_max given
// per-task time t_total and per-slice capacity b:
//   sum_{j=1..eta} min(j,b) (t_max rho_eta / (2 t rho_{eta+1-j})
//                            - t_max rho_eta / (2 t rho_{eta-j})) >= eta
// with 1/rho_0 treated as 0.
int max_guaranteed_count(double t_max, double t_total, std::span<const double> priorities, int b);

struct LayoutResult {
    bool feasible = false;
    std::vector<ObstacleSpec> obstacles;  // same shapes/ids, new anchors
    int relocated = 0;
    std::string reason;
};

// Rearranges the obstacle cells (obstacle count and footprints preserved) so
// that every agent, in priority order, has an obstacle-free grid path from
// start to goal that avoids the other agents' endpoint cells. Corridors of
// width ceil(2 r_max / cell) are reserved per agent; displaced obstacles are
// relocated to free cells off every corridor. Returns an infeasible result
// (never throws) when the relocation cannot be placed.
LayoutResult construct_wellformed_layout(const Scenario& s);

} // namespace envopt
