#include "envopt/completeness.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "envopt/errors.hpp"
#include "envopt/grid_path.hpp"

namespace envopt {

using nlohmann::json;

std::string CompletenessReport::to_json() const {
    json j;
    j["kind"] = kind;
    j["condition_value"] = condition_value;
    j["threshold"] = threshold;
    j["verdict"] = verdict == Verdict::Pass ? "pass"
                   : verdict == Verdict::Fail ? "fail"
                                              : "not_applicable";
    j["per_agent_bounds"] = per_agent_bounds;
    if (!per_agent_bounds_alt.empty()) j["per_agent_bounds_alt"] = per_agent_bounds_alt;
    j["guaranteed_agents"] = guaranteed_agents;
    if (resource_level >= 0) j["resource_level"] = resource_level;
    j["assumptions"] = {{"separation", assumption_separation},
                        {"obstacle_free_solvable", assumption_obstacle_free_solvable},
                        {"component_distances", assumption_component_distances}};
    if (!note.empty()) j["note"] = note;
    return j.dump(2);
}

namespace {

bool separations_hold(const Scenario& s) {
    double rhat = s.max_agent_radius();
    for (size_t i = 0; i < s.agents.size(); ++i)
        for (size_t j = i + 1; j < s.agents.size(); ++j) {
            if (distance(s.agents[i].start, s.agents[j].start) < 2 * rhat - 1e-9) return false;
            if (distance(s.agents[i].goal, s.agents[j].goal) < 2 * rhat - 1e-9) return false;
        }
    return true;
}

RegionComponent whole_region(const Region& r) {
    return RegionComponent{r.cells, r.rects, r.disks};
}

// Per-agent component distances for the prioritized conditions:
// first agent's start-to-goal span, then for each later agent the closest
// higher-priority component in the start and goal regions.
struct PrioritizedDistances {
    double d_a1 = 0.0;
    std::vector<double> d_start;  // index i >= 1
    std::vector<double> d_goal;
};

PrioritizedDistances prioritized_distances(const Scenario& s, const ComponentDecomposition& d) {
    int n = int(s.agents.size());
    PrioritizedDistances out;
    out.d_start.assign(n, 0.0);
    out.d_goal.assign(n, 0.0);
    if (n == 0) return out;
    if (d.num_start() == 0 || d.num_goal() == 0)
        throw ConfigError("prioritized check requires nonempty start and goal regions");
    out.d_a1 = d.dist_start_goal[d.start_membership[0]][d.goal_membership[0]];
    for (int i = 1; i < n; ++i) {
        double best_s = std::numeric_limits<double>::infinity();
        double best_g = std::numeric_limits<double>::infinity();
        for (int j = 0; j < i; ++j) {
            best_s = std::min(best_s, d.dist_start[d.start_membership[i]][d.start_membership[j]]);
            best_g = std::min(best_g, d.dist_goal[d.goal_membership[i]][d.goal_membership[j]]);
        }
        out.d_start[i] = best_s;
        out.d_goal[i] = best_g;
    }
    return out;
}

} // namespace

CompletenessReport check_offline_unprioritized(const Scenario& s) {
    CompletenessReport rep;
    rep.kind = "offline_unprioritized";
    rep.assumption_separation = separations_hold(s);

    int n = int(s.agents.size());
    double rhat = s.max_agent_radius();
    double dmax = 0.0;
    if (!s.start_region.empty() && !s.goal_region.empty())
        dmax = component_max_distance(whole_region(s.start_region), whole_region(s.goal_region), s);

    rep.condition_value = free_area(s);
    rep.threshold = 2.0 * n * dmax * rhat;
    if (!rep.assumption_separation) {
        rep.verdict = Verdict::NotApplicable;
        rep.note = "start/goal separations below twice the maximal radius";
        return rep;
    }
    rep.verdict = rep.condition_value >= rep.threshold - 1e-12 ? Verdict::Pass : Verdict::Fail;
    if (rep.verdict == Verdict::Pass)
        for (const auto& a : s.agents) rep.guaranteed_agents.push_back(a.id);
    return rep;
}

CompletenessReport check_online_capacity(const Scenario& s, double capacity,
                                         bool obstacle_free_solvable) {
    CompletenessReport rep;
    rep.kind = "online_capacity";
    rep.assumption_obstacle_free_solvable = obstacle_free_solvable;

    int n = int(s.agents.size());
    double rhat = s.max_agent_radius();
    rep.condition_value = capacity;
    rep.threshold = 2.0 * n * rhat * s.max_speed;

    if (!obstacle_free_solvable) {
        rep.verdict = Verdict::NotApplicable;
        rep.note = "caller did not assert solvability of the obstacle-free scene";
        return rep;
    }
    double free = 0.0;
    try {
        free = free_area(s);
    } catch (const InvalidScenario& e) {
        rep.verdict = Verdict::Fail;
        rep.note = e.what();
        return rep;
    }
    if (n > 0 && free <= 0.0) {
        rep.verdict = Verdict::Fail;
        rep.note = "no free space to relocate obstacles through";
        return rep;
    }
    rep.verdict = capacity >= rep.threshold - 1e-12 ? Verdict::Pass : Verdict::Fail;
    if (rep.verdict == Verdict::Pass)
        for (const auto& a : s.agents) rep.guaranteed_agents.push_back(a.id);
    return rep;
}

CompletenessReport check_offline_prioritized(const Scenario& s, const ComponentDecomposition& d) {
    CompletenessReport rep;
    rep.kind = "offline_prioritized";
    rep.assumption_separation = separations_hold(s);
    rep.assumption_component_distances = d.start_goal_separated;

    int n = int(s.agents.size());
    double rhat = s.max_agent_radius();
    rep.condition_value = free_area(s);

    if (n == 0) {
        rep.threshold = 0.0;
        rep.verdict = Verdict::Pass;
        return rep;
    }
    auto pd = prioritized_distances(s, d);
    double sum = pd.d_a1;
    for (int i = 1; i < n; ++i) sum += pd.d_start[i] + pd.d_goal[i];
    rep.threshold = 2.0 * rhat * sum;

    // Distance bounds, cumulative over higher-priority agents; the _alt
    // variant repeats agent i's own component distances i-1 times instead
    // (the two readings coincide whenever all component distances match).
    double acc = pd.d_a1;
    for (int i = 0; i < n; ++i) {
        if (i >= 1) acc += pd.d_start[i] + pd.d_goal[i];
        rep.per_agent_bounds.push_back(acc);
        rep.per_agent_bounds_alt.push_back(pd.d_a1 + double(i) * (pd.d_start[i] + pd.d_goal[i]));
    }

    if (!rep.assumption_separation || !rep.assumption_component_distances) {
        rep.verdict = Verdict::NotApplicable;
        rep.note = !rep.assumption_separation
                       ? "start/goal separations below twice the maximal radius"
                       : "component distances violate the separation ordering";
        return rep;
    }
    rep.verdict = rep.condition_value >= rep.threshold - 1e-12 ? Verdict::Pass : Verdict::Fail;
    if (rep.verdict == Verdict::Pass)
        for (const auto& a : s.agents) rep.guaranteed_agents.push_back(a.id);
    return rep;
}

PartialGuarantee partial_offline_guarantee(const Scenario& s, const ComponentDecomposition& d) {
    PartialGuarantee out;
    int n = int(s.agents.size());
    if (n == 0) return out;
    auto pd = prioritized_distances(s, d);
    double rhat = s.max_agent_radius();
    double free = free_area(s);

    double acc = pd.d_a1;
    for (int b = 1; b <= n; ++b) {
        if (b >= 2) acc += pd.d_start[b - 1] + pd.d_goal[b - 1];
        out.thresholds.push_back(2.0 * rhat * acc);
    }
    int b = 0;
    for (int k = 1; k <= n; ++k)
        if (free >= out.thresholds[k - 1] - 1e-12) b = k;
    out.b = b;
    if (b == 0) return out;

    std::set<int> covered;
    for (int i = 0; i < b; ++i) covered.insert(i);
    for (int j = b; j < n; ++j) {
        for (int i = 0; i < b; ++i) {
            if (d.start_membership[j] == d.start_membership[i] &&
                d.goal_membership[j] == d.goal_membership[i]) {
                covered.insert(j);
                break;
            }
        }
    }
    for (int idx : covered) out.guaranteed_ids.push_back(s.agents[idx].id);
    std::sort(out.guaranteed_ids.begin(), out.guaranteed_ids.end());
    return out;
}

long long slice_budget(long long h1, double rho1, double rho_i) {
    double v = double(h1) * rho1 / rho_i;
    double r = std::round(v);
    if (std::abs(v - r) < 1e-9 * std::max(1.0, std::abs(r))) return (long long)(r);
    return (long long)(std::ceil(v));
}

namespace {

// Capacity available to the first `i` agents within their budgets: slices
// grouped by how many of those agents are still eligible.
long long prefix_capacity(std::span<const long long> budgets, int i, int b) {
    long long cap = 0;
    for (int j = 1; j <= i; ++j) {
        long long hi = budgets[i - j];                 // H_{i+1-j}
        long long lo = j == i ? 0 : budgets[i - j - 1];  // H_{i-j}, empty prefix is 0
        cap += (long long)(std::min(j, b)) * (hi - lo);
    }
    return cap;
}

bool budgets_feasible(std::span<const long long> budgets, int n, int b, int subtasks) {
    for (int i = 1; i <= n; ++i)
        if (prefix_capacity(budgets, i, b) < (long long)(i) * subtasks) return false;
    return true;
}

} // namespace

ScheduleResult prioritized_online_schedule(std::span<const double> priorities, int b, int subtasks,
                                           double dt) {
    int n = int(priorities.size());
    if (n == 0) throw ConfigError("schedule: no agents");
    for (int i = 0; i < n; ++i) {
        if (priorities[i] <= 0.0) throw ConfigError("schedule: priorities must be positive");
        if (i > 0 && priorities[i] > priorities[i - 1] + 1e-12)
            throw ConfigError("schedule: priorities must be non-increasing");
    }
    if (b < 1 || b > n) throw ConfigError("schedule: capacity b must satisfy 1 <= b <= n");
    if (subtasks < 1) throw ConfigError("schedule: subtask count must be positive");

    constexpr long long kSearchCap = 1000000;
    ScheduleResult out;
    out.subtask_count = subtasks;

    std::vector<long long> budgets(n);
    long long h1 = subtasks;
    for (;; ++h1) {
        if (h1 > kSearchCap) throw ConfigError("schedule: no feasible H_1 within search cap");
        for (int i = 0; i < n; ++i) budgets[i] = slice_budget(h1, priorities[0], priorities[i]);
        if (budgets_feasible(budgets, n, b, subtasks)) break;
    }
    out.h1 = h1;
    out.slice_budgets = budgets;
    out.time_constant = 2.0 * double(h1) * priorities[0] * dt;
    for (int i = 0; i < n; ++i) out.time_bounds.push_back(2.0 * double(budgets[i]) * dt);

    // Least laxity first (slack = slices left before the budget closes minus
    // work left), deadline to break ties; exact for slotted service with b
    // servers and all work released at slice 1.
    std::vector<int> remaining(n, subtasks);
    long long horizon = budgets[n - 1];
    out.selection.assign(size_t(horizon), {});
    for (long long slice = 1; slice <= horizon; ++slice) {
        std::vector<int> eligible;
        for (int i = 0; i < n; ++i)
            if (remaining[i] > 0 && slice <= budgets[i]) eligible.push_back(i);
        auto laxity = [&](int i) { return budgets[i] - slice + 1 - remaining[i]; };
        std::sort(eligible.begin(), eligible.end(), [&](int a, int c) {
            if (laxity(a) != laxity(c)) return laxity(a) < laxity(c);
            if (budgets[a] != budgets[c]) return budgets[a] < budgets[c];
            return a < c;
        });
        auto& slot = out.selection[size_t(slice - 1)];
        for (int k = 0; k < int(eligible.size()) && k < b; ++k) {
            slot.push_back(eligible[k]);
            remaining[eligible[k]] -= 1;
        }
    }
    for (int i = 0; i < n; ++i)
        if (remaining[i] != 0)
            throw std::logic_error("schedule: greedy selection failed despite feasible budgets");
    return out;
}

int max_guaranteed_count(double t_max, double t_total, std::span<const double> priorities, int b) {
    int n = int(priorities.size());
    if (n == 0 || t_max <= 0.0 || t_total <= 0.0 || b < 1) return 0;
    double scale = t_max / (2.0 * t_total);
    for (int eta = n; eta >= 1; --eta) {
        // The deadline cap fixes agent 1's slice budget (normalized by the
        // sub-task count); below 1 even the top agent cannot be served.
        double h1_cap = scale * priorities[eta - 1] / priorities[0];
        if (h1_cap < 1.0 - 1e-9) continue;
        // Every priority prefix must fit within the capped budgets; the
        // i = eta case is the headline inequality.
        bool ok = true;
        for (int i = 1; i <= eta && ok; ++i) {
            double lhs = 0.0;
            for (int j = 1; j <= i; ++j) {
                double hi = priorities[eta - 1] / priorities[i - j];  // rho_eta / rho_{i+1-j}
                double lo = j == i ? 0.0 : priorities[eta - 1] / priorities[i - j - 1];
                lhs += std::min(j, b) * scale * (hi - lo);
            }
            ok = lhs >= double(i) - 1e-9;
        }
        if (ok) return eta;
    }
    return 0;
}

LayoutResult construct_wellformed_layout(const Scenario& s) {
    LayoutResult out;
    out.obstacles = s.obstacles;
    if (s.mode != Mode::OfflineDiscrete) {
        out.reason = "layout construction operates on discrete scenes";
        return out;
    }
    const int w = s.grid_width();
    const int h = s.grid_height();
    const int n = int(s.agents.size());
    auto idx = [&](GridCell c) { return size_t(c.x) + size_t(c.y) * w; };

    int corridor_w = std::max(1, int(std::ceil(2.0 * s.max_agent_radius() / s.cell_size() - 1e-9)));
    int dilation = corridor_w / 2;

    std::vector<uint8_t> obstacle_mask(size_t(w) * h, 0);
    for (const auto& c : s.all_obstacle_cells())
        if (s.in_grid(c)) obstacle_mask[idx(c)] = 1;

    std::vector<GridCell> starts, goals;
    for (const auto& a : s.agents) {
        starts.push_back(s.cell_of(a.start));
        goals.push_back(s.cell_of(a.goal));
    }

    // Identity shortcut: nothing to do when every agent already has an
    // obstacle-free path that keeps clear of the other endpoints.
    {
        bool all_clear = true;
        for (int i = 0; i < n && all_clear; ++i) {
            auto blocked = obstacle_mask;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                blocked[idx(starts[j])] = 1;
                blocked[idx(goals[j])] = 1;
            }
            if (!grid_shortest_cells(blocked, w, h, starts[i], goals[i])) all_clear = false;
        }
        if (all_clear) {
            out.feasible = true;
            return out;
        }
    }

    // Reserve a corridor per agent in priority order. Planning ignores
    // obstacles (they can be relocated) but weights them so corridors prefer
    // free cells, and prefers rejoining cells already reserved.
    std::vector<uint8_t> reserved(size_t(w) * h, 0);
    for (int i = 0; i < n; ++i) {
        std::vector<uint8_t> blocked(size_t(w) * h, 0);
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            blocked[idx(starts[j])] = 1;
            blocked[idx(goals[j])] = 1;
        }
        std::vector<double> weight(size_t(w) * h, 0.01);
        for (size_t k = 0; k < weight.size(); ++k) {
            if (obstacle_mask[k]) weight[k] = 10.0;
            else if (reserved[k]) weight[k] = 0.0;
        }
        auto corridor = grid_cheapest_cells(blocked, weight, w, h, starts[i], goals[i]);
        if (!corridor) {
            out.reason = "no corridor for agent " + std::to_string(s.agents[i].id) +
                         " avoiding the other endpoints";
            return out;
        }
        for (const auto& c : *corridor) {
            for (int dx = -dilation; dx <= dilation; ++dx)
                for (int dy = -dilation; dy <= dilation; ++dy) {
                    GridCell cc{c.x + dx, c.y + dy};
                    if (s.in_grid(cc)) reserved[idx(cc)] = 1;
                }
        }
    }

    // Relocate every obstacle that intersects a reserved corridor to a
    // placement fully off the corridors, regions and endpoints.
    std::set<GridCell> keepout(s.start_region.cells.begin(), s.start_region.cells.end());
    keepout.insert(s.goal_region.cells.begin(), s.goal_region.cells.end());
    for (int i = 0; i < n; ++i) {
        keepout.insert(starts[i]);
        keepout.insert(goals[i]);
    }

    std::set<GridCell> occupied;  // cells of obstacles in their final placement
    std::vector<int> displaced;
    for (size_t j = 0; j < out.obstacles.size(); ++j) {
        bool hit = false;
        for (const auto& c : s.obstacle_cells(out.obstacles[j]))
            if (reserved[idx(c)]) hit = true;
        if (hit)
            displaced.push_back(int(j));
        else
            for (const auto& c : s.obstacle_cells(out.obstacles[j])) occupied.insert(c);
    }

    for (int j : displaced) {
        bool placed = false;
        for (int cy = 0; cy < h && !placed; ++cy) {
            for (int cx = 0; cx < w && !placed; ++cx) {
                ObstacleSpec candidate = out.obstacles[j];
                candidate.position = s.cell_center({cx, cy});
                bool ok = true;
                for (const auto& c : s.obstacle_cells(candidate)) {
                    if (!s.in_grid(c) || reserved[idx(c)] || keepout.count(c) ||
                        occupied.count(c)) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    out.obstacles[j] = candidate;
                    for (const auto& c : s.obstacle_cells(candidate)) occupied.insert(c);
                    placed = true;
                }
            }
        }
        if (!placed) {
            out.obstacles = s.obstacles;
            out.reason = "insufficient free space to relocate obstacle " +
                         std::to_string(s.obstacles[j].id);
            return out;
        }
        out.relocated += 1;
    }

    // Post-verify with the plain path search on the rebuilt scene.
    Scenario rebuilt = s;
    rebuilt.obstacles = out.obstacles;
    for (const auto& a : s.agents) {
        if (!shortest_path(rebuilt, a.start, a.goal)) {
            out.obstacles = s.obstacles;
            out.relocated = 0;
            out.reason = "discretization gap: no path for agent " + std::to_string(a.id) +
                         " after relocation";
            return out;
        }
    }
    out.feasible = true;
    return out;
}

} // namespace envopt
