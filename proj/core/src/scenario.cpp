#include "envopt/scenario.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "envopt/errors.hpp"

namespace envopt {

double Scenario::max_agent_radius() const {
    double r = 0.0;
    for (const auto& a : agents) r = std::max(r, a.radius);
    return r;
}

std::vector<GridCell> Scenario::obstacle_cells(const ObstacleSpec& ob) const {
    std::vector<GridCell> out;
    if (!ob.is_cells()) return out;
    GridCell anchor = cell_of(ob.position);
    for (const auto& off : ob.cells_shape().offsets)
        out.push_back({anchor.x + off.x, anchor.y + off.y});
    return out;
}

std::vector<GridCell> Scenario::all_obstacle_cells() const {
    std::vector<GridCell> out;
    for (const auto& ob : obstacles) {
        auto cs = obstacle_cells(ob);
        out.insert(out.end(), cs.begin(), cs.end());
    }
    return out;
}

Rect Scenario::obstacle_rect(const ObstacleSpec& ob) const {
    if (ob.is_cells()) {
        // Bounding box of the cell set; exact for single-cell obstacles.
        auto cs = obstacle_cells(ob);
        Rect r = cell_rect(cs.front());
        for (const auto& c : cs) {
            Rect cr = cell_rect(c);
            r.lo.x = std::min(r.lo.x, cr.lo.x);
            r.lo.y = std::min(r.lo.y, cr.lo.y);
            r.hi.x = std::max(r.hi.x, cr.hi.x);
            r.hi.y = std::max(r.hi.y, cr.hi.y);
        }
        return r;
    }
    const auto& rs = ob.rect_shape();
    return Rect::from_center(ob.position, rs.width, rs.height);
}

std::vector<Rect> Scenario::obstacle_rects() const {
    std::vector<Rect> out;
    for (const auto& ob : obstacles) {
        if (ob.is_cells()) {
            for (const auto& c : obstacle_cells(ob)) out.push_back(cell_rect(c));
        } else {
            out.push_back(obstacle_rect(ob));
        }
    }
    return out;
}

double region_area(const Region& r, const Scenario& s) {
    double a = 0.0;
    double ca = s.cell_size() * s.cell_size();
    std::set<GridCell> uniq(r.cells.begin(), r.cells.end());
    a += double(uniq.size()) * ca;
    a += rect_union_area(r.rects);
    for (const auto& d : r.disks) a += d.area();
    return a;
}

bool region_contains(const Region& r, const Scenario& s, const Vec2& p) {
    GridCell c = s.cell_of(p);
    for (const auto& rc : r.cells)
        if (rc == c) return true;
    for (const auto& rect : r.rects)
        if (rect.contains(p)) return true;
    for (const auto& d : r.disks)
        if (d.contains(p)) return true;
    return false;
}

namespace {

bool regions_overlap(const Region& a, const Region& b, const Scenario& s) {
    std::set<GridCell> ca(a.cells.begin(), a.cells.end());
    for (const auto& c : b.cells)
        if (ca.count(c)) return true;

    auto rects_of = [&](const Region& r) {
        std::vector<Rect> out = r.rects;
        for (const auto& c : r.cells) out.push_back(s.cell_rect(c));
        return out;
    };
    auto ra = rects_of(a);
    auto rb = rects_of(b);
    for (const auto& x : ra)
        for (const auto& y : rb)
            if (x.overlaps(y)) return true;
    for (const auto& d : a.disks) {
        for (const auto& e : b.disks)
            if (d.overlaps(e)) return true;
        for (const auto& y : rb)
            if (disk_rect_overlap(d.center, d.radius, y)) return true;
    }
    for (const auto& d : b.disks)
        for (const auto& x : ra)
            if (disk_rect_overlap(d.center, d.radius, x)) return true;
    return false;
}

Region obstacle_region(const Scenario& s) {
    Region r;
    if (s.mode == Mode::OfflineDiscrete) {
        r.cells = s.all_obstacle_cells();
    } else {
        for (const auto& ob : s.obstacles) r.rects.push_back(s.obstacle_rect(ob));
    }
    return r;
}

} // namespace

void validate_scenario(const Scenario& s) {
    if (s.max_steps < 1) throw InvalidScenario("max_steps must be >= 1");
    if (s.width <= 0 || s.height <= 0) throw InvalidScenario("bounds must have positive area");
    if (s.grid_resolution <= 0) throw InvalidScenario("grid_resolution must be positive");
    if (s.max_speed <= 0) throw InvalidScenario("max_speed must be positive");

    for (size_t i = 0; i < s.agents.size(); ++i) {
        const auto& a = s.agents[i];
        if (a.radius <= 0)
            throw InvalidScenario("agent " + std::to_string(a.id) + ": radius must be positive");
        if (!a.start.finite() || !a.goal.finite())
            throw InvalidScenario("agent " + std::to_string(a.id) + ": non-finite position");
        if (a.priority <= 0)
            throw InvalidScenario("agent " + std::to_string(a.id) + ": priority must be positive");
        if (i > 0 && s.agents[i - 1].priority < a.priority)
            throw InvalidScenario("priorities must be sorted descending by agent id (agent " +
                                  std::to_string(a.id) + " violates the order)");
    }

    // Placement separations: pairwise start (and goal) center distance >= 2 r_max.
    double rhat = s.max_agent_radius();
    for (size_t i = 0; i < s.agents.size(); ++i) {
        for (size_t j = i + 1; j < s.agents.size(); ++j) {
            const double eps = 1e-9;
            if (distance(s.agents[i].start, s.agents[j].start) < 2 * rhat - eps)
                throw InvalidScenario("start separation below 2*max_radius for agents " +
                                      std::to_string(s.agents[i].id) + "," +
                                      std::to_string(s.agents[j].id));
            if (distance(s.agents[i].goal, s.agents[j].goal) < 2 * rhat - eps)
                throw InvalidScenario("goal separation below 2*max_radius for agents " +
                                      std::to_string(s.agents[i].id) + "," +
                                      std::to_string(s.agents[j].id));
        }
    }

    if (!s.start_region.empty() || !s.goal_region.empty()) {
        for (const auto& a : s.agents) {
            if (!s.start_region.empty() && !region_contains(s.start_region, s, a.start))
                throw InvalidScenario("agent " + std::to_string(a.id) +
                                      ": start lies outside the start region");
            if (!s.goal_region.empty() && !region_contains(s.goal_region, s, a.goal))
                throw InvalidScenario("agent " + std::to_string(a.id) +
                                      ": goal lies outside the goal region");
        }
    }

    for (const auto& ob : s.obstacles) {
        if (ob.is_cells()) {
            if (ob.cells_shape().offsets.empty())
                throw InvalidScenario("obstacle " + std::to_string(ob.id) + ": empty cell shape");
            if (s.mode == Mode::OfflineDiscrete) {
                // Anchor must sit on a cell center.
                Vec2 snapped = s.cell_center(s.cell_of(ob.position));
                if (distance(snapped, ob.position) > 1e-9)
                    throw InvalidScenario("obstacle " + std::to_string(ob.id) +
                                          ": position must snap to a cell center");
                for (const auto& c : s.obstacle_cells(ob))
                    if (!s.in_grid(c))
                        throw InvalidScenario("obstacle " + std::to_string(ob.id) +
                                              ": cell outside the grid");
            }
        } else {
            const auto& r = ob.rect_shape();
            if (r.width <= 0 || r.height <= 0)
                throw InvalidScenario("obstacle " + std::to_string(ob.id) +
                                      ": shape area must be positive");
        }
    }

    // Obstacle cells must not stack (discrete mode).
    if (s.mode == Mode::OfflineDiscrete) {
        std::set<GridCell> seen;
        for (const auto& c : s.all_obstacle_cells())
            if (!seen.insert(c).second)
                throw InvalidScenario("two obstacles occupy one cell");
    }

    Region delta = obstacle_region(s);
    if (regions_overlap(s.start_region, s.goal_region, s))
        throw InvalidScenario("start and goal regions overlap");
    if (regions_overlap(s.start_region, delta, s))
        throw InvalidScenario("start region overlaps the obstacle region");
    if (regions_overlap(s.goal_region, delta, s))
        throw InvalidScenario("goal region overlaps the obstacle region");
}

double free_area(const Scenario& s) {
    Region delta = obstacle_region(s);
    if (regions_overlap(s.start_region, s.goal_region, s) ||
        regions_overlap(s.start_region, delta, s) ||
        regions_overlap(s.goal_region, delta, s))
        throw InvalidScenario("start/goal/obstacle regions overlap");

    double total = s.width * s.height;
    if (s.mode == Mode::OfflineDiscrete) {
        double ca = s.cell_size() * s.cell_size();
        std::set<GridCell> occupied;
        for (const auto& c : delta.cells) occupied.insert(c);
        for (const auto& c : s.start_region.cells) occupied.insert(c);
        for (const auto& c : s.goal_region.cells) occupied.insert(c);
        return total - double(occupied.size()) * ca;
    }
    return total - rect_union_area(delta.rects) - region_area(s.start_region, s) -
           region_area(s.goal_region, s);
}

bool collision_free(const Vec2& position, double radius, const Scenario& s,
                    std::optional<int> exclude) {
    if (position.x < radius || position.y < radius || position.x > s.width - radius ||
        position.y > s.height - radius)
        return false;
    for (const auto& r : s.obstacle_rects())
        if (disk_rect_overlap(position, radius, r)) return false;
    for (const auto& a : s.agents) {
        if (exclude && a.id == *exclude) continue;
        if (distance(position, a.start) < radius + a.radius) return false;
    }
    return true;
}

std::vector<uint8_t> occupancy_grid(const Scenario& s) {
    int w = s.grid_width();
    int h = s.grid_height();
    std::vector<uint8_t> blocked(size_t(w) * h, 0);
    if (s.mode == Mode::OfflineDiscrete) {
        for (const auto& c : s.all_obstacle_cells())
            if (s.in_grid(c)) blocked[size_t(c.x) + size_t(c.y) * w] = 1;
        return blocked;
    }
    auto rects = s.obstacle_rects();
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            Rect cr = s.cell_rect({x, y});
            for (const auto& r : rects) {
                if (cr.overlaps(r)) {
                    blocked[size_t(x) + size_t(y) * w] = 1;
                    break;
                }
            }
        }
    }
    return blocked;
}

} // namespace envopt
