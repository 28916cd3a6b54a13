#include "envopt/rvo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace envopt {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double time_to_collision_disk(const Vec2& rel_pos, const Vec2& rel_vel, double combined_radius,
                              double horizon) {
    double c = rel_pos.norm_sq() - combined_radius * combined_radius;
    double b = rel_pos.dot(rel_vel);
    // Touching (or overlapping) counts as collision only while approaching,
    // so contact at exactly the combined radius stays escapable.
    if (c <= 1e-12) return b < 0.0 ? 0.0 : kInf;
    double a = rel_vel.norm_sq();
    if (a <= 0.0 || b >= 0.0) return kInf;
    double disc = b * b - a * c;
    if (disc <= 0.0) return kInf;
    double t = (-b - std::sqrt(disc)) / a;
    return (t >= 0.0 && t <= horizon) ? t : kInf;
}

namespace {

// Entry time of a ray into an axis-aligned box; infinity when it misses.
double ray_box_entry(const Vec2& pos, const Vec2& vel, const Rect& r) {
    double t_enter = 0.0, t_exit = kInf;
    for (int axis = 0; axis < 2; ++axis) {
        double p = axis == 0 ? pos.x : pos.y;
        double v = axis == 0 ? vel.x : vel.y;
        double lo = axis == 0 ? r.lo.x : r.lo.y;
        double hi = axis == 0 ? r.hi.x : r.hi.y;
        if (std::abs(v) < 1e-15) {
            if (p <= lo || p >= hi) return kInf;
        } else {
            double t1 = (lo - p) / v;
            double t2 = (hi - p) / v;
            if (t1 > t2) std::swap(t1, t2);
            t_enter = std::max(t_enter, t1);
            t_exit = std::min(t_exit, t2);
            if (t_enter > t_exit) return kInf;
        }
    }
    return std::max(t_enter, 0.0);
}

} // namespace

double time_to_collision_rect(const Vec2& pos, const Vec2& vel, const Rect& rect, double radius,
                              double horizon) {
    // Exact disk-vs-rect sweep: the dilated footprint is the union of the
    // rect expanded along each axis and four corner disks. The epsilon keeps
    // surface contact escapable.
    double r = radius - 1e-9;
    if (point_rect_distance(pos, rect) < r) return 0.0;

    double best = kInf;
    best = std::min(best, ray_box_entry(pos, vel, {{rect.lo.x - r, rect.lo.y},
                                                   {rect.hi.x + r, rect.hi.y}}));
    best = std::min(best, ray_box_entry(pos, vel, {{rect.lo.x, rect.lo.y - r},
                                                   {rect.hi.x, rect.hi.y + r}}));
    const Vec2 corners[4] = {rect.lo, {rect.hi.x, rect.lo.y}, {rect.lo.x, rect.hi.y}, rect.hi};
    for (const auto& c : corners)
        best = std::min(best, time_to_collision_disk(c - pos, vel * -1.0, r, horizon));
    return best <= horizon ? best : kInf;
}

Vec2 rvo_step(const AgentState& self, const std::vector<AgentState>& neighbors,
              const std::vector<ObstacleState>& obstacles, const Rect& bounds,
              double max_speed, double dt, const PlannerConfig& cfg) {
    Vec2 to_goal = self.goal - self.position;
    double goal_dist = to_goal.norm();
    double pref_speed = std::min(cfg.preferred_speed, max_speed);
    // Slow down on final approach instead of overshooting.
    if (goal_dist < pref_speed * dt) pref_speed = goal_dist / dt;
    Vec2 pref = goal_dist > 0.0 ? to_goal.normalized() * pref_speed : Vec2{};
    if (goal_dist == 0.0) return {};

    // Candidate fan rotated into the goal frame so that symmetric encounters
    // break ties the same way relative to each agent's own heading.
    Vec2 fwd = to_goal.normalized();
    std::vector<Vec2> candidates;
    candidates.push_back({});
    candidates.push_back(pref);
    for (int d = 0; d < cfg.direction_samples; ++d) {
        double ang = 2.0 * M_PI * d / cfg.direction_samples;
        Vec2 dir{fwd.x * std::cos(ang) - fwd.y * std::sin(ang),
                 fwd.x * std::sin(ang) + fwd.y * std::cos(ang)};
        for (int m = 1; m <= cfg.magnitude_samples; ++m) {
            double speed = max_speed * double(m) / cfg.magnitude_samples;
            candidates.push_back(dir * speed);
        }
    }

    // Hoist the sensing filter out of the candidate scoring loop.
    std::vector<const AgentState*> near_agents;
    for (const auto& nb : neighbors)
        if (distance(nb.position, self.position) <= cfg.sensing_radius) near_agents.push_back(&nb);
    std::vector<const ObstacleState*> near_obstacles;
    for (const auto& ob : obstacles)
        if (point_rect_distance(self.position, ob.rect) <= cfg.sensing_radius)
            near_obstacles.push_back(&ob);

    double best_cost = kInf;
    Vec2 best{};
    for (const auto& cand : candidates) {
        double ttc = kInf;
        // Reciprocal test: assume this agent only commits half the velocity
        // change, mirroring the neighbor doing the same.
        Vec2 effective = (cand + self.velocity) * 0.5;
        for (const AgentState* nb : near_agents) {
            Vec2 rel_pos = nb->position - self.position;
            // rel_vel is the rate of change of rel_pos.
            Vec2 rel_vel = nb->velocity - effective;
            ttc = std::min(ttc, time_to_collision_disk(rel_pos, rel_vel, self.radius + nb->radius,
                                                       cfg.time_horizon));
        }
        for (const ObstacleState* ob : near_obstacles) {
            Vec2 rel_vel = cand - ob->velocity;
            ttc = std::min(ttc,
                           time_to_collision_rect(self.position, rel_vel, ob->rect, self.radius,
                                                  cfg.time_horizon));
        }
        // Scene boundary: hard-exclude candidates that would leave within a
        // step, without the graded repulsion (goals may sit near walls).
        {
            double margin = self.radius;
            double t = kInf;
            if (cand.x < 0.0) t = std::min(t, (self.position.x - (bounds.lo.x + margin)) / -cand.x);
            if (cand.x > 0.0) t = std::min(t, ((bounds.hi.x - margin) - self.position.x) / cand.x);
            if (cand.y < 0.0) t = std::min(t, (self.position.y - (bounds.lo.y + margin)) / -cand.y);
            if (cand.y > 0.0) t = std::min(t, ((bounds.hi.y - margin) - self.position.y) / cand.y);
            if (t <= dt) ttc = 0.0;
        }

        double cost = (cand - pref).norm();
        if (ttc <= dt)
            cost = kInf;  // collides within this step: candidate unusable
        else if (ttc < kInf)
            cost += cfg.w_collision / ttc;
        if (cost < best_cost - 1e-15) {
            best_cost = cost;
            best = cand;
        }
    }
    if (best_cost == kInf) return {};
    return best;
}

} // namespace envopt
