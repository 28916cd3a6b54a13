#include "envopt/baseline.hpp"

#include <set>

#include "envopt/errors.hpp"
#include "envopt/grid_path.hpp"

namespace envopt {

Scenario heuristic_baseline(const Scenario& s, int max_rounds, Rng& rng) {
    if (s.mode != Mode::OfflineDiscrete)
        throw ConfigError("the layout heuristic operates on discrete scenes");
    Scenario cur = s;
    const int w = cur.grid_width();
    const int h = cur.grid_height();
    const int m = int(cur.obstacles.size());
    auto idx = [&](GridCell c) { return size_t(c.x) + size_t(c.y) * w; };

    std::set<GridCell> keepout(cur.start_region.cells.begin(), cur.start_region.cells.end());
    keepout.insert(cur.goal_region.cells.begin(), cur.goal_region.cells.end());
    for (const auto& a : cur.agents) {
        keepout.insert(cur.cell_of(a.start));
        keepout.insert(cur.cell_of(a.goal));
    }

    for (int round = 0; round < max_rounds; ++round) {
        for (int j = 0; j < m; ++j) {
            // Shortest paths on the scene with obstacle j lifted out.
            std::vector<uint8_t> blocked(size_t(w) * h, 0);
            for (int k = 0; k < m; ++k) {
                if (k == j) continue;
                for (const auto& c : cur.obstacle_cells(cur.obstacles[k]))
                    if (cur.in_grid(c)) blocked[idx(c)] = 1;
            }
            std::set<GridCell> path_cells;
            for (const auto& a : cur.agents) {
                auto cells = grid_shortest_cells(blocked, w, h, cur.cell_of(a.start),
                                                 cur.cell_of(a.goal));
                if (cells)
                    for (const auto& c : *cells) path_cells.insert(c);
            }

            auto own = cur.obstacle_cells(cur.obstacles[j]);
            bool blocks = false;
            for (const auto& c : own)
                if (path_cells.count(c)) blocks = true;
            if (!blocks) continue;

            double cs = cur.cell_size();
            const Vec2 moves[4] = {{0.0, cs}, {0.0, -cs}, {-cs, 0.0}, {cs, 0.0}};
            std::vector<Vec2> candidates;
            for (const auto& mv : moves) {
                ObstacleSpec trial = cur.obstacles[j];
                trial.position = cur.obstacles[j].position + mv;
                bool ok = true;
                for (const auto& c : cur.obstacle_cells(trial)) {
                    if (!cur.in_grid(c) || blocked[idx(c)] || keepout.count(c) ||
                        path_cells.count(c)) {
                        ok = false;
                        break;
                    }
                }
                if (ok) candidates.push_back(trial.position);
            }
            if (!candidates.empty())
                cur.obstacles[j].position = candidates[rng.uniform_int(int(candidates.size()))];
        }
    }
    return cur;
}

} // namespace envopt
