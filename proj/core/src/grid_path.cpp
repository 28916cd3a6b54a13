#include "envopt/grid_path.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace envopt {

namespace {

// Neighbor order fixes the tie-break: -x, +x, -y, +y scans in lexicographic
// (x, then y) preference.
constexpr int kDx[4] = {-1, 1, 0, 0};
constexpr int kDy[4] = {0, 0, -1, 1};

std::vector<GridCell> reconstruct(const std::vector<int>& parent, int w, int idx) {
    std::vector<GridCell> cells;
    while (idx >= 0) {
        cells.push_back({idx % w, idx / w});
        idx = parent[idx];
    }
    std::reverse(cells.begin(), cells.end());
    return cells;
}

} // namespace

std::optional<std::vector<GridCell>> grid_shortest_cells(const std::vector<uint8_t>& blocked,
                                                         int w, int h, GridCell from, GridCell to) {
    auto inside = [&](GridCell c) { return c.x >= 0 && c.x < w && c.y >= 0 && c.y < h; };
    if (!inside(from) || !inside(to)) return std::nullopt;
    auto idx = [&](GridCell c) { return size_t(c.x) + size_t(c.y) * w; };
    if (blocked[idx(from)] || blocked[idx(to)]) return std::nullopt;

    // Unweighted 4-connected grid: breadth-first search is exact, and the
    // fixed neighbor order makes the returned path deterministic.
    std::vector<int> parent(size_t(w) * h, -2);
    std::queue<int> open;
    parent[idx(from)] = -1;
    open.push(int(idx(from)));
    while (!open.empty()) {
        int cur = open.front();
        open.pop();
        if (cur == int(idx(to))) return reconstruct(parent, w, cur);
        GridCell c{cur % w, cur / w};
        for (int k = 0; k < 4; ++k) {
            GridCell nb{c.x + kDx[k], c.y + kDy[k]};
            if (!inside(nb) || blocked[idx(nb)] || parent[idx(nb)] != -2) continue;
            parent[idx(nb)] = cur;
            open.push(int(idx(nb)));
        }
    }
    return std::nullopt;
}

std::optional<std::vector<GridCell>> grid_cheapest_cells(const std::vector<uint8_t>& blocked,
                                                         const std::vector<double>& weight,
                                                         int w, int h, GridCell from, GridCell to) {
    auto inside = [&](GridCell c) { return c.x >= 0 && c.x < w && c.y >= 0 && c.y < h; };
    if (!inside(from) || !inside(to)) return std::nullopt;
    auto idx = [&](GridCell c) { return size_t(c.x) + size_t(c.y) * w; };
    if (blocked[idx(from)] || blocked[idx(to)]) return std::nullopt;

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(size_t(w) * h, inf);
    std::vector<int> parent(size_t(w) * h, -2);
    // (cost, x, y) ordering keeps expansion deterministic under cost ties.
    using Node = std::tuple<double, int, int>;
    std::priority_queue<Node, std::vector<Node>, std::greater<>> open;
    dist[idx(from)] = 0.0;
    parent[idx(from)] = -1;
    open.emplace(0.0, from.x, from.y);
    while (!open.empty()) {
        auto [d, x, y] = open.top();
        open.pop();
        GridCell c{x, y};
        if (d > dist[idx(c)]) continue;
        if (c == to) return reconstruct(parent, w, int(idx(c)));
        for (int k = 0; k < 4; ++k) {
            GridCell nb{c.x + kDx[k], c.y + kDy[k]};
            if (!inside(nb) || blocked[idx(nb)]) continue;
            double nd = d + 1.0 + weight[idx(nb)];
            if (nd < dist[idx(nb)] - 1e-15) {
                dist[idx(nb)] = nd;
                parent[idx(nb)] = int(idx(c));
                open.emplace(nd, nb.x, nb.y);
            }
        }
    }
    return std::nullopt;
}

std::optional<Path> shortest_path(const Scenario& s, const Vec2& from, const Vec2& to) {
    int w = s.grid_width();
    int h = s.grid_height();
    auto blocked = occupancy_grid(s);
    auto cells = grid_shortest_cells(blocked, w, h, s.cell_of(from), s.cell_of(to));
    if (!cells) return std::nullopt;

    Path p;
    if (cells->size() == 1) {
        if (from == to) {
            p.waypoints = {from};
            p.length = 0.0;
        } else {
            p.waypoints = {from, to};
            p.length = distance(from, to);
        }
        return p;
    }
    for (const auto& c : *cells) p.waypoints.push_back(s.cell_center(c));
    p.waypoints.front() = from;
    p.waypoints.back() = to;
    // Cell-count metric keeps grid lengths exact; endpoint substitution only
    // affects the first/last segment of the polyline, not the length.
    p.length = double(cells->size() - 1) * s.cell_size();
    return p;
}

} // namespace envopt
