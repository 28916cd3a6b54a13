#include "envopt/components.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "envopt/errors.hpp"

namespace envopt {

namespace {

// Union-find over shape indices.
struct Dsu {
    std::vector<int> parent;
    explicit Dsu(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int a) { return parent[a] == a ? a : parent[a] = find(parent[a]); }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

std::vector<RegionComponent> split_region(const Region& region, const Scenario& s) {
    // Shapes: cells first, then rects, then disks.
    std::vector<GridCell> cells(region.cells.begin(), region.cells.end());
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());

    int nc = int(cells.size());
    int nr = int(region.rects.size());
    int nd = int(region.disks.size());
    int n = nc + nr + nd;
    if (n == 0) return {};

    Dsu dsu(n);
    std::map<GridCell, int> cell_index;
    for (int i = 0; i < nc; ++i) cell_index[cells[i]] = i;
    for (int i = 0; i < nc; ++i) {
        const GridCell c = cells[i];
        for (GridCell nb : {GridCell{c.x + 1, c.y}, GridCell{c.x, c.y + 1}}) {
            auto it = cell_index.find(nb);
            if (it != cell_index.end()) dsu.unite(i, it->second);
        }
    }

    auto rect_of_cell = [&](int i) { return s.cell_rect(cells[i]); };
    auto rect_of = [&](int i) {
        return i < nc ? rect_of_cell(i) : region.rects[i - nc];
    };
    // Rect-rect and rect-cell adjacency: overlap or shared boundary.
    auto touches = [](const Rect& a, const Rect& b) {
        return a.lo.x <= b.hi.x && b.lo.x <= a.hi.x && a.lo.y <= b.hi.y && b.lo.y <= a.hi.y;
    };
    for (int i = 0; i < nc + nr; ++i)
        for (int j = std::max(i + 1, nc); j < nc + nr; ++j)
            if (touches(rect_of(i), rect_of(j))) dsu.unite(i, j);
    for (int i = 0; i < nd; ++i) {
        const Disk& d = region.disks[i];
        for (int j = 0; j < nc + nr; ++j)
            if (point_rect_distance(d.center, rect_of(j)) <= d.radius) dsu.unite(nc + nr + i, j);
        for (int j = i + 1; j < nd; ++j) {
            const Disk& e = region.disks[j];
            if (distance(d.center, e.center) <= d.radius + e.radius)
                dsu.unite(nc + nr + i, nc + nr + j);
        }
    }

    std::map<int, int> root_to_comp;
    std::vector<RegionComponent> comps;
    for (int i = 0; i < n; ++i) {
        int r = dsu.find(i);
        auto [it, inserted] = root_to_comp.try_emplace(r, int(comps.size()));
        if (inserted) comps.emplace_back();
        RegionComponent& comp = comps[it->second];
        if (i < nc)
            comp.cells.push_back(cells[i]);
        else if (i < nc + nr)
            comp.rects.push_back(region.rects[i - nc]);
        else
            comp.disks.push_back(region.disks[i - nc - nr]);
    }
    return comps;
}

double shape_pair_max(const Rect& a, const Rect& b) { return rect_rect_max_distance(a, b); }

double shape_pair_max(const Rect& a, const Disk& d) {
    const Vec2 corners[4] = {a.lo, {a.hi.x, a.lo.y}, {a.lo.x, a.hi.y}, a.hi};
    double best = 0.0;
    for (const auto& c : corners) best = std::max(best, distance(c, d.center) + d.radius);
    return best;
}

double shape_pair_max(const Disk& a, const Disk& b) {
    return distance(a.center, b.center) + a.radius + b.radius;
}

std::vector<Rect> component_rects(const RegionComponent& c, const Scenario& s) {
    std::vector<Rect> out = c.rects;
    for (const auto& cell : c.cells) out.push_back(s.cell_rect(cell));
    return out;
}

int component_containing(const std::vector<RegionComponent>& comps, const Scenario& s,
                         const Vec2& p) {
    for (size_t i = 0; i < comps.size(); ++i) {
        const auto& c = comps[i];
        GridCell cc = s.cell_of(p);
        for (const auto& cell : c.cells)
            if (cell == cc) return int(i);
        for (const auto& r : c.rects)
            if (r.contains(p)) return int(i);
        for (const auto& d : c.disks)
            if (d.contains(p)) return int(i);
    }
    return -1;
}

} // namespace

double component_max_distance(const RegionComponent& a, const RegionComponent& b,
                              const Scenario& s) {
    double best = 0.0;
    auto ra = component_rects(a, s);
    auto rb = component_rects(b, s);
    for (const auto& x : ra)
        for (const auto& y : rb)
            best = std::max(best, shape_pair_max(x, y));
    for (const auto& x : ra)
        for (const auto& d : b.disks)
            best = std::max(best, shape_pair_max(x, d));
    for (const auto& d : a.disks)
        for (const auto& y : rb)
            best = std::max(best, shape_pair_max(y, d));
    for (const auto& d : a.disks)
        for (const auto& e : b.disks)
            best = std::max(best, shape_pair_max(d, e));
    return best;
}

ComponentDecomposition decompose_components(const Scenario& s) {
    ComponentDecomposition out;
    out.start_components = split_region(s.start_region, s);
    out.goal_components = split_region(s.goal_region, s);

    int cs = out.num_start();
    int cd = out.num_goal();
    out.dist_start.assign(cs, std::vector<double>(cs, 0.0));
    out.dist_goal.assign(cd, std::vector<double>(cd, 0.0));
    out.dist_start_goal.assign(cs, std::vector<double>(cd, 0.0));

    for (int i = 0; i < cs; ++i)
        for (int j = i + 1; j < cs; ++j) {
            double d = component_max_distance(out.start_components[i], out.start_components[j], s);
            out.dist_start[i][j] = out.dist_start[j][i] = d;
        }
    for (int i = 0; i < cd; ++i)
        for (int j = i + 1; j < cd; ++j) {
            double d = component_max_distance(out.goal_components[i], out.goal_components[j], s);
            out.dist_goal[i][j] = out.dist_goal[j][i] = d;
        }
    for (int i = 0; i < cs; ++i)
        for (int j = 0; j < cd; ++j)
            out.dist_start_goal[i][j] =
                component_max_distance(out.start_components[i], out.goal_components[j], s);

    for (const auto& a : s.agents) {
        int si = cs > 0 ? component_containing(out.start_components, s, a.start) : -1;
        int gi = cd > 0 ? component_containing(out.goal_components, s, a.goal) : -1;
        if (cs > 0 && si < 0)
            throw InvalidScenario("agent " + std::to_string(a.id) +
                                  ": start lies in no start component");
        if (cd > 0 && gi < 0)
            throw InvalidScenario("agent " + std::to_string(a.id) +
                                  ": goal lies in no goal component");
        out.start_membership.push_back(si);
        out.goal_membership.push_back(gi);
    }

    double max_s = 0.0, max_d = 0.0;
    double min_sd = std::numeric_limits<double>::infinity();
    for (int i = 0; i < cs; ++i)
        for (int j = 0; j < cs; ++j) max_s = std::max(max_s, out.dist_start[i][j]);
    for (int i = 0; i < cd; ++i)
        for (int j = 0; j < cd; ++j) max_d = std::max(max_d, out.dist_goal[i][j]);
    for (int i = 0; i < cs; ++i)
        for (int j = 0; j < cd; ++j) min_sd = std::min(min_sd, out.dist_start_goal[i][j]);
    out.start_goal_separated = (cs == 0 || cd == 0) || (max_s + max_d <= min_sd);
    return out;
}

} // namespace envopt
