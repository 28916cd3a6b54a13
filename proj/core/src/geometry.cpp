#include "envopt/geometry.hpp"

#include <algorithm>

namespace envopt {

double point_rect_distance(const Vec2& p, const Rect& r) {
    double dx = std::max({r.lo.x - p.x, 0.0, p.x - r.hi.x});
    double dy = std::max({r.lo.y - p.y, 0.0, p.y - r.hi.y});
    return std::hypot(dx, dy);
}

bool disk_rect_overlap(const Vec2& center, double radius, const Rect& r) {
    return point_rect_distance(center, r) < radius;
}

double rect_union_area(const std::vector<Rect>& rects) {
    if (rects.empty()) return 0.0;
    std::vector<double> xs, ys;
    xs.reserve(rects.size() * 2);
    ys.reserve(rects.size() * 2);
    for (const auto& r : rects) {
        xs.push_back(r.lo.x);
        xs.push_back(r.hi.x);
        ys.push_back(r.lo.y);
        ys.push_back(r.hi.y);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

    double total = 0.0;
    for (size_t i = 0; i + 1 < xs.size(); ++i) {
        for (size_t j = 0; j + 1 < ys.size(); ++j) {
            Vec2 mid{(xs[i] + xs[i + 1]) * 0.5, (ys[j] + ys[j + 1]) * 0.5};
            for (const auto& r : rects) {
                if (mid.x > r.lo.x && mid.x < r.hi.x && mid.y > r.lo.y && mid.y < r.hi.y) {
                    total += (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j]);
                    break;
                }
            }
        }
    }
    return total;
}

double rect_rect_max_distance(const Rect& a, const Rect& b) {
    double best = 0.0;
    const Vec2 ca[4] = {a.lo, {a.hi.x, a.lo.y}, {a.lo.x, a.hi.y}, a.hi};
    const Vec2 cb[4] = {b.lo, {b.hi.x, b.lo.y}, {b.lo.x, b.hi.y}, b.hi};
    for (const auto& p : ca)
        for (const auto& q : cb)
            best = std::max(best, distance(p, q));
    return best;
}

} // namespace envopt
