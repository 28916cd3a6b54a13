#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace envopt {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    double norm_sq() const { return x * x + y * y; }

    // Zero vector maps to zero.
    Vec2 normalized() const {
        double n = norm();
        return n > 0.0 ? Vec2{x / n, y / n} : Vec2{};
    }
    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

// Axis-aligned rectangle, lo inclusive, hi exclusive for area purposes.
struct Rect {
    Vec2 lo;
    Vec2 hi;

    double width() const { return hi.x - lo.x; }
    double height() const { return hi.y - lo.y; }
    double area() const { return width() * height(); }

    bool contains(const Vec2& p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
    }
    // Positive-area overlap; shared edges do not count.
    bool overlaps(const Rect& o) const {
        return lo.x < o.hi.x && o.lo.x < hi.x && lo.y < o.hi.y && o.lo.y < hi.y;
    }
    double overlap_area(const Rect& o) const {
        double w = std::min(hi.x, o.hi.x) - std::max(lo.x, o.lo.x);
        double h = std::min(hi.y, o.hi.y) - std::max(lo.y, o.lo.y);
        return (w > 0.0 && h > 0.0) ? w * h : 0.0;
    }
    Vec2 center() const { return {(lo.x + hi.x) * 0.5, (lo.y + hi.y) * 0.5}; }
    Rect inflated(double r) const { return {{lo.x - r, lo.y - r}, {hi.x + r, hi.y + r}}; }

    static Rect from_center(const Vec2& c, double w, double h) {
        return {{c.x - w * 0.5, c.y - h * 0.5}, {c.x + w * 0.5, c.y + h * 0.5}};
    }
};

struct Disk {
    Vec2 center;
    double radius = 0.0;

    bool overlaps(const Disk& o) const {
        return distance(center, o.center) < radius + o.radius;
    }
    bool contains(const Vec2& p) const { return distance(center, p) <= radius; }
    double area() const { return M_PI * radius * radius; }
};

// Euclidean distance from a point to a rectangle (0 inside).
double point_rect_distance(const Vec2& p, const Rect& r);

// True when the disk penetrates the rectangle (contact allowed).
bool disk_rect_overlap(const Vec2& center, double radius, const Rect& r);

// Exact area of a union of axis-aligned rectangles (coordinate compression).
double rect_union_area(const std::vector<Rect>& rects);

// Farthest distance between any point of rect a and any point of rect b
// (attained at corners).
double rect_rect_max_distance(const Rect& a, const Rect& b);

// Integer grid cell; (0,0) is the lower-left cell.
struct GridCell {
    int x = 0;
    int y = 0;

    bool operator==(const GridCell& o) const { return x == o.x && y == o.y; }
    bool operator<(const GridCell& o) const {
        return x != o.x ? x < o.x : y < o.y;
    }
};

struct GridCellHash {
    size_t operator()(const GridCell& c) const {
        return std::hash<uint64_t>{}((uint64_t(uint32_t(c.x)) << 32) | uint32_t(c.y));
    }
};

} // namespace envopt
