#include "envopt/render.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "envopt/errors.hpp"

namespace envopt {

namespace {

constexpr double kScale = 60.0;  // pixels per world unit

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

// World to pixel coordinates, y flipped.
double px(double x) { return x * kScale; }
double py(double y, const Scenario& s) { return (s.height - y) * kScale; }

std::string gradient_color(double t) {
    // red (1,0,0) to yellow (1,1,0)
    int g = int(255.0 * std::clamp(t, 0.0, 1.0));
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#ff%02x00", g);
    return buf;
}

void emit_rect(std::ostream& out, const Rect& r, const Scenario& s, const std::string& fill,
               double opacity) {
    out << "<rect x=\"" << num(px(r.lo.x)) << "\" y=\"" << num(py(r.hi.y, s)) << "\" width=\""
        << num(px(r.width())) << "\" height=\"" << num(px(r.height())) << "\" fill=\"" << fill
        << "\" fill-opacity=\"" << num(opacity) << "\"/>\n";
}

} // namespace

std::string render_trace_svg(const EpisodeTrace& trace, const Scenario& s) {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(px(s.width))
        << "\" height=\"" << num(px(s.height)) << "\" viewBox=\"0 0 " << num(px(s.width)) << " "
        << num(px(s.height)) << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << num(px(s.width)) << "\" height=\""
        << num(px(s.height)) << "\" fill=\"white\" stroke=\"black\"/>\n";

    // Initial obstacle layout (light), final layout (dark).
    for (size_t j = 0; j < s.obstacles.size(); ++j) {
        ObstacleSpec initial = s.obstacles[j];
        if (j < trace.initial_obstacle_positions.size())
            initial.position = trace.initial_obstacle_positions[j];
        emit_rect(out, s.obstacle_rect(initial), s, "#bbbbbb", 0.8);
    }
    if (!trace.steps.empty()) {
        const auto& last = trace.steps.back();
        for (size_t j = 0; j < s.obstacles.size(); ++j) {
            ObstacleSpec fin = s.obstacles[j];
            if (j < last.obstacle_positions.size()) fin.position = last.obstacle_positions[j];
            emit_rect(out, s.obstacle_rect(fin), s, "#8b6f47", 0.8);
        }
    }

    for (const auto& a : s.agents) {
        out << "<circle cx=\"" << num(px(a.start.x)) << "\" cy=\"" << num(py(a.start.y, s))
            << "\" r=\"" << num(a.radius * kScale) << "\" fill=\"red\" fill-opacity=\"0.9\"/>\n";
        double half = a.radius * kScale;
        out << "<rect x=\"" << num(px(a.goal.x) - half) << "\" y=\"" << num(py(a.goal.y, s) - half)
            << "\" width=\"" << num(2 * half) << "\" height=\"" << num(2 * half)
            << "\" fill=\"gold\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
    }

    // One polyline per agent (one vertex per recorded step) plus sparse
    // time-gradient markers.
    size_t steps = trace.steps.size();
    for (size_t i = 0; i < s.agents.size() && steps > 0; ++i) {
        out << "<polyline fill=\"none\" stroke=\"" << gradient_color(0.5)
            << "\" stroke-width=\"1.5\" points=\"";
        for (size_t t = 0; t < steps; ++t) {
            const Vec2& p = trace.steps[t].agent_positions[i];
            out << num(px(p.x)) << "," << num(py(p.y, s));
            if (t + 1 < steps) out << " ";
        }
        out << "\"/>\n";
        size_t stride = std::max<size_t>(1, steps / 24);
        for (size_t t = 0; t < steps; t += stride) {
            const Vec2& p = trace.steps[t].agent_positions[i];
            out << "<circle cx=\"" << num(px(p.x)) << "\" cy=\"" << num(py(p.y, s))
                << "\" r=\"1.6\" fill=\"" << gradient_color(double(t) / double(steps)) << "\"/>\n";
        }
    }
    out << "</svg>\n";
    return out.str();
}

void render_trace(const EpisodeTrace& trace, const Scenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write SVG file: " + path);
    out << render_trace_svg(trace, s);
}

} // namespace envopt
