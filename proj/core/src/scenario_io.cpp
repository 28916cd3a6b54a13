#include "envopt/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "envopt/errors.hpp"

namespace envopt {

using nlohmann::json;

namespace {

Vec2 vec2_from(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ParseError(field + ": expected [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

json vec2_to(const Vec2& v) { return json::array({v.x, v.y}); }

Region region_from(const json& j, const std::string& field) {
    Region r;
    if (j.is_null()) return r;
    if (!j.is_object()) throw ParseError(field + ": expected an object");
    if (j.contains("cells")) {
        for (const auto& c : j.at("cells")) {
            if (!c.is_array() || c.size() != 2)
                throw ParseError(field + ".cells: expected [x, y] integer pairs");
            r.cells.push_back({c[0].get<int>(), c[1].get<int>()});
        }
    }
    if (j.contains("rects")) {
        for (const auto& rj : j.at("rects")) {
            r.rects.push_back(
                {vec2_from(rj.at("lo"), field + ".rects.lo"), vec2_from(rj.at("hi"), field + ".rects.hi")});
        }
    }
    if (j.contains("disks")) {
        for (const auto& dj : j.at("disks")) {
            r.disks.push_back({vec2_from(dj.at("center"), field + ".disks.center"),
                               dj.at("radius").get<double>()});
        }
    }
    return r;
}

json region_to(const Region& r) {
    json j = json::object();
    if (!r.cells.empty()) {
        json cells = json::array();
        for (const auto& c : r.cells) cells.push_back(json::array({c.x, c.y}));
        j["cells"] = cells;
    }
    if (!r.rects.empty()) {
        json rects = json::array();
        for (const auto& rc : r.rects)
            rects.push_back({{"lo", vec2_to(rc.lo)}, {"hi", vec2_to(rc.hi)}});
        j["rects"] = rects;
    }
    if (!r.disks.empty()) {
        json disks = json::array();
        for (const auto& d : r.disks)
            disks.push_back({{"center", vec2_to(d.center)}, {"radius", d.radius}});
        j["disks"] = disks;
    }
    return j;
}

} // namespace

Scenario scenario_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("scenario JSON: ") + e.what());
    }

    Scenario s;
    try {
        std::string mode = j.at("mode").get<std::string>();
        if (mode == "offline-discrete")
            s.mode = Mode::OfflineDiscrete;
        else if (mode == "online-continuous")
            s.mode = Mode::OnlineContinuous;
        else
            throw ParseError("mode: expected offline-discrete or online-continuous");

        s.width = j.at("bounds").at("width").get<double>();
        s.height = j.at("bounds").at("height").get<double>();
        s.grid_resolution = j.value("grid_resolution", 1.0);
        s.start_region = region_from(j.value("start_region", json()), "start_region");
        s.goal_region = region_from(j.value("goal_region", json()), "goal_region");

        for (const auto& aj : j.value("agents", json::array())) {
            AgentSpec a;
            a.id = aj.at("id").get<int>();
            a.radius = aj.at("radius").get<double>();
            a.start = vec2_from(aj.at("start"), "agents.start");
            a.goal = vec2_from(aj.at("goal"), "agents.goal");
            a.priority = aj.value("priority", 1.0);
            s.agents.push_back(a);
        }
        for (const auto& oj : j.value("obstacles", json::array())) {
            ObstacleSpec ob;
            ob.id = oj.at("id").get<int>();
            const auto& sj = oj.at("shape");
            std::string type = sj.at("type").get<std::string>();
            if (type == "cells") {
                CellShape cs;
                cs.offsets.clear();
                for (const auto& c : sj.at("cells"))
                    cs.offsets.push_back({c[0].get<int>(), c[1].get<int>()});
                ob.shape = cs;
            } else if (type == "rect") {
                ob.shape = RectShape{sj.at("width").get<double>(), sj.at("height").get<double>()};
            } else {
                throw ParseError("obstacles.shape.type: expected cells or rect");
            }
            ob.position = vec2_from(oj.at("position"), "obstacles.position");
            if (oj.contains("velocity")) ob.velocity = vec2_from(oj.at("velocity"), "obstacles.velocity");
            ob.beta = oj.value("beta", 1.0);
            s.obstacles.push_back(ob);
        }

        s.max_speed = j.value("max_speed", 0.05);
        s.max_accel = j.value("max_accel", 0.05);
        s.max_steps = j.value("max_steps", 500);
        s.seed = j.value("seed", uint64_t(0));
    } catch (const json::exception& e) {
        throw ParseError(std::string("scenario JSON: ") + e.what());
    }

    // Continuous scenes may omit the regions; they default to the union of
    // the agent start/goal disks.
    if (s.mode == Mode::OnlineContinuous) {
        if (s.start_region.empty())
            for (const auto& a : s.agents) s.start_region.disks.push_back({a.start, a.radius});
        if (s.goal_region.empty())
            for (const auto& a : s.agents) s.goal_region.disks.push_back({a.goal, a.radius});
    }

    validate_scenario(s);
    return s;
}

std::string scenario_to_json_text(const Scenario& s) {
    json j;
    j["mode"] = s.mode == Mode::OfflineDiscrete ? "offline-discrete" : "online-continuous";
    j["bounds"] = {{"width", s.width}, {"height", s.height}};
    j["grid_resolution"] = s.grid_resolution;
    j["start_region"] = region_to(s.start_region);
    j["goal_region"] = region_to(s.goal_region);
    json agents = json::array();
    for (const auto& a : s.agents) {
        agents.push_back({{"id", a.id},
                          {"radius", a.radius},
                          {"start", vec2_to(a.start)},
                          {"goal", vec2_to(a.goal)},
                          {"priority", a.priority}});
    }
    j["agents"] = agents;
    json obstacles = json::array();
    for (const auto& ob : s.obstacles) {
        json sj;
        if (ob.is_cells()) {
            json cells = json::array();
            for (const auto& c : ob.cells_shape().offsets) cells.push_back(json::array({c.x, c.y}));
            sj = {{"type", "cells"}, {"cells", cells}};
        } else {
            sj = {{"type", "rect"},
                  {"width", ob.rect_shape().width},
                  {"height", ob.rect_shape().height}};
        }
        obstacles.push_back({{"id", ob.id},
                             {"shape", sj},
                             {"position", vec2_to(ob.position)},
                             {"velocity", vec2_to(ob.velocity)},
                             {"beta", ob.beta}});
    }
    j["obstacles"] = obstacles;
    j["max_speed"] = s.max_speed;
    j["max_accel"] = s.max_accel;
    j["max_steps"] = s.max_steps;
    j["seed"] = s.seed;
    return j.dump(2);
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return scenario_from_json_text(ss.str());
}

void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write scenario file: " + path);
    out << scenario_to_json_text(s) << "\n";
}

} // namespace envopt
