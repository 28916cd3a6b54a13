#pragma once

#include <string>

#include "envopt/episode.hpp"
#include "envopt/scenario.hpp"

namespace envopt {

// SVG view of an episode: obstacles before (light) and after (dark) the run,
// start circles, goal squares, and one trajectory polyline per agent with a
// red-to-yellow time gradient overlay. An empty trace renders the static
// scene only.
void render_trace(const EpisodeTrace& trace, const Scenario& s, const std::string& path);

std::string render_trace_svg(const EpisodeTrace& trace, const Scenario& s);

} // namespace envopt
