#pragma once

#include "envopt/random.hpp"
#include "envopt/scenario.hpp"

namespace envopt {

// Centralized layout heuristic for discrete scenes. Per round, each obstacle
// in turn recomputes every agent's shortest path on the scene without itself;
// if it sits on any such path it hops to a uniformly random adjacent free
// cell off those paths (stays when no such cell exists). Returns the scene
// with the final layout.
Scenario heuristic_baseline(const Scenario& s, int max_rounds, Rng& rng);

} // namespace envopt
