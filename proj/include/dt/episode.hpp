#pragma once

#include <string>
#include <vector>

#include "dt/flight.hpp"

namespace dt {

// One executed cycle: the action taken and the reward it earned (0 when the
// cycle made no observation).
struct TraceEntry {
    int cycle = 0;
    Action action;
    double utility = 0.0;
};

struct EpisodeResult {
    std::string scenario_id;
    std::string planner_id;
    double total_utility = 0.0;
    int observations_used = 0;
    double wall_ms = 0.0;
    std::vector<TraceEntry> trace;
    // Cycles at which a hierarchical planner (re)distributed its budget; the
    // entry at cycle 0 is the initial distribution.
    std::vector<int> distribution_cycles;
};

}  // namespace dt
