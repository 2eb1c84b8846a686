#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "dt/errors.hpp"
#include "dt/grid.hpp"
#include "dt/scenario.hpp"

namespace dt {

// Per-model reward constants. Binary models reward a wasted (cloudy) shot with
// 1 rather than 0 so every observation carries nonzero weight in totals.
inline constexpr double kCloudyUtility = 1.0;
inline constexpr double kClearUtility = 10.0;
inline constexpr double kTargetUtility = 100.0;
inline constexpr double kStormUtilityBase = 100.0;
inline constexpr double kPopulationScale = 10000.0;

struct UtilityModel {
    UtilityKind kind = UtilityKind::CA;
    double r_max = 25.0;             // storm-rate normalization, SH only
    double pop_scale = kPopulationScale;  // density divisor, CAPD only
};

inline UtilityModel make_utility_model(const Scenario& s) {
    UtilityModel m;
    m.kind = s.utility_kind;
    m.r_max = s.sh_r_max;
    return m;
}

// Reward for observing one cell, given the model inputs for that cell.
//   CA    cloud avoidance: clear 10, cloudy 1
//   CAPD  population-weighted cloud avoidance: clear 10^(density/10000 + 1), cloudy 1
//   CART  cloud avoidance with regions of interest: clear target 100, clear 10, cloudy 1
//   SH    storm hunting: 100^(rate/r_max), rates above r_max saturate
inline double cell_utility(const UtilityModel& m, double primary, double population,
                           bool target) {
    switch (m.kind) {
        case UtilityKind::CA:
            return primary != 0.0 ? kCloudyUtility : kClearUtility;
        case UtilityKind::CAPD:
            return primary != 0.0 ? kCloudyUtility
                                  : std::pow(10.0, population / m.pop_scale + 1.0);
        case UtilityKind::CART:
            if (primary != 0.0) return kCloudyUtility;
            return target ? kTargetUtility : kClearUtility;
        case UtilityKind::SH: {
            double r = std::min(primary, m.r_max);
            return std::pow(kStormUtilityBase, r / m.r_max);
        }
    }
    throw UnsupportedModelError("unknown utility kind");
}

// True reward for observing (col, row), from the ground-truth grids.
inline double cell_utility_truth(const UtilityModel& m, const Scenario& s, int col, int row) {
    double primary = s.truth.at(col, row);
    double pop = s.population ? s.population->at(col, row) : 0.0;
    bool tgt = s.targets ? s.targets->at(col, row) != 0.0 : false;
    return cell_utility(m, primary, pop, tgt);
}

// Anticipated reward for (col, row) as estimated from a geostationary frame.
// The frame replaces the primary field at its coarser resolution; static side
// grids (population, targets) are known exactly.
inline double cell_utility_geo(const UtilityModel& m, const Scenario& s, const GeoFrame& frame,
                               int col, int row) {
    int c = s.overlay ? s.overlay->coarsening : 1;
    double primary = frame.grid.at(col / c, row / c);
    double pop = s.population ? s.population->at(col, row) : 0.0;
    bool tgt = s.targets ? s.targets->at(col, row) != 0.0 : false;
    return cell_utility(m, primary, pop, tgt);
}

// Dense per-cell reward table at the truth grid's shape.
struct UtilityMap {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    double at(int col, int row) const { return values[static_cast<size_t>(row) * width + col]; }
};

inline UtilityMap truth_utility_map(const UtilityModel& m, const Scenario& s) {
    UtilityMap map;
    map.width = s.truth.width;
    map.height = s.truth.height;
    map.values.resize(s.truth.cell_count());
    for (int r = 0; r < map.height; ++r)
        for (int c = 0; c < map.width; ++c)
            map.values[static_cast<size_t>(r) * map.width + c] = cell_utility_truth(m, s, c, r);
    return map;
}

inline UtilityMap anticipated_utility_map(const UtilityModel& m, const Scenario& s,
                                          const GeoFrame& frame) {
    UtilityMap map;
    map.width = s.truth.width;
    map.height = s.truth.height;
    map.values.resize(s.truth.cell_count());
    for (int r = 0; r < map.height; ++r)
        for (int c = 0; c < map.width; ++c)
            map.values[static_cast<size_t>(r) * map.width + c] =
                cell_utility_geo(m, s, frame, c, r);
    return map;
}

// Reward each cell would yield if clear, from static grids alone. Defined only
// for models whose reward structure is known before any cloud data arrives.
inline UtilityMap known_target_map(const UtilityModel& m, const Scenario& s) {
    UtilityMap map;
    map.width = s.truth.width;
    map.height = s.truth.height;
    map.values.resize(s.truth.cell_count());
    switch (m.kind) {
        case UtilityKind::CAPD:
            if (!s.population) throw ParamError("population grid required");
            for (size_t i = 0; i < map.values.size(); ++i)
                map.values[i] = std::pow(10.0, s.population->values[i] / m.pop_scale + 1.0);
            return map;
        case UtilityKind::CART:
            if (!s.targets) throw ParamError("target grid required");
            for (size_t i = 0; i < map.values.size(); ++i)
                map.values[i] = s.targets->values[i] != 0.0 ? kTargetUtility : kClearUtility;
            return map;
        default:
            throw UnsupportedModelError(
                "static reward map undefined for models without known targets");
    }
}

}  // namespace dt
