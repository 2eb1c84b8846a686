#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>

#include "dt/errors.hpp"
#include "dt/grid.hpp"

namespace dt {

inline constexpr double kCycleSeconds = 4.0;
inline constexpr int kObservationBudget = 100;

// Straight nadir track at constant ground speed; one action per cycle.
struct FlightPath {
    int n_cycles = 0;
    double cycle_seconds = kCycleSeconds;
    double ground_speed_km_s = 6.0;
    double swath_km = 268.0;
    double lookahead_km = 500.0;   // how far ahead of nadir the forward sensor sees
    double altitude_km = 500.0;

    double km_per_cycle() const { return ground_speed_km_s * cycle_seconds; }
    double nadir_along_km(int cycle) const { return cycle * km_per_cycle(); }
};

// lookahead_km equals altitude: the forward sensor looks 45 degrees ahead.
inline FlightPath make_flight(int n_cycles, double ground_speed_km_s, double swath_km,
                              double altitude_km) {
    if (n_cycles <= 0) throw ParamError("flight needs a positive cycle count");
    if (ground_speed_km_s <= 0.0 || swath_km <= 0.0 || altitude_km <= 0.0)
        throw ParamError("flight speed, swath and altitude must be positive");
    FlightPath f;
    f.n_cycles = n_cycles;
    f.ground_speed_km_s = ground_speed_km_s;
    f.swath_km = swath_km;
    f.altitude_km = altitude_km;
    f.lookahead_km = altitude_km;
    return f;
}

inline int nadir_row(const EnvGrid& g) { return g.height / 2; }

inline int nadir_col_at(const FlightPath& f, const EnvGrid& g, int cycle) {
    double col = f.nadir_along_km(cycle) / g.resolution_km;
    int c = int(std::floor(col + 1e-9));
    return std::clamp(c, 0, g.width - 1);
}

// A multi-cycle slew in progress; arrival happens on the cycle where
// remaining_cycles reaches 1.
struct PendingSlew {
    int target_col = 0;
    int target_row = 0;
    int remaining_cycles = 1;
};

struct SatState {
    int cycle = 0;
    int nadir_col = 0;
    int point_col = 0;   // ground cell the primary sensor is trained on
    int point_row = 0;
    int obs_used = 0;
    std::optional<PendingSlew> pending_slew;
};

inline SatState initial_state(const FlightPath& f, const EnvGrid& truth) {
    SatState s;
    s.cycle = 0;
    s.nadir_col = nadir_col_at(f, truth, 0);
    s.point_col = s.nadir_col;
    s.point_row = nadir_row(truth);
    s.obs_used = 0;
    return s;
}

struct Action {
    int target_col = 0;
    int target_row = 0;
    bool observe = false;
};

inline bool operator==(const Action& a, const Action& b) {
    return a.target_col == b.target_col && a.target_row == b.target_row && a.observe == b.observe;
}

// Canonical ordering used for deterministic tie-breaking.
inline bool action_less(const Action& a, const Action& b) {
    if (a.target_row != b.target_row) return a.target_row < b.target_row;
    if (a.target_col != b.target_col) return a.target_col < b.target_col;
    return int(a.observe) < int(b.observe);
}

}  // namespace dt
