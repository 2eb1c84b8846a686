#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "dt/errors.hpp"
#include "dt/flight.hpp"
#include "dt/grid.hpp"
#include "dt/scenario.hpp"

namespace dt {

inline constexpr double kDeg = 180.0 / 3.14159265358979323846;
inline constexpr double kAngleTolKm = 1e-9;

// Two-axis gimbal, rest-to-rest bang-bang slews, independent axes.
struct SlewModel {
    double accel_deg_s2 = 1.08;
    double max_rate_deg_s = 5.40;
    double max_off_nadir_deg = 15.0;
    double altitude_km = 500.0;

    // Angular delta above which a slew saturates at the rate limit.
    double boundary_angle_deg() const { return max_rate_deg_s * max_rate_deg_s / accel_deg_s2; }
    // Ground half-extent of the pointing envelope.
    double envelope_half_km() const {
        return altitude_km * std::tan(max_off_nadir_deg / kDeg);
    }
};

inline SlewModel make_slew_model(const FlightPath& f) {
    SlewModel m;
    m.altitude_km = f.altitude_km;
    return m;
}

// Rest-to-rest time to rotate one axis by delta_deg. Triangular profile up to
// the boundary angle (never hits the rate limit), trapezoidal beyond it.
inline double slew_time_1axis(const SlewModel& m, double delta_deg) {
    double d = std::abs(delta_deg);
    if (d == 0.0) return 0.0;
    if (d <= m.boundary_angle_deg()) return 2.0 * std::sqrt(d / m.accel_deg_s2);
    return d / m.max_rate_deg_s + m.max_rate_deg_s / m.accel_deg_s2;
}

// Inverse of slew_time_1axis: largest angle coverable in `seconds`.
inline double max_angle_for_time(const SlewModel& m, double seconds) {
    if (seconds <= 0.0) return 0.0;
    double t_tri = 2.0 * m.max_rate_deg_s / m.accel_deg_s2;
    if (seconds <= t_tri) return m.accel_deg_s2 * seconds * seconds / 4.0;
    return m.max_rate_deg_s * seconds - m.max_rate_deg_s * m.max_rate_deg_s / m.accel_deg_s2;
}

// Whole cycles a slew of `seconds` occupies; even a zero slew takes its cycle.
inline int cycles_for_slew_time(double seconds, double cycle_seconds = kCycleSeconds) {
    return std::max(1, int(std::ceil(seconds / cycle_seconds - 1e-9)));
}

struct PointAngles {
    double pitch_deg = 0.0;  // positive ahead of nadir
    double roll_deg = 0.0;   // positive toward larger rows
};

inline double cell_along_km(const EnvGrid& g, int col) { return col * g.resolution_km; }
inline double cell_cross_km(const EnvGrid& g, int row) {
    return (row - nadir_row(g)) * g.resolution_km;
}

inline PointAngles cell_to_angles(const SlewModel& m, const FlightPath& f, const EnvGrid& g,
                                  int col, int row, int at_cycle) {
    PointAngles a;
    a.pitch_deg = std::atan((cell_along_km(g, col) - f.nadir_along_km(at_cycle)) / m.altitude_km) * kDeg;
    a.roll_deg = std::atan(cell_cross_km(g, row) / m.altitude_km) * kDeg;
    return a;
}

// Cycles needed to repoint from from-cell to to-cell starting at at_cycle.
// Both endpoint angles are measured against the nadir at the arrival cycle,
// so holding the same ground cell is a zero slew. Returns the smallest
// arrival n >= 1 whose slew fits in n cycles with the target inside the
// off-nadir envelope at arrival; nullopt if no such n exists.
inline std::optional<int> slew_cycles(const SlewModel& m, const FlightPath& f, const EnvGrid& g,
                                      int from_col, int from_row, int to_col, int to_row,
                                      int at_cycle) {
    double half = m.envelope_half_km() + kAngleTolKm;
    double to_cross = cell_cross_km(g, to_row);
    if (std::abs(to_cross) > half) return std::nullopt;
    double from_cross = cell_cross_km(g, from_row);
    double roll_delta = std::abs(std::atan(to_cross / m.altitude_km) - std::atan(from_cross / m.altitude_km)) * kDeg;
    double t_roll = slew_time_1axis(m, roll_delta);

    double to_along = cell_along_km(g, to_col);
    double from_along = cell_along_km(g, from_col);
    double kpc = f.km_per_cycle();
    // Past this arrival the target has drifted out of the trailing envelope edge.
    double exit = (to_along + half - f.nadir_along_km(at_cycle)) / kpc;
    int n_limit = exit >= 1.0 ? int(std::floor(exit + 1e-9)) : 0;
    n_limit = std::min(n_limit, 1000000);
    for (int n = 1; n <= n_limit; ++n) {
        double nadir = f.nadir_along_km(at_cycle + n);
        if (std::abs(to_along - nadir) > half) continue;
        double dp = std::abs(std::atan((to_along - nadir) / m.altitude_km) -
                             std::atan((from_along - nadir) / m.altitude_km)) * kDeg;
        double t = std::max(t_roll, slew_time_1axis(m, dp));
        if (cycles_for_slew_time(t, f.cycle_seconds) <= n) return n;
    }
    return std::nullopt;
}

struct Cell {
    int col = 0;
    int row = 0;
};

inline bool operator==(const Cell& a, const Cell& b) { return a.col == b.col && a.row == b.row; }

struct CellRect {
    int col_lo = 0, col_hi = -1, row_lo = 0, row_hi = -1;
    bool empty() const { return col_hi < col_lo || row_hi < row_lo; }
    bool contains(int col, int row) const {
        return col >= col_lo && col <= col_hi && row >= row_lo && row <= row_hi;
    }
};

// Grid cells within the off-nadir envelope at `cycle` (both axes).
inline CellRect sensor_envelope_rect(const SlewModel& m, const FlightPath& f, const EnvGrid& g,
                                     int cycle) {
    double half = m.envelope_half_km() + kAngleTolKm;
    double nadir = f.nadir_along_km(cycle);
    CellRect r;
    r.col_lo = std::max(0, int(std::ceil((nadir - half) / g.resolution_km)));
    r.col_hi = std::min(g.width - 1, int(std::floor((nadir + half) / g.resolution_km)));
    int nr = nadir_row(g);
    int half_rows = int(std::floor(half / g.resolution_km));
    r.row_lo = std::max(0, nr - half_rows);
    r.row_hi = std::min(g.height - 1, nr + half_rows);
    return r;
}

inline std::vector<Cell> sensor_envelope(const SlewModel& m, const FlightPath& f, const EnvGrid& g,
                                         int cycle) {
    CellRect r = sensor_envelope_rect(m, f, g, cycle);
    std::vector<Cell> cells;
    if (r.empty()) return cells;
    cells.reserve(std::size_t(r.col_hi - r.col_lo + 1) * (r.row_hi - r.row_lo + 1));
    for (int row = r.row_lo; row <= r.row_hi; ++row)
        for (int col = r.col_lo; col <= r.col_hi; ++col) cells.push_back({col, row});
    return cells;
}

namespace detail {

// Convert an off-nadir angle interval (degrees) to a km interval on the ground.
inline double angle_to_km(const SlewModel& m, double angle_deg) {
    angle_deg = std::clamp(angle_deg, -89.9, 89.9);
    return m.altitude_km * std::tan(angle_deg / kDeg);
}

}  // namespace detail

// Cells whose slew from the current pointing fits in n cycles, with the cell
// inside the envelope at the arrival cycle, as a rectangle: the per-axis rate
// bound, the arrival envelope, the lookahead limit and the grid bounds are
// all separable interval constraints. Membership here means slew_cycles <= n;
// it does not by itself pin the exact arrival cycle.
inline CellRect arrival_rect(const SlewModel& m, const FlightPath& f, const EnvGrid& g,
                             int point_col, int point_row, int at_cycle, int n,
                             int view_limit_col) {
    double arrival_nadir = f.nadir_along_km(at_cycle + n);
    double a_max = max_angle_for_time(m, n * f.cycle_seconds);
    double pitch_from = std::atan((cell_along_km(g, point_col) - arrival_nadir) / m.altitude_km) * kDeg;
    double roll_from = std::atan(cell_cross_km(g, point_row) / m.altitude_km) * kDeg;

    double pitch_lo = std::max(pitch_from - a_max, -m.max_off_nadir_deg);
    double pitch_hi = std::min(pitch_from + a_max, m.max_off_nadir_deg);
    double roll_lo = std::max(roll_from - a_max, -m.max_off_nadir_deg);
    double roll_hi = std::min(roll_from + a_max, m.max_off_nadir_deg);

    CellRect r;
    if (pitch_lo > pitch_hi || roll_lo > roll_hi) return r;  // default-empty
    double res = g.resolution_km;
    r.col_lo = std::max(0, int(std::ceil((arrival_nadir + detail::angle_to_km(m, pitch_lo) - kAngleTolKm) / res)));
    r.col_hi = std::min({g.width - 1, view_limit_col,
                         int(std::floor((arrival_nadir + detail::angle_to_km(m, pitch_hi) + kAngleTolKm) / res))});
    double cross_lo = detail::angle_to_km(m, roll_lo) - kAngleTolKm;
    double cross_hi = detail::angle_to_km(m, roll_hi) + kAngleTolKm;
    int nr = nadir_row(g);
    r.row_lo = std::max(0, nr + int(std::ceil(cross_lo / res)));
    r.row_hi = std::min(g.height - 1, nr + int(std::floor(cross_hi / res)));
    return r;
}

// Cells reachable in exactly one cycle.
inline CellRect one_cycle_rect(const SlewModel& m, const FlightPath& f, const EnvGrid& g,
                               int point_col, int point_row, int at_cycle, int view_limit_col) {
    return arrival_rect(m, f, g, point_col, point_row, at_cycle, 1, view_limit_col);
}

// Every cell the sensor can be observing within `horizon` cycles: slewable
// under the rate model, inside the envelope at its arrival cycle, and inside
// the current lookahead view. Built by per-cell recomputation; the rectangle
// fast path is checked against this in the tests.
inline std::vector<Cell> reachable_set(const SlewModel& m, const FlightPath& f, const Scenario& s,
                                       const SatState& state, int horizon) {
    std::vector<Cell> cells;
    if (horizon < 1) return cells;
    const EnvGrid& g = s.truth;
    LookaheadView view = lookahead_view(f, s, state.cycle);
    CellRect first = sensor_envelope_rect(m, f, g, state.cycle + 1);
    CellRect last = sensor_envelope_rect(m, f, g, state.cycle + horizon);
    int col_lo = std::min(first.col_lo, last.col_lo);
    int col_hi = std::min(std::max(first.col_hi, last.col_hi), view.visible_through_col);
    for (int row = first.row_lo; row <= first.row_hi; ++row) {
        for (int col = col_lo; col <= col_hi; ++col) {
            auto n = slew_cycles(m, f, g, state.point_col, state.point_row, col, row, state.cycle);
            if (n && *n <= horizon) cells.push_back({col, row});
        }
    }
    return cells;
}

}  // namespace dt
