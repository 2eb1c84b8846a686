#pragma once

#include <string>

#include "dt/errors.hpp"
#include "dt/flight.hpp"
#include "dt/scenario.hpp"
#include "dt/slew.hpp"

namespace dt {

// Advance one cycle. Exactly one action per cycle: repoint (1-cycle slew),
// begin or continue a multi-cycle slew, hold, and/or observe. Throws
// ConstraintViolationError naming the violated constraint for any action the
// platform cannot execute.
inline SatState transition(const SatState& state, const Action& action, const FlightPath& flight,
                           const SlewModel& slew, const Scenario& scenario) {
    const EnvGrid& g = scenario.truth;
    if (state.cycle < 0 || state.cycle >= flight.n_cycles)
        throw ParamError("transition past the end of the flight");
    if (!g.in_bounds(action.target_col, action.target_row))
        throw ConstraintViolationError(Constraint::Bounds, state.cycle, "target cell outside grid");

    SatState next = state;
    bool arrived = false;

    if (state.pending_slew) {
        const PendingSlew& p = *state.pending_slew;
        if (action.target_col != p.target_col || action.target_row != p.target_row)
            throw ConstraintViolationError(Constraint::SlewInProgress, state.cycle,
                                           "only continuing the pending slew is legal");
        if (p.remaining_cycles > 1) {
            if (action.observe)
                throw ConstraintViolationError(Constraint::SlewInProgress, state.cycle,
                                               "cannot observe before the slew arrives");
            next.pending_slew = PendingSlew{p.target_col, p.target_row, p.remaining_cycles - 1};
        } else {
            next.point_col = p.target_col;
            next.point_row = p.target_row;
            next.pending_slew.reset();
            arrived = true;
        }
    } else {
        auto n = slew_cycles(slew, flight, g, state.point_col, state.point_row, action.target_col,
                             action.target_row, state.cycle);
        if (!n) {
            double cross = cell_cross_km(g, action.target_row);
            double behind = cell_along_km(g, action.target_col) - flight.nadir_along_km(state.cycle + 1);
            bool outside = std::abs(cross) > slew.envelope_half_km() + kAngleTolKm ||
                           behind < -(slew.envelope_half_km() + kAngleTolKm);
            throw ConstraintViolationError(outside ? Constraint::Envelope : Constraint::SlewTime,
                                           state.cycle, "target cell unreachable");
        }
        if (*n == 1) {
            next.point_col = action.target_col;
            next.point_row = action.target_row;
            arrived = true;
        } else {
            if (action.observe)
                throw ConstraintViolationError(Constraint::SlewInProgress, state.cycle,
                                               "cannot observe on the cycle a multi-cycle slew begins");
            next.pending_slew = PendingSlew{action.target_col, action.target_row, *n - 1};
        }
    }

    if (action.observe) {
        if (!arrived)
            throw ConstraintViolationError(Constraint::SlewInProgress, state.cycle,
                                           "observation requires the sensor at rest on the target");
        if (state.obs_used >= kObservationBudget)
            throw ConstraintViolationError(Constraint::Budget, state.cycle,
                                           "observation budget exhausted");
        LookaheadView view = lookahead_view(flight, scenario, state.cycle);
        if (!view.contains(action.target_col))
            throw ConstraintViolationError(Constraint::Visibility, state.cycle,
                                           "target cell not yet inside the lookahead view");
        next.obs_used = state.obs_used + 1;
    }

    next.cycle = state.cycle + 1;
    next.nadir_col = nadir_col_at(flight, g, next.cycle);
    return next;
}

}  // namespace dt
