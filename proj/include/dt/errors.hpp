#pragma once

#include <stdexcept>
#include <string>

namespace dt {

// Invalid argument or configuration value.
struct ParamError : std::invalid_argument {
    explicit ParamError(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed grid file; message carries line (1-based) and column offset.
struct FormatError : std::runtime_error {
    int line = 0;
    int offset = 0;
    FormatError(const std::string& what, int line_, int offset_)
        : std::runtime_error(what + " (line " + std::to_string(line_) + ", offset " +
                             std::to_string(offset_) + ")"),
          line(line_),
          offset(offset_) {}
};

enum class Constraint {
    SlewTime,      // target not reachable under the slew model
    Envelope,      // arrival pointing outside the off-nadir envelope
    Visibility,    // observed cell not yet inside the lookahead view
    Budget,        // observation budget exhausted
    SlewInProgress,// action conflicts with a pending multi-cycle slew
    Bounds,        // target cell outside the grid
};

inline const char* constraint_name(Constraint c) {
    switch (c) {
        case Constraint::SlewTime: return "slew-time";
        case Constraint::Envelope: return "envelope";
        case Constraint::Visibility: return "visibility";
        case Constraint::Budget: return "budget";
        case Constraint::SlewInProgress: return "slew-in-progress";
        case Constraint::Bounds: return "bounds";
    }
    return "unknown";
}

// Infeasible action fed to the state transition.
struct ConstraintViolationError : std::runtime_error {
    Constraint constraint;
    int cycle;
    ConstraintViolationError(Constraint c, int cycle_, const std::string& detail)
        : std::runtime_error(std::string("constraint violation [") + constraint_name(c) +
                             "] at cycle " + std::to_string(cycle_) + ": " + detail),
          constraint(c),
          cycle(cycle_) {}
};

// Operation asked of a utility model that does not support it.
struct UnsupportedModelError : std::runtime_error {
    explicit UnsupportedModelError(const std::string& what) : std::runtime_error(what) {}
};

// Exhaustive search refused because the instance is too big.
struct InstanceTooLargeError : std::runtime_error {
    double estimated_sequences;
    InstanceTooLargeError(double estimate, double cap)
        : std::runtime_error("instance too large for exhaustive search: ~" +
                             std::to_string(estimate) + " sequences (cap " +
                             std::to_string(cap) + ")"),
          estimated_sequences(estimate) {}
};

// Result sets that cannot be aggregated together.
struct AggregationError : std::runtime_error {
    explicit AggregationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dt
