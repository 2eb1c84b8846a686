#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dt/errors.hpp"

namespace dt {

enum class GridKind { CloudMask, Precip, Population, TargetMask };

inline bool is_binary_kind(GridKind k) {
    return k == GridKind::CloudMask || k == GridKind::TargetMask;
}

inline const char* kind_name(GridKind k) {
    switch (k) {
        case GridKind::CloudMask: return "cloudmask";
        case GridKind::Precip: return "precip";
        case GridKind::Population: return "population";
        case GridKind::TargetMask: return "targetmask";
    }
    return "unknown";
}

// Row-major geospatial raster. Columns run along-track, rows cross-track;
// row 0 is the cross-track edge nearest negative roll.
struct EnvGrid {
    int width = 0;
    int height = 0;
    double resolution_km = 1.0;
    GridKind kind = GridKind::CloudMask;
    std::vector<double> values;

    double at(int col, int row) const { return values[std::size_t(row) * width + col]; }
    double& at(int col, int row) { return values[std::size_t(row) * width + col]; }
    bool in_bounds(int col, int row) const {
        return col >= 0 && col < width && row >= 0 && row < height;
    }
    std::size_t cell_count() const { return std::size_t(width) * height; }

    void validate() const {
        if (width <= 0 || height <= 0)
            throw ParamError("grid dimensions must be positive");
        if (resolution_km <= 0.0)
            throw ParamError("grid resolution must be positive");
        if (values.size() != cell_count())
            throw ParamError("grid value count does not match width*height");
        for (double v : values) {
            if (!(v >= 0.0) || !std::isfinite(v))
                throw ParamError(std::string(kind_name(kind)) + " grid holds a negative or non-finite value");
            if (is_binary_kind(kind) && v != 0.0 && v != 1.0)
                throw ParamError(std::string(kind_name(kind)) + " grid holds a non-binary value");
        }
    }
};

inline EnvGrid make_grid(int width, int height, double resolution_km, GridKind kind, double fill = 0.0) {
    EnvGrid g;
    g.width = width;
    g.height = height;
    g.resolution_km = resolution_km;
    g.kind = kind;
    g.values.assign(std::size_t(width) * height, fill);
    if (width <= 0 || height <= 0 || resolution_km <= 0.0)
        throw ParamError("grid dimensions and resolution must be positive");
    return g;
}

inline double nonzero_fraction(const EnvGrid& g) {
    std::size_t n = 0;
    for (double v : g.values)
        if (v != 0.0) ++n;
    return g.values.empty() ? 0.0 : double(n) / double(g.values.size());
}

// One coarse snapshot of the scene, usable from valid_at_cycle onward.
struct GeoFrame {
    int valid_at_cycle = 0;
    EnvGrid grid;
};

// Degraded wide-area view of the truth grid: coarser, stale, noisy.
struct GeoOverlay {
    std::vector<GeoFrame> frames;     // ascending valid_at_cycle
    int cadence_cycles = 0;           // 0 for a single-frame overlay
    int latency_cycles = 0;           // age of the data when received
    int coarsening = 1;               // truth cells per overlay cell, per axis

    void validate(const EnvGrid& truth) const {
        if (coarsening < 1) throw ParamError("overlay coarsening must be >= 1");
        if (frames.empty()) throw ParamError("overlay must hold at least one frame");
        int expect_w = (truth.width + coarsening - 1) / coarsening;
        int expect_h = (truth.height + coarsening - 1) / coarsening;
        int prev = -1;
        for (const GeoFrame& f : frames) {
            if (f.valid_at_cycle < 0 || f.valid_at_cycle <= prev)
                throw ParamError("overlay frames must have ascending non-negative cycles");
            prev = f.valid_at_cycle;
            f.grid.validate();
            if (f.grid.width != expect_w || f.grid.height != expect_h)
                throw ParamError("overlay frame dimensions do not match truth/coarsening");
            if (f.grid.kind != truth.kind)
                throw ParamError("overlay frame kind does not match truth kind");
        }
    }
};

}  // namespace dt
