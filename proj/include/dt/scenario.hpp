#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "dt/errors.hpp"
#include "dt/flight.hpp"
#include "dt/grid.hpp"

namespace dt {

// CA: clear/cloudy. CAPD: clear weighted by population density.
// CART: clear weighted by target squares. SH: storm precipitation rate.
enum class UtilityKind { CA, CAPD, CART, SH };

inline const char* utility_kind_name(UtilityKind k) {
    switch (k) {
        case UtilityKind::CA: return "CA";
        case UtilityKind::CAPD: return "CAPD";
        case UtilityKind::CART: return "CART";
        case UtilityKind::SH: return "SH";
    }
    return "?";
}

// One flyover: a truth grid, optional degraded overlay and static side grids,
// plus the flight that crosses them.
struct Scenario {
    std::string id;
    EnvGrid truth;
    std::optional<GeoOverlay> overlay;
    std::optional<EnvGrid> population;   // CAPD
    std::optional<EnvGrid> targets;      // CART
    FlightPath flight;
    UtilityKind utility_kind = UtilityKind::CA;
    std::uint64_t seed = 0;
    double sh_r_max = 1.0;               // SH utility normalizer, fixed at generation

    void validate() const {
        truth.validate();
        if (flight.n_cycles <= 0) throw ParamError("scenario flight has no cycles");
        double span_km = flight.n_cycles * flight.km_per_cycle();
        if (truth.width * truth.resolution_km < span_km)
            throw ParamError("truth grid does not span the flight's along-track motion");
        if (overlay) overlay->validate(truth);
        auto check_side = [&](const std::optional<EnvGrid>& g, GridKind kind, const char* label) {
            if (!g) return;
            g->validate();
            if (g->kind != kind) throw ParamError(std::string(label) + " grid has the wrong kind");
            if (g->width != truth.width || g->height != truth.height ||
                g->resolution_km != truth.resolution_km)
                throw ParamError(std::string(label) + " grid geometry does not match truth");
        };
        check_side(population, GridKind::Population, "population");
        check_side(targets, GridKind::TargetMask, "targets");
        if (utility_kind == UtilityKind::CAPD && !population)
            throw ParamError("CAPD scenario needs a population grid");
        if (utility_kind == UtilityKind::CART && !targets)
            throw ParamError("CART scenario needs a target grid");
        if (utility_kind == UtilityKind::SH && sh_r_max <= 0.0)
            throw ParamError("SH scenario needs a positive rate normalizer");
        if ((utility_kind == UtilityKind::CA || utility_kind == UtilityKind::CAPD ||
             utility_kind == UtilityKind::CART) &&
            truth.kind != GridKind::CloudMask)
            throw ParamError("cloud-based scenario needs a cloudmask truth grid");
        if (utility_kind == UtilityKind::SH && truth.kind != GridKind::Precip)
            throw ParamError("SH scenario needs a precip truth grid");
    }
};

// Truth restricted to what the forward sensor has already swept over:
// every column up to and including visible_through_col.
struct LookaheadView {
    const EnvGrid* truth = nullptr;
    int visible_through_col = -1;

    bool contains(int col) const { return col >= 0 && col <= visible_through_col; }
    double value(int col, int row) const { return truth->at(col, row); }
};

inline LookaheadView lookahead_view(const FlightPath& f, const Scenario& s, int cycle) {
    LookaheadView v;
    v.truth = &s.truth;
    int ahead = int(std::floor(f.lookahead_km / s.truth.resolution_km + 1e-9));
    v.visible_through_col = std::min(s.truth.width - 1, nadir_col_at(f, s.truth, cycle) + ahead);
    return v;
}

// Index of the newest overlay frame usable at `cycle`, or nullopt.
inline std::optional<std::size_t> geo_frame_index(const Scenario& s, int cycle) {
    if (!s.overlay) return std::nullopt;
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < s.overlay->frames.size(); ++i) {
        if (s.overlay->frames[i].valid_at_cycle <= cycle) best = i;
    }
    return best;
}

inline const EnvGrid* geo_view(const Scenario& s, int cycle) {
    auto idx = geo_frame_index(s, cycle);
    if (!idx) return nullptr;
    return &s.overlay->frames[*idx].grid;
}

}  // namespace dt
