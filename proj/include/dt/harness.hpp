#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dt/episode.hpp"
#include "dt/errors.hpp"
#include "dt/planners.hpp"
#include "dt/scenario.hpp"
#include "dt/slew.hpp"
#include "dt/transition.hpp"

namespace dt {

enum class PlannerKind {
    NadirOnly,
    Greedy,
    GreedyHistorical,
    HierUniform,
    HierPreinformed,
    HierGeoInformed,
};

inline const char* planner_id(PlannerKind k) {
    switch (k) {
        case PlannerKind::NadirOnly: return "NO";
        case PlannerKind::Greedy: return "G";
        case PlannerKind::GreedyHistorical: return "GH";
        case PlannerKind::HierUniform: return "U";
        case PlannerKind::HierPreinformed: return "P";
        case PlannerKind::HierGeoInformed: return "GSDI";
    }
    return "?";
}

// Canonical reporting order.
inline const std::vector<PlannerKind>& all_planners() {
    static const std::vector<PlannerKind> order = {
        PlannerKind::NadirOnly,        PlannerKind::Greedy,
        PlannerKind::GreedyHistorical, PlannerKind::HierUniform,
        PlannerKind::HierPreinformed,  PlannerKind::HierGeoInformed,
    };
    return order;
}

inline std::optional<PlannerKind> planner_from_id(std::string_view id) {
    for (PlannerKind k : all_planners())
        if (id == planner_id(k)) return k;
    return std::nullopt;
}

// Preinformed distribution needs targets known in advance; geo-informed needs
// an overlay to read.
inline bool planner_compatible(PlannerKind k, const Scenario& s) {
    if (k == PlannerKind::HierPreinformed)
        return s.utility_kind == UtilityKind::CAPD || s.utility_kind == UtilityKind::CART;
    if (k == PlannerKind::HierGeoInformed) return s.overlay.has_value();
    return true;
}

namespace detail {

template <typename StepFn>
inline EpisodeResult run_stepwise(const PlanningContext& ctx, StepFn&& step) {
    EpisodeResult res;
    SatState st = initial_state(ctx.flight, ctx.scenario->truth);
    for (int t = 0; t < ctx.flight.n_cycles; ++t) {
        Action a = step(st);
        double u = a.observe ? ctx.util(a.target_col, a.target_row) : 0.0;
        res.trace.push_back({t, a, u});
        res.total_utility += u;
        st = transition(st, a, ctx.flight, ctx.slew, *ctx.scenario);
    }
    res.observations_used = st.obs_used;
    return res;
}

}  // namespace detail

inline EpisodeResult run_episode(const PlanningContext& ctx, PlannerKind kind,
                                 const BeamConfig& cfg = {}) {
    auto t0 = std::chrono::steady_clock::now();
    EpisodeResult res;
    switch (kind) {
        case PlannerKind::NadirOnly: {
            std::vector<Action> plan = plan_nadir_only(ctx.flight, ctx.scenario->truth);
            res = detail::run_stepwise(ctx, [&](const SatState& s) { return plan[s.cycle]; });
            break;
        }
        case PlannerKind::Greedy:
            res = detail::run_stepwise(ctx, [&](const SatState& s) { return step_greedy(ctx, s); });
            break;
        case PlannerKind::GreedyHistorical: {
            GreedyHistory h;
            res = detail::run_stepwise(
                ctx, [&](const SatState& s) { return step_greedy_historical(ctx, s, h); });
            break;
        }
        case PlannerKind::HierUniform:
            res = run_hierarchical(ctx, DistributorKind::Uniform, cfg);
            break;
        case PlannerKind::HierPreinformed:
            res = run_hierarchical(ctx, DistributorKind::Preinformed, cfg);
            break;
        case PlannerKind::HierGeoInformed:
            res = run_hierarchical(ctx, DistributorKind::GeoInformed, cfg);
            break;
    }
    res.scenario_id = ctx.scenario->id;
    res.planner_id = planner_id(kind);
    res.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

inline EpisodeResult run_episode(const Scenario& sc, PlannerKind kind, const BeamConfig& cfg = {}) {
    PlanningContext ctx = PlanningContext::build(sc);
    return run_episode(ctx, kind, cfg);
}

// ---- independent feasibility replay ----

struct Violation {
    int cycle = 0;
    Constraint constraint = Constraint::Bounds;
    std::string detail;
};

// Walks a trace with its own bookkeeping, validating every action against the
// slew, envelope, visibility and budget rules. Deliberately does not call the
// transition function so planner and simulator bugs cannot cancel out.
inline std::optional<Violation> replay_check(const Scenario& sc,
                                             const std::vector<TraceEntry>& trace) {
    const EnvGrid& g = sc.truth;
    const FlightPath& f = sc.flight;
    SlewModel m = make_slew_model(f);
    int point_col = nadir_col_at(f, g, 0);
    int point_row = nadir_row(g);
    int obs_used = 0;
    std::optional<PendingSlew> pending;

    for (std::size_t i = 0; i < trace.size(); ++i) {
        const TraceEntry& e = trace[i];
        const Action& a = e.action;
        int t = e.cycle;
        if (t != int(i))
            return Violation{t, Constraint::Bounds, "trace cycles are not contiguous from 0"};
        if (!g.in_bounds(a.target_col, a.target_row))
            return Violation{t, Constraint::Bounds, "target cell outside the grid"};

        bool at_rest_on_target = false;
        if (pending) {
            if (a.target_col != pending->target_col || a.target_row != pending->target_row)
                return Violation{t, Constraint::SlewInProgress,
                                 "action deviates from the pending slew"};
            if (pending->remaining_cycles > 1) {
                if (a.observe)
                    return Violation{t, Constraint::SlewInProgress,
                                     "observation before the slew arrived"};
                --pending->remaining_cycles;
            } else {
                point_col = a.target_col;
                point_row = a.target_row;
                pending.reset();
                at_rest_on_target = true;
            }
        } else {
            auto n = slew_cycles(m, f, g, point_col, point_row, a.target_col, a.target_row, t);
            if (!n) return Violation{t, Constraint::Envelope, "target cell unreachable"};
            if (*n == 1) {
                point_col = a.target_col;
                point_row = a.target_row;
                at_rest_on_target = true;
            } else {
                if (a.observe)
                    return Violation{t, Constraint::SlewInProgress,
                                     "observation on the cycle a multi-cycle slew began"};
                pending = PendingSlew{a.target_col, a.target_row, *n - 1};
            }
        }

        if (a.observe) {
            if (!at_rest_on_target)
                return Violation{t, Constraint::SlewInProgress, "observation while not at rest"};
            if (obs_used >= kObservationBudget)
                return Violation{t, Constraint::Budget, "observation budget exceeded"};
            if (!lookahead_view(f, sc, t).contains(a.target_col))
                return Violation{t, Constraint::Visibility,
                                 "observed cell outside the lookahead view"};
            ++obs_used;
        }
    }
    return std::nullopt;
}

// ---- exhaustive oracle ----

inline constexpr double kBruteForceCap = 1e7;

// Exhaustive search over the same child tree the beam explores, unpruned.
// Refuses instances whose sequence-count estimate exceeds the cap.
inline Plan brute_force_optimal(const PlanningContext& ctx, const SatState& root, int depth,
                                int obs_allowed) {
    double estimate = std::pow(3.0, depth);
    if (estimate > kBruteForceCap) throw InstanceTooLargeError(estimate, kBruteForceCap);
    LookaheadView view = lookahead_view(ctx.flight, *ctx.scenario, root.cycle);

    BeamNode best;
    bool have = false;
    std::vector<Action> path;
    auto dfs = [&](auto&& self, const SatState& s, double util, int obs, int d) -> void {
        if (d == depth) {
            BeamNode leaf{s, util, obs, path};
            if (!have || beam_node_less(leaf, best)) {
                best = std::move(leaf);
                have = true;
            }
            return;
        }
        std::vector<Action> kids;
        generate_children(ctx, s, std::min(obs_allowed - obs, kObservationBudget - s.obs_used),
                          depth - d, view.visible_through_col, kids);
        for (const Action& a : kids) {
            SatState ns = transition(s, a, ctx.flight, ctx.slew, *ctx.scenario);
            path.push_back(a);
            self(self, ns, util + (a.observe ? ctx.util(a.target_col, a.target_row) : 0.0),
                 obs + (a.observe ? 1 : 0), d + 1);
            path.pop_back();
        }
    };
    dfs(dfs, root, 0.0, 0, 0);
    return Plan{best.actions, best.utility, best.obs};
}

inline Plan brute_force_optimal(const Scenario& sc, int obs_allowed = kObservationBudget) {
    PlanningContext ctx = PlanningContext::build(sc);
    return brute_force_optimal(ctx, initial_state(ctx.flight, sc.truth), ctx.flight.n_cycles,
                               obs_allowed);
}

// ---- aggregation ----

// One line of the per-episode results table. A row with ok=false records a
// planner/scenario pairing that was skipped as incompatible.
struct ResultRow {
    std::string scenario_id;
    std::string planner_id;
    bool ok = true;
    double utility = 0.0;
    int obs_used = 0;
    double ub_utility = 0.0;
    double wall_ms = 0.0;
};

struct AggregateRow {
    std::string planner_id;
    double total_utility = 0.0;
    double pct_of_ub = 0.0;
};

// Per-planner utility totals as a percentage of the summed upper bound, one
// row per planner in canonical order plus a final UB row. Every planner must
// cover the same scenario set; skipped pairings are ignored.
inline std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows) {
    std::map<std::string, std::set<std::string>> seen;
    std::map<std::string, double> totals;
    std::map<std::string, double> ub_by_scenario;
    for (const ResultRow& r : rows) {
        if (!r.ok) continue;
        if (!seen[r.planner_id].insert(r.scenario_id).second)
            throw AggregationError("duplicate result for scenario '" + r.scenario_id +
                                   "', planner '" + r.planner_id + "'");
        totals[r.planner_id] += r.utility;
        auto [it, fresh] = ub_by_scenario.emplace(r.scenario_id, r.ub_utility);
        if (!fresh && it->second != r.ub_utility)
            throw AggregationError("inconsistent upper bound for scenario '" + r.scenario_id +
                                   "'");
    }
    if (seen.empty()) throw AggregationError("no results to aggregate");
    const std::set<std::string>& ref = seen.begin()->second;
    for (const auto& [planner, ids] : seen)
        if (ids != ref)
            throw AggregationError("planner '" + planner +
                                   "' covers a different scenario set");
    double ub_total = 0.0;
    for (const auto& [id, ub] : ub_by_scenario) ub_total += ub;

    std::vector<AggregateRow> out;
    for (PlannerKind k : all_planners()) {
        auto it = totals.find(planner_id(k));
        if (it == totals.end()) continue;
        double pct = ub_total > 0.0 ? 100.0 * it->second / ub_total : 0.0;
        out.push_back({it->first, it->second, pct});
    }
    out.push_back({"UB", ub_total, ub_total > 0.0 ? 100.0 : 0.0});
    return out;
}

}  // namespace dt
