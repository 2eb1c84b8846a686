#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dt/episode.hpp"
#include "dt/errors.hpp"
#include "dt/flight.hpp"
#include "dt/grid.hpp"
#include "dt/scenario.hpp"
#include "dt/slew.hpp"
#include "dt/transition.hpp"
#include "dt/utility.hpp"

namespace dt {

struct BeamConfig {
    int depth = 10;  // cycles planned per partition
    int width = 3;   // surviving candidates per level
};

enum class DistributorKind { Uniform, Preinformed, GeoInformed };

inline const char* distributor_planner_id(DistributorKind d) {
    switch (d) {
        case DistributorKind::Uniform: return "U";
        case DistributorKind::Preinformed: return "P";
        case DistributorKind::GeoInformed: return "GSDI";
    }
    return "?";
}

// Precomputed per-scenario tables shared by every planner invocation. The
// range-max structures answer "best cell in a column span of the envelope"
// queries so candidate selection never rescans the grid.
struct PlanningContext {
    const Scenario* scenario = nullptr;
    FlightPath flight;
    SlewModel slew;
    UtilityModel model;
    UtilityMap truth_util;
    UtilityMap clear_value;        // reward if clear; CAPD and CART only
    int row_lo = 0, row_hi = -1;   // envelope rows, constant over the flight
    std::vector<double> col_max;   // per column, max reward over envelope rows
    std::vector<double> down;      // per column, running max from row_lo down to the row
    std::vector<double> up;        // per column, running max from the row up to row_hi
    std::vector<std::vector<double>> st_val;  // sparse table over col_max
    std::vector<std::vector<int>> st_col;     // leftmost column attaining st_val
    std::vector<int> floor_log2;

    double util(int col, int row) const { return truth_util.at(col, row); }

    static PlanningContext build(const Scenario& s) {
        PlanningContext ctx;
        ctx.scenario = &s;
        ctx.flight = s.flight;
        ctx.slew = make_slew_model(s.flight);
        ctx.model = make_utility_model(s);
        ctx.truth_util = truth_utility_map(ctx.model, s);
        if (s.utility_kind == UtilityKind::CAPD || s.utility_kind == UtilityKind::CART)
            ctx.clear_value = known_target_map(ctx.model, s);

        const EnvGrid& g = s.truth;
        CellRect env = sensor_envelope_rect(ctx.slew, ctx.flight, g, 0);
        ctx.row_lo = env.row_lo;
        ctx.row_hi = env.row_hi;
        int w = g.width;
        ctx.down.assign(ctx.truth_util.values.size(), 0.0);
        ctx.up.assign(ctx.truth_util.values.size(), 0.0);
        for (int r = ctx.row_lo; r <= ctx.row_hi; ++r) {
            const double* src = ctx.truth_util.values.data() + std::size_t(r) * w;
            double* dst = ctx.down.data() + std::size_t(r) * w;
            if (r == ctx.row_lo) {
                std::copy(src, src + w, dst);
            } else {
                const double* prev = ctx.down.data() + std::size_t(r - 1) * w;
                for (int c = 0; c < w; ++c) dst[c] = std::max(prev[c], src[c]);
            }
        }
        for (int r = ctx.row_hi; r >= ctx.row_lo; --r) {
            const double* src = ctx.truth_util.values.data() + std::size_t(r) * w;
            double* dst = ctx.up.data() + std::size_t(r) * w;
            if (r == ctx.row_hi) {
                std::copy(src, src + w, dst);
            } else {
                const double* prev = ctx.up.data() + std::size_t(r + 1) * w;
                for (int c = 0; c < w; ++c) dst[c] = std::max(prev[c], src[c]);
            }
        }
        ctx.col_max.assign(ctx.down.begin() + std::size_t(ctx.row_hi) * w,
                           ctx.down.begin() + std::size_t(ctx.row_hi) * w + w);

        ctx.floor_log2.assign(w + 1, 0);
        for (int i = 2; i <= w; ++i) ctx.floor_log2[i] = ctx.floor_log2[i / 2] + 1;
        int levels = ctx.floor_log2[w] + 1;
        ctx.st_val.resize(levels);
        ctx.st_col.resize(levels);
        ctx.st_val[0] = ctx.col_max;
        ctx.st_col[0].resize(w);
        for (int c = 0; c < w; ++c) ctx.st_col[0][c] = c;
        for (int l = 1; l < levels; ++l) {
            int span = 1 << l;
            int count = w - span + 1;
            ctx.st_val[l].resize(std::max(count, 0));
            ctx.st_col[l].resize(std::max(count, 0));
            for (int i = 0; i < count; ++i) {
                double a = ctx.st_val[l - 1][i], b = ctx.st_val[l - 1][i + span / 2];
                if (a >= b) {
                    ctx.st_val[l][i] = a;
                    ctx.st_col[l][i] = ctx.st_col[l - 1][i];
                } else {
                    ctx.st_val[l][i] = b;
                    ctx.st_col[l][i] = ctx.st_col[l - 1][i + span / 2];
                }
            }
        }
        return ctx;
    }

    // Max of col_max over [lo, hi] with the leftmost attaining column.
    void range_max(int lo, int hi, double& val, int& col) const {
        int k = floor_log2[hi - lo + 1];
        double a = st_val[k][lo], b = st_val[k][hi - (1 << k) + 1];
        if (a >= b) {
            val = a;
            col = st_col[k][lo];
        } else {
            val = b;
            col = st_col[k][hi - (1 << k) + 1];
        }
    }

    // Max over one column's envelope rows minus [skip_lo, skip_hi].
    // Returns a negative sentinel when every row is excluded.
    double col_max_excluding(int col, int skip_lo, int skip_hi) const {
        int w = truth_util.width;
        double best = -1.0;
        if (skip_lo > row_lo) best = down[std::size_t(skip_lo - 1) * w + col];
        if (skip_hi < row_hi) best = std::max(best, up[std::size_t(skip_hi + 1) * w + col]);
        return best;
    }

    // Smallest envelope row of `col` attaining `val`, skipping [skip_lo, skip_hi].
    int col_argrow(int col, double val, int skip_lo, int skip_hi) const {
        for (int r = row_lo; r <= row_hi; ++r) {
            if (r >= skip_lo && r <= skip_hi) continue;
            if (truth_util.at(col, r) == val) return r;
        }
        return -1;
    }
};

// Fallback action when a node has nothing worth doing: drift with the nadir
// cell, starting the recentering slew at once when the pointing has already
// decayed beyond a one-cycle recovery; coasting longer at the current cell
// only deepens the backlog the next plan inherits.
inline Action default_hold_action(const PlanningContext& ctx, const SatState& s) {
    const EnvGrid& g = ctx.scenario->truth;
    int rc = nadir_col_at(ctx.flight, g, s.cycle + 1);
    int rr = nadir_row(g);
    auto recenter =
        slew_cycles(ctx.slew, ctx.flight, g, s.point_col, s.point_row, rc, rr, s.cycle);
    if (recenter && *recenter == 1) return Action{rc, rr, false};
    auto hold = slew_cycles(ctx.slew, ctx.flight, g, s.point_col, s.point_row, s.point_col,
                            s.point_row, s.cycle);
    if (hold && *hold == 1) return Action{s.point_col, s.point_row, false};
    return Action{rc, rr, false};
}

namespace detail {

// Best and second-best cells of a rectangle by (reward desc, col desc, row
// asc); downrange ties keep the pointing fresh for the cycles that follow.
struct TopTwo {
    Cell best{}, second{};
    double best_val = -1.0, second_val = -1.0;
    bool has_best = false, has_second = false;
};

inline TopTwo top_two_cells(const PlanningContext& ctx, const CellRect& rect) {
    TopTwo t;
    for (int c = rect.col_hi; c >= rect.col_lo; --c) {
        for (int r = rect.row_lo; r <= rect.row_hi; ++r) {
            double v = ctx.util(c, r);
            if (v > t.best_val) {
                t.second = t.best;
                t.second_val = t.best_val;
                t.has_second = t.has_best;
                t.best = {c, r};
                t.best_val = v;
                t.has_best = true;
            } else if (v > t.second_val) {
                t.second = {c, r};
                t.second_val = v;
                t.has_second = true;
            }
        }
    }
    return t;
}

}  // namespace detail

// Highest-reward cell whose slew takes between 2 and `rem` cycles, visible
// through view_limit; ties prefer the smaller column, then the smaller row.
// rect1 (the one-cycle set) is excluded. Exactness rests on the reachable set
// for each arrival being a rectangle; when the per-axis angle windows cannot
// be shown to cover the whole envelope the per-cell fallback runs instead.
inline std::optional<Cell> multi_slew_best(const PlanningContext& ctx, const SatState& s, int rem,
                                           int view_limit, const CellRect& rect1) {
    if (rem < 2) return std::nullopt;
    const EnvGrid& g = ctx.scenario->truth;
    const SlewModel& m = ctx.slew;
    const FlightPath& f = ctx.flight;

    double best_val = -1.0;
    Cell best{};
    bool found = false;
    auto offer = [&](double v, int col, int row) {
        if (v > best_val) {
            best_val = v;
            best = {col, row};
            found = true;
        }
    };

    CellRect rect2 = arrival_rect(m, f, g, s.point_col, s.point_row, s.cycle, 2, view_limit);
    if (rem == 2) {
        for (int c = rect2.col_lo; c <= rect2.col_hi; ++c)
            for (int r = rect2.row_lo; r <= rect2.row_hi; ++r) {
                if (rect1.contains(c, r)) continue;
                offer(ctx.util(c, r), c, r);
            }
        return found ? std::optional<Cell>(best) : std::nullopt;
    }

    double from_along = cell_along_km(g, s.point_col);
    double roll_from = std::atan(cell_cross_km(g, s.point_row) / m.altitude_km) * kDeg;
    bool windows_cover = true;
    for (int n = 3; n <= rem; ++n) {
        double a = max_angle_for_time(m, n * f.cycle_seconds);
        double fp = std::atan((from_along - f.nadir_along_km(s.cycle + n)) / m.altitude_km) * kDeg;
        if (a < m.max_off_nadir_deg + std::abs(fp) + 1e-9 ||
            a < m.max_off_nadir_deg + std::abs(roll_from) + 1e-9) {
            windows_cover = false;
            break;
        }
    }

    if (!windows_cover) {
        CellRect lo_env = sensor_envelope_rect(m, f, g, s.cycle + 2);
        CellRect hi_env = sensor_envelope_rect(m, f, g, s.cycle + rem);
        int c_lo = lo_env.col_lo;
        int c_hi = std::min(hi_env.col_hi, view_limit);
        for (int c = c_lo; c <= c_hi; ++c)
            for (int r = lo_env.row_lo; r <= lo_env.row_hi; ++r) {
                if (rect1.contains(c, r)) continue;
                auto n = slew_cycles(m, f, g, s.point_col, s.point_row, c, r, s.cycle);
                if (n && *n <= rem) offer(ctx.util(c, r), c, r);
            }
        return found ? std::optional<Cell>(best) : std::nullopt;
    }

    // With the angle windows covering the envelope, everything in the arrival
    // envelopes for 3..rem collapses to one column interval over full envelope
    // rows; only a short two-cycle sliver trails behind it.
    int lo3 = sensor_envelope_rect(m, f, g, s.cycle + 3).col_lo;
    int hiR = std::min(sensor_envelope_rect(m, f, g, s.cycle + rem).col_hi, view_limit);

    int sliver_hi = std::min(rect2.col_hi, lo3 - 1);
    for (int c = rect2.col_lo; c <= sliver_hi; ++c)
        for (int r = rect2.row_lo; r <= rect2.row_hi; ++r) {
            if (rect1.contains(c, r)) continue;
            offer(ctx.util(c, r), c, r);
        }

    int deferred_col = -1;          // winning candidate found through the tables,
    int deferred_skip_lo = 1, deferred_skip_hi = 0;  // row resolved at the end
    if (lo3 <= hiR) {
        auto offer_range = [&](int lo, int hi) {
            if (lo > hi) return;
            double v;
            int c;
            ctx.range_max(lo, hi, v, c);
            if (v > best_val) {
                best_val = v;
                best = {c, -1};
                deferred_col = c;
                deferred_skip_lo = 1;
                deferred_skip_hi = 0;
                found = true;
            }
        };
        bool overlap = !rect1.empty() && rect1.col_hi >= lo3 && rect1.col_lo <= hiR;
        if (!overlap) {
            offer_range(lo3, hiR);
        } else {
            offer_range(lo3, std::min(hiR, rect1.col_lo - 1));
            for (int c = std::max(lo3, rect1.col_lo); c <= std::min(hiR, rect1.col_hi); ++c) {
                double v = ctx.col_max_excluding(c, rect1.row_lo, rect1.row_hi);
                if (v > best_val) {
                    best_val = v;
                    best = {c, -1};
                    deferred_col = c;
                    deferred_skip_lo = rect1.row_lo;
                    deferred_skip_hi = rect1.row_hi;
                    found = true;
                }
            }
            offer_range(std::max(lo3, rect1.col_hi + 1), hiR);
        }
    }
    if (!found) return std::nullopt;
    if (best.row < 0)
        best.row = ctx.col_argrow(deferred_col, best_val, deferred_skip_lo, deferred_skip_hi);
    return best;
}

// Children of a node in the planning tree, shared by beam search and the
// exhaustive optimizer. A pending slew forces its continuation; otherwise the
// node may observe the best or second-best one-cycle cell, begin a slew
// toward the best cell reachable within the remaining depth, or hold.
inline void generate_children(const PlanningContext& ctx, const SatState& s, int obs_left, int rem,
                              int view_limit, std::vector<Action>& out) {
    out.clear();
    if (s.pending_slew) {
        const PendingSlew& p = *s.pending_slew;
        out.push_back({p.target_col, p.target_row, p.remaining_cycles == 1 && obs_left > 0});
        return;
    }
    const EnvGrid& g = ctx.scenario->truth;
    CellRect rect1 =
        one_cycle_rect(ctx.slew, ctx.flight, g, s.point_col, s.point_row, s.cycle, view_limit);
    if (obs_left > 0 && !rect1.empty()) {
        detail::TopTwo t = detail::top_two_cells(ctx, rect1);
        out.push_back({t.best.col, t.best.row, true});
        if (t.has_second) out.push_back({t.second.col, t.second.row, true});
    }
    if (obs_left > 0 && rem >= 2) {
        auto champ = multi_slew_best(ctx, s, rem, view_limit, rect1);
        if (champ)
            out.push_back({champ->col, champ->row, false});
        else
            out.push_back(default_hold_action(ctx, s));
    }
    if (out.empty()) out.push_back(default_hold_action(ctx, s));
}

struct BeamNode {
    SatState state;
    double utility = 0.0;
    int obs = 0;
    std::vector<Action> actions;
};

// Candidate ranking: most reward, then fewest observations spent, then the
// lexicographically smallest action sequence.
inline bool beam_node_less(const BeamNode& a, const BeamNode& b) {
    if (a.utility != b.utility) return a.utility > b.utility;
    if (a.obs != b.obs) return a.obs < b.obs;
    return std::lexicographical_compare(a.actions.begin(), a.actions.end(), b.actions.begin(),
                                        b.actions.end(), action_less);
}

struct Plan {
    std::vector<Action> actions;
    double planned_utility = 0.0;
    int planned_obs = 0;
};

// Fixed-depth beam search from `root`, spending at most obs_allowed
// observations. Rewards are true utilities of cells inside the lookahead view
// at the root cycle; slews never outlast the planned depth.
inline Plan beam_search(const PlanningContext& ctx, const SatState& root, int obs_allowed,
                        const BeamConfig& cfg) {
    LookaheadView view = lookahead_view(ctx.flight, *ctx.scenario, root.cycle);
    std::vector<BeamNode> frontier;
    frontier.push_back({root, 0.0, 0, {}});
    std::vector<BeamNode> pool;
    std::vector<Action> kids;
    for (int d = 0; d < cfg.depth; ++d) {
        pool.clear();
        for (const BeamNode& node : frontier) {
            int obs_left =
                std::min(obs_allowed - node.obs, kObservationBudget - node.state.obs_used);
            generate_children(ctx, node.state, obs_left, cfg.depth - d,
                              view.visible_through_col, kids);
            for (const Action& a : kids) {
                BeamNode child;
                child.state = transition(node.state, a, ctx.flight, ctx.slew, *ctx.scenario);
                child.utility =
                    node.utility + (a.observe ? ctx.util(a.target_col, a.target_row) : 0.0);
                child.obs = node.obs + (a.observe ? 1 : 0);
                child.actions = node.actions;
                child.actions.push_back(a);
                pool.push_back(std::move(child));
            }
        }
        std::sort(pool.begin(), pool.end(), beam_node_less);
        if (int(pool.size()) > cfg.width) pool.resize(cfg.width);
        frontier.swap(pool);
    }
    const BeamNode& best = frontier.front();
    return Plan{best.actions, best.utility, best.obs};
}

// Evenly spaced nadir observations: observation i fires at cycle
// floor(i * n_cycles / budget); every cycle tracks the cell arriving under
// the platform. Flights shorter than the budget collapse duplicate cycles.
inline std::vector<Action> plan_nadir_only(const FlightPath& f, const EnvGrid& g) {
    std::vector<char> observe(f.n_cycles, 0);
    for (int i = 0; i < kObservationBudget; ++i) {
        long long c = static_cast<long long>(i) * f.n_cycles / kObservationBudget;
        if (c < f.n_cycles) observe[static_cast<std::size_t>(c)] = 1;
    }
    std::vector<Action> plan;
    plan.reserve(f.n_cycles);
    int nr = nadir_row(g);
    for (int t = 0; t < f.n_cycles; ++t)
        plan.push_back({nadir_col_at(f, g, t + 1), nr, observe[t] != 0});
    return plan;
}

namespace detail {

// Argmax of a one-cycle rectangle with greedy tie-breaking: reward first,
// then the shortest slew, then the smallest (row, col).
inline Cell greedy_pick(const PlanningContext& ctx, const SatState& s, const CellRect& rect) {
    double vmax = -1.0;
    for (int r = rect.row_lo; r <= rect.row_hi; ++r)
        for (int c = rect.col_lo; c <= rect.col_hi; ++c) vmax = std::max(vmax, ctx.util(c, r));

    const EnvGrid& g = ctx.scenario->truth;
    const SlewModel& m = ctx.slew;
    double arrival_nadir = ctx.flight.nadir_along_km(s.cycle + 1);
    double fp = std::atan((cell_along_km(g, s.point_col) - arrival_nadir) / m.altitude_km);
    double fr = std::atan(cell_cross_km(g, s.point_row) / m.altitude_km);
    std::vector<double> tp(rect.col_hi - rect.col_lo + 1), tr(rect.row_hi - rect.row_lo + 1);
    for (int c = rect.col_lo; c <= rect.col_hi; ++c) {
        double p = std::atan((cell_along_km(g, c) - arrival_nadir) / m.altitude_km);
        tp[c - rect.col_lo] = slew_time_1axis(m, (p - fp) * kDeg);
    }
    for (int r = rect.row_lo; r <= rect.row_hi; ++r) {
        double a = std::atan(cell_cross_km(g, r) / m.altitude_km);
        tr[r - rect.row_lo] = slew_time_1axis(m, (a - fr) * kDeg);
    }

    Cell best{};
    double best_t = std::numeric_limits<double>::infinity();
    for (int r = rect.row_lo; r <= rect.row_hi; ++r)
        for (int c = rect.col_lo; c <= rect.col_hi; ++c) {
            if (ctx.util(c, r) != vmax) continue;
            double t = std::max(tp[c - rect.col_lo], tr[r - rect.row_lo]);
            if (t < best_t) {
                best_t = t;
                best = {c, r};
            }
        }
    return best;
}

}  // namespace detail

// One-step lookahead: observe the best one-cycle cell every cycle until the
// budget runs out (the budget's worth of cycles at one per cycle), then coast.
inline Action step_greedy(const PlanningContext& ctx, const SatState& s) {
    if (s.pending_slew)
        return Action{s.pending_slew->target_col, s.pending_slew->target_row, false};
    if (s.cycle < kObservationBudget && s.obs_used < kObservationBudget) {
        LookaheadView view = lookahead_view(ctx.flight, *ctx.scenario, s.cycle);
        CellRect rect = one_cycle_rect(ctx.slew, ctx.flight, ctx.scenario->truth, s.point_col,
                                       s.point_row, s.cycle, view.visible_through_col);
        if (!rect.empty()) {
            Cell pick = detail::greedy_pick(ctx, s, rect);
            return Action{pick.col, pick.row, true};
        }
    }
    return default_hold_action(ctx, s);
}

struct GreedyHistory {
    double sum = 0.0;
    long long count = 0;
};

// Greedy with a value filter: observe only when the best reachable reward
// beats the running mean of best-reachable rewards (the current cycle
// included), so early mediocre cells are left for better ones downstream.
inline Action step_greedy_historical(const PlanningContext& ctx, const SatState& s,
                                     GreedyHistory& h) {
    LookaheadView view = lookahead_view(ctx.flight, *ctx.scenario, s.cycle);
    CellRect rect = one_cycle_rect(ctx.slew, ctx.flight, ctx.scenario->truth, s.point_col,
                                   s.point_row, s.cycle, view.visible_through_col);
    double umax = 0.0;
    Cell pick{};
    bool have = false;
    if (!rect.empty()) {
        pick = detail::greedy_pick(ctx, s, rect);
        umax = ctx.util(pick.col, pick.row);
        have = true;
    }
    double mean = (h.sum + umax) / double(h.count + 1);
    h.sum += umax;
    h.count += 1;
    if (s.pending_slew)
        return Action{s.pending_slew->target_col, s.pending_slew->target_row, false};
    if (have && s.obs_used < kObservationBudget && umax > mean)
        return Action{pick.col, pick.row, true};
    return default_hold_action(ctx, s);
}

// Omniscient bound: the sum of the 100 largest per-cycle envelope maxima,
// ignoring slew, budget-timing and visibility coupling entirely.
inline double upper_bound_utility(const PlanningContext& ctx) {
    const EnvGrid& g = ctx.scenario->truth;
    int n = ctx.flight.n_cycles;
    std::vector<double> maxima;
    maxima.reserve(n);
    std::vector<int> dq(g.width);
    int head = 0, tail = 0;
    int added_through = -1;
    for (int t = 0; t < n; ++t) {
        CellRect r = sensor_envelope_rect(ctx.slew, ctx.flight, g, t + 1);
        if (r.empty()) {
            maxima.push_back(0.0);
            continue;
        }
        while (added_through < r.col_hi) {
            ++added_through;
            while (tail > head && ctx.col_max[dq[tail - 1]] <= ctx.col_max[added_through]) --tail;
            dq[tail++] = added_through;
        }
        while (tail > head && dq[head] < r.col_lo) ++head;
        maxima.push_back(ctx.col_max[dq[head]]);
    }
    std::sort(maxima.begin(), maxima.end(), std::greater<>());
    int take = std::min<int>(kObservationBudget, int(maxima.size()));
    double sum = 0.0;
    for (int i = 0; i < take; ++i) sum += maxima[i];
    return sum;
}

// ---- budget partitions and distributors ----

inline constexpr int kPartitionCycles = 10;

inline int partition_count(int n_cycles) {
    return (n_cycles + kPartitionCycles - 1) / kPartitionCycles;
}
inline int partition_start(int k) { return k * kPartitionCycles; }
inline int partition_length(int n_cycles, int k) {
    return std::min(kPartitionCycles, n_cycles - partition_start(k));
}

inline std::vector<int> distribute_uniform(int budget, int parts) {
    std::vector<int> out(parts, budget / parts);
    for (int k = 0; k < budget % parts; ++k) ++out[k];
    return out;
}

// Largest-remainder apportionment; fractional ties go to the earlier
// partition, zero total weight degrades to the uniform split.
inline std::vector<int> apportion_by_weight(const std::vector<double>& weights, int budget) {
    int parts = int(weights.size());
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) return distribute_uniform(budget, parts);
    std::vector<int> out(parts);
    std::vector<std::pair<double, int>> frac(parts);
    int used = 0;
    for (int k = 0; k < parts; ++k) {
        double q = budget * weights[k] / total;
        out[k] = int(std::floor(q));
        frac[k] = {q - out[k], k};
        used += out[k];
    }
    std::sort(frac.begin(), frac.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (int i = 0; i < budget - used; ++i) ++out[frac[i].second];
    return out;
}

// Nearest-partition attribution of each column, by distance from the column
// to the partition's mid-flight nadir; ties go to the earlier partition.
inline std::vector<int> column_partition(const FlightPath& f, const EnvGrid& g) {
    int parts = partition_count(f.n_cycles);
    std::vector<double> mid(parts);
    for (int k = 0; k < parts; ++k) {
        int len = partition_length(f.n_cycles, k);
        mid[k] = (partition_start(k) + (len - 1) * 0.5) * f.km_per_cycle();
    }
    std::vector<int> part(g.width);
    int k = 0;
    for (int c = 0; c < g.width; ++c) {
        double along = c * g.resolution_km;
        while (k + 1 < parts && std::abs(mid[k + 1] - along) < std::abs(along - mid[k])) ++k;
        part[c] = k;
    }
    return part;
}

// Static-reward weights per partition, for models whose targets are known in
// advance of any cloud data.
inline std::vector<double> preinformed_weights(const PlanningContext& ctx) {
    if (ctx.clear_value.values.empty())
        throw UnsupportedModelError("preinformed distribution needs known targets");
    const EnvGrid& g = ctx.scenario->truth;
    std::vector<int> part = column_partition(ctx.flight, g);
    std::vector<double> w(partition_count(ctx.flight.n_cycles), 0.0);
    for (int r = 0; r < g.height; ++r) {
        const double* row = ctx.clear_value.values.data() + std::size_t(r) * g.width;
        for (int c = 0; c < g.width; ++c) w[part[c]] += row[c];
    }
    return w;
}

// Per-column anticipated reward under one overlay frame.
inline std::vector<double> anticipated_col_sums(const PlanningContext& ctx,
                                                const GeoFrame& frame) {
    const EnvGrid& g = ctx.scenario->truth;
    int cz = ctx.scenario->overlay->coarsening;
    std::vector<double> colsum(g.width, 0.0);
    for (int r = 0; r < g.height; ++r) {
        const double* fr = frame.grid.values.data() + std::size_t(r / cz) * frame.grid.width;
        switch (ctx.model.kind) {
            case UtilityKind::CA:
                for (int c = 0; c < g.width; ++c)
                    colsum[c] += fr[c / cz] != 0.0 ? kCloudyUtility : kClearUtility;
                break;
            case UtilityKind::CAPD:
            case UtilityKind::CART: {
                const double* cv = ctx.clear_value.values.data() + std::size_t(r) * g.width;
                for (int c = 0; c < g.width; ++c)
                    colsum[c] += fr[c / cz] != 0.0 ? kCloudyUtility : cv[c];
                break;
            }
            case UtilityKind::SH:
                for (int c = 0; c < g.width; ++c)
                    colsum[c] += cell_utility(ctx.model, fr[c / cz], 0.0, false);
                break;
        }
    }
    return colsum;
}

// Redistribute `budget` over partitions from `from_partition` on, weighted by
// the frame's anticipated reward; earlier partitions keep zero.
inline std::vector<int> distribute_geo(const PlanningContext& ctx, const GeoFrame& frame,
                                       int budget, int from_partition) {
    const EnvGrid& g = ctx.scenario->truth;
    int parts = partition_count(ctx.flight.n_cycles);
    std::vector<double> colsum = anticipated_col_sums(ctx, frame);
    std::vector<int> part = column_partition(ctx.flight, g);
    std::vector<double> w(parts - from_partition, 0.0);
    for (int c = 0; c < g.width; ++c)
        if (part[c] >= from_partition) w[part[c] - from_partition] += colsum[c];
    std::vector<int> tail = apportion_by_weight(w, budget);
    std::vector<int> out(parts, 0);
    std::copy(tail.begin(), tail.end(), out.begin() + from_partition);
    return out;
}

// Hierarchical planner: distribute the budget over 10-cycle partitions, then
// beam-search each partition under its allowance; unspent allowance carries
// forward. The geo-informed distributor re-plans the remaining budget
// whenever a fresh overlay frame has arrived by a partition start.
inline EpisodeResult run_hierarchical(const PlanningContext& ctx, DistributorKind dist,
                                      const BeamConfig& cfg = {}) {
    const Scenario& sc = *ctx.scenario;
    const FlightPath& f = ctx.flight;
    int parts = partition_count(f.n_cycles);

    EpisodeResult res;
    res.scenario_id = sc.id;
    res.planner_id = distributor_planner_id(dist);

    std::vector<int> budgets(parts, 0);
    int carry = 0;
    int last_frame = -1;
    if (dist == DistributorKind::Uniform) {
        budgets = distribute_uniform(kObservationBudget, parts);
        res.distribution_cycles.push_back(0);
    } else if (dist == DistributorKind::Preinformed) {
        budgets = apportion_by_weight(preinformed_weights(ctx), kObservationBudget);
        res.distribution_cycles.push_back(0);
    } else if (!sc.overlay) {
        throw ParamError("geo-informed distribution requires an overlay");
    }

    SatState st = initial_state(f, sc.truth);
    for (int k = 0; k < parts; ++k) {
        int start = partition_start(k);
        if (dist == DistributorKind::GeoInformed) {
            auto fi = geo_frame_index(sc, start);
            if (fi && int(*fi) != last_frame) {
                std::vector<int> fresh = distribute_geo(ctx, sc.overlay->frames[*fi],
                                                        kObservationBudget - st.obs_used, k);
                for (int j = k; j < parts; ++j) budgets[j] = fresh[j];
                carry = 0;
                last_frame = int(*fi);
                res.distribution_cycles.push_back(start);
            } else if (!fi && k == 0) {
                budgets = distribute_uniform(kObservationBudget, parts);
                res.distribution_cycles.push_back(0);
            }
        }
        int allowed = std::min(budgets[k] + carry, kObservationBudget - st.obs_used);
        BeamConfig local = cfg;
        local.depth = partition_length(f.n_cycles, k);
        Plan plan = beam_search(ctx, st, allowed, local);
        for (const Action& a : plan.actions) {
            double u = a.observe ? ctx.util(a.target_col, a.target_row) : 0.0;
            res.trace.push_back({st.cycle, a, u});
            res.total_utility += u;
            st = transition(st, a, f, ctx.slew, sc);
        }
        carry = allowed - plan.planned_obs;
    }
    res.observations_used = st.obs_used;
    return res;
}

inline EpisodeResult run_hierarchical(const Scenario& sc, DistributorKind dist,
                                      const BeamConfig& cfg = {}) {
    PlanningContext ctx = PlanningContext::build(sc);
    return run_hierarchical(ctx, dist, cfg);
}

}  // namespace dt
