// End-to-end acceptance checks for the simulator, planners and CLI. Each
// check prints one [PASS]/[FAIL] line; the exit code is the failure count.
// Usage: dt_acceptance [criterion 1..9] [path-to-dtsim]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "dt/cli.hpp"
#include "dt/harness.hpp"

using namespace dt;

namespace {

int g_failures = 0;

void report(int crit, bool ok, const std::string& what, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", crit, what.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

double pct_of(const std::vector<AggregateRow>& table, const std::string& id) {
    for (const AggregateRow& r : table)
        if (r.planner_id == id) return r.pct_of_ub;
    return -1.0;
}

double total_of(const std::vector<AggregateRow>& table, const std::string& id) {
    for (const AggregateRow& r : table)
        if (r.planner_id == id) return r.total_utility;
    return -1.0;
}

RunConfig family_config(const std::string& family) {
    RunConfig c;
    c.family = family;
    resolve_family(c);
    return c;
}

// Large-fleet ordering run: the full cloud-avoidance batch under every
// planner, timed end to end.
void criterion_1() {
    auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg = family_config("CA");
    std::vector<Scenario> batch = make_family_batch(cfg);
    RunOutput out = run_batch(batch,
                              {PlannerKind::NadirOnly, PlannerKind::Greedy,
                               PlannerKind::GreedyHistorical, PlannerKind::HierUniform,
                               PlannerKind::HierGeoInformed},
                              1);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    double no = pct_of(out.table, "NO"), g = pct_of(out.table, "G");
    double u = pct_of(out.table, "U"), gsdi = pct_of(out.table, "GSDI");
    char buf[256];
    std::snprintf(buf, sizeof buf, "NO=%.1f%% G=%.1f%% GH=%.1f%% U=%.1f%% GSDI=%.1f%% in %.1fs",
                  no, g, pct_of(out.table, "GH"), u, gsdi, secs);
    bool order = no < g && g < u && u <= gsdi;
    report(1, order && gsdi >= 90.0 && secs <= 60.0 && int(batch.size()) >= 19,
           "planner ordering and near-bound geo-informed performance on the cloud batch", buf);
}

// Sparse-reward concentration: the geo-informed distributor must beat the
// uniform one decisively when reward is concentrated in a few places.
void criterion_2() {
    auto ratio_for = [](const std::string& family, double& ratio, bool& sparse_ok) {
        RunConfig cfg = family_config(family);
        std::vector<Scenario> batch = make_family_batch(cfg);
        sparse_ok = true;
        if (family == "SH")
            for (const Scenario& s : batch) sparse_ok &= nonzero_fraction(s.truth) <= 0.35;
        RunOutput out = run_batch(batch, {PlannerKind::HierUniform, PlannerKind::HierGeoInformed}, 1);
        ratio = total_of(out.table, "GSDI") / total_of(out.table, "U");
        return int(batch.size());
    };
    double sh_ratio = 0.0, capd_ratio = 0.0;
    bool sh_sparse = false, capd_sparse = true;
    int n_sh = ratio_for("SH", sh_ratio, sh_sparse);
    int n_capd = ratio_for("CAPD", capd_ratio, capd_sparse);
    char buf[160];
    std::snprintf(buf, sizeof buf, "storm ratio %.2f over %d, hotspot ratio %.2f over %d",
                  sh_ratio, n_sh, capd_ratio, n_capd);
    report(2, sh_ratio >= 1.2 && capd_ratio >= 1.2 && sh_sparse && n_sh >= 21,
           "geo-informed beats uniform by 1.2x on sparse-reward batches", buf);
}

// Mostly clear skies leave little room for smart budget placement: the
// geo-informed and uniform distributors should finish within a few points.
void criterion_3() {
    RunConfig cfg = family_config("CA");
    cfg.coverage_lo = 0.2;
    cfg.coverage_hi = 0.3;
    cfg.n_scenarios = 10;
    std::vector<Scenario> batch = make_family_batch(cfg);
    RunOutput out = run_batch(batch, {PlannerKind::HierUniform, PlannerKind::HierGeoInformed}, 1);
    double gap = std::abs(pct_of(out.table, "GSDI") - pct_of(out.table, "U"));
    char buf[96];
    std::snprintf(buf, sizeof buf, "|GSDI-U| = %.2f points of the bound", gap);
    report(3, gap <= 5.0, "distributors converge on mostly-clear scenes", buf);
}

// The beam planner against exhaustive search on instances small enough to
// enumerate, plus the upper bound over everything.
void criterion_4() {
    OracleReport rep = run_oracle(50, 12345, 3);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d instances, %d violations", rep.instances, rep.violations);
    report(4, rep.instances >= 50 && rep.violations == 0,
           "unbounded beam matches exhaustive search; width 3 and all planners stay bounded",
           buf);
}

// Slew timing against frozen values and the rectangle fast path against
// per-cell recomputation.
void criterion_5() {
    SlewModel m;
    bool ok = std::abs(slew_time_1axis(m, 1.08) - 2.0) <= 1e-9 * 2.0;
    double tri = 2.0 * std::sqrt(27.0 / m.accel_deg_s2);
    double trap = 27.0 / m.max_rate_deg_s + m.max_rate_deg_s / m.accel_deg_s2;
    ok = ok && std::abs(tri - 10.0) <= 1e-8 && std::abs(trap - 10.0) <= 1e-8 &&
         std::abs(slew_time_1axis(m, 27.0) - 10.0) <= 1e-8;

    Scenario s;
    s.id = "fuzz";
    s.flight = make_flight(60, 2.5, 290.0, 500.0);
    s.truth = make_grid(200, 29, 10.0, GridKind::CloudMask, 0.0);
    s.utility_kind = UtilityKind::CA;
    SlewModel ms = make_slew_model(s.flight);
    std::mt19937_64 rng(5150);
    int mismatches = 0;
    for (int i = 0; i < 20; ++i) {
        SatState st;
        st.cycle = int(rng() % 40);
        st.point_col = std::clamp(int(s.flight.nadir_along_km(st.cycle) / 10.0) +
                                      int(rng() % 25) - 12,
                                  0, 199);
        st.point_row = int(rng() % 29);
        LookaheadView view = lookahead_view(s.flight, s, st.cycle);
        for (int h : {1, 3}) {
            std::set<std::pair<int, int>> rects;
            for (int n = 1; n <= h; ++n) {
                CellRect r = arrival_rect(ms, s.flight, s.truth, st.point_col, st.point_row,
                                          st.cycle, n, view.visible_through_col);
                for (int c = r.col_lo; c <= r.col_hi; ++c)
                    for (int rr = r.row_lo; rr <= r.row_hi; ++rr) rects.insert({c, rr});
            }
            std::set<std::pair<int, int>> honest;
            for (const Cell& c : reachable_set(ms, s.flight, s, st, h))
                honest.insert({c.col, c.row});
            if (rects != honest) ++mismatches;
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "timing ok=%d, rect mismatches=%d over 20 states", int(ok),
                  mismatches);
    report(5, ok && mismatches == 0, "slew timing and reachable-set geometry", buf);
}

// The reward tables at their corner points.
void criterion_6() {
    UtilityModel capd{UtilityKind::CAPD, 25.0, kPopulationScale};
    UtilityModel sh{UtilityKind::SH, 25.0, kPopulationScale};
    UtilityModel ca{UtilityKind::CA, 25.0, kPopulationScale};
    UtilityModel cart{UtilityKind::CART, 25.0, kPopulationScale};
    bool ok = cell_utility(capd, 0.0, 10000.0, false) == 100.0 &&
              cell_utility(capd, 0.0, 0.0, false) == 10.0 &&
              cell_utility(sh, 25.0, 0.0, false) == 100.0 &&
              cell_utility(sh, 0.0, 0.0, false) == 1.0 &&
              cell_utility(ca, 0.0, 0.0, false) == 10.0 &&
              cell_utility(ca, 1.0, 0.0, false) == 1.0 &&
              cell_utility(cart, 0.0, 0.0, true) == 100.0 &&
              cell_utility(cart, 0.0, 0.0, false) == 10.0 &&
              cell_utility(cart, 1.0, 0.0, true) == 1.0;
    report(6, ok, "reward tables hit their specified corner values", ok ? "9/9" : "mismatch");
}

// Every planner on a fuzzed mixed-model batch replays cleanly under the
// independent feasibility checker.
void criterion_7() {
    int episodes = 0, violations = 0, over_budget = 0;
    for (int i = 0; i < 100; ++i) {
        std::uint64_t seed = detail::scenario_seed(777, i);
        std::mt19937_64 rng(seed);
        Scenario s;
        s.id = "fuzz-" + std::to_string(i);
        s.seed = seed;
        s.flight = make_flight(50 + int(rng() % 20), 2.5, 290.0, 500.0);
        int width = s.flight.n_cycles + 16;
        static const UtilityKind kinds[4] = {UtilityKind::CA, UtilityKind::SH, UtilityKind::CAPD,
                                             UtilityKind::CART};
        s.utility_kind = kinds[i % 4];
        if (s.utility_kind == UtilityKind::SH) {
            s.truth = gen_storm_field(width, 29, 2 + int(rng() % 3), 25.0, 3, rng(), 10.0);
            s.sh_r_max = 25.0;
        } else {
            double cov = 0.3 + 0.4 * dt::detail::uniform01(rng);
            s.truth = gen_cloud_field(width, 29, cov, 2 + int(rng() % 4), rng(), 10.0);
        }
        if (s.utility_kind == UtilityKind::CAPD)
            s.population = gen_population_field(width, 29, 2, 20000.0, rng(), 10.0);
        if (s.utility_kind == UtilityKind::CART)
            s.targets = gen_random_targets(s.flight, width, 29, 10.0, 3, 20.0, 60.0, rng());
        DegradeConfig d;
        d.target_accuracy = s.truth.kind == GridKind::CloudMask ? 0.85 : 1.0;
        d.noise_mae = 0.3;
        d.n_frames = 2;
        d.cadence_cycles = 30;
        s.overlay = degrade_to_overlay(s.truth, d, rng());
        s.validate();

        PlanningContext ctx = PlanningContext::build(s);
        for (PlannerKind k : all_planners()) {
            if (!planner_compatible(k, s)) continue;
            EpisodeResult ep = run_episode(ctx, k);
            ++episodes;
            if (replay_check(s, ep.trace)) ++violations;
            if (ep.observations_used > kObservationBudget) ++over_budget;
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d episodes, %d replay failures, %d over budget", episodes,
                  violations, over_budget);
    report(7, episodes >= 400 && violations == 0 && over_budget == 0,
           "all planners survive independent replay on 100 fuzzed scenarios", buf);
}

// Overlay degradation calibration: the realized agreement tracks the request,
// and an identity request is a bit-exact copy.
void criterion_8() {
    EnvGrid truth = gen_cloud_field(1000, 268, 0.6, 50, 88);
    DegradeConfig cfg;
    cfg.target_accuracy = 0.8;
    GeoOverlay ov = degrade_to_overlay(truth, cfg, 89);
    long long agree = 0;
    for (std::size_t i = 0; i < truth.values.size(); ++i)
        agree += ov.frames[0].grid.values[i] == truth.values[i];
    double rate = double(agree) / double(truth.values.size());

    DegradeConfig identity;
    identity.target_accuracy = 1.0;
    bool exact = degrade_to_overlay(truth, identity, 90).frames[0].grid.values == truth.values;

    char buf[96];
    std::snprintf(buf, sizeof buf, "agreement %.4f vs 0.8 requested, identity exact=%d", rate,
                  int(exact));
    report(8, std::abs(rate - 0.8) <= 0.02 && exact,
           "overlay corruption is calibrated and identity-transparent", buf);
}

int run_cli(const std::string& dtsim, const std::string& args) {
    std::string cmd = "\"" + dtsim + "\" " + args;
    int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return "<missing:" + p.string() + ">";
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// CLI determinism: identical configs and seeds give byte-identical outputs,
// independent of the worker count; broken configs exit with the right code.
void criterion_9(const std::string& dtsim) {
    namespace fs = std::filesystem;
    fs::remove_all("acc_tmp");
    fs::create_directories("acc_tmp");
    {
        std::ofstream cfg("acc_tmp/run.json");
        cfg << R"({"family":"SH","n_scenarios":3,"n_cycles":120,"seed":7,)"
            << R"("planners":["NO","G","U","GSDI"]})";
    }
    {
        std::ofstream cfg("acc_tmp/bad.json");
        cfg << R"({"family":"SH","bogus":1})";
    }
    int r1 = run_cli(dtsim, "run --config acc_tmp/run.json --out acc_tmp/a --jobs 1");
    int r2 = run_cli(dtsim, "run --config acc_tmp/run.json --out acc_tmp/b --jobs 3");
    int r3 = run_cli(dtsim, "run --config acc_tmp/run.json --out acc_tmp/c --jobs 1");
    int g1 = run_cli(dtsim, "generate --config acc_tmp/run.json --out acc_tmp/ga");
    int g2 = run_cli(dtsim, "generate --config acc_tmp/run.json --out acc_tmp/gb");
    int bad = run_cli(dtsim, "run --config acc_tmp/bad.json --out acc_tmp/x");

    bool runs_ok = r1 == 0 && r2 == 0 && r3 == 0 && g1 == 0 && g2 == 0;
    bool results_same = slurp("acc_tmp/a/results.csv") == slurp("acc_tmp/b/results.csv") &&
                        slurp("acc_tmp/a/results.csv") == slurp("acc_tmp/c/results.csv");
    bool agg_same = slurp("acc_tmp/a/aggregate.csv") == slurp("acc_tmp/b/aggregate.csv") &&
                    slurp("acc_tmp/a/aggregate.csv") == slurp("acc_tmp/c/aggregate.csv");
    bool gen_same = slurp("acc_tmp/ga/manifest.json") == slurp("acc_tmp/gb/manifest.json") &&
                    slurp("acc_tmp/ga/SH-000/truth.grd") == slurp("acc_tmp/gb/SH-000/truth.grd");
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "exit codes %d/%d/%d gen %d/%d bad-config %d, results=%d agg=%d gen=%d", r1, r2,
                  r3, g1, g2, bad, int(results_same), int(agg_same), int(gen_same));
    report(9, runs_ok && bad == 1 && results_same && agg_same && gen_same,
           "CLI outputs are byte-stable across reruns and worker counts", buf);
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);
    std::string dtsim = argc > 2 ? argv[2] : "tools/dtsim";

    auto want = [&](int n) { return only == 0 || only == n; };
    if (want(1)) criterion_1();
    if (want(2)) criterion_2();
    if (want(3)) criterion_3();
    if (want(4)) criterion_4();
    if (want(5)) criterion_5();
    if (want(6)) criterion_6();
    if (want(7)) criterion_7();
    if (want(8)) criterion_8();
    if (want(9)) criterion_9(dtsim);
    return g_failures;
}
