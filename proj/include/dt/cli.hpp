#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "json.hpp"

#include "dt/generators.hpp"
#include "dt/grid_io.hpp"
#include "dt/harness.hpp"
#include "dt/planners.hpp"
#include "dt/scenario.hpp"

namespace dt {

// Geostationary overlay parameters of a scenario family.
struct OverlayParams {
    int coarsening = 1;
    double accuracy = 1.0;  // per-cell agreement target for binary grids
    int cadence_cycles = 0;
    int latency_cycles = 0;
    int n_frames = 1;
    double advect_cells_per_cycle = 0.0;
    double noise_mae = 0.19;
    std::optional<double> flip_one_to_zero;
    std::optional<double> flip_zero_to_one;
};

// JSON-config contents; values left negative/empty resolve to family defaults.
struct RunConfig {
    std::string family;
    int n_scenarios = -1;
    std::uint64_t seed = 1;
    int n_cycles = -1;
    double resolution_km = -1.0;
    double swath_km = -1.0;
    double ground_speed_km_s = 6.0;
    double altitude_km = 500.0;
    double coverage_lo = -1.0, coverage_hi = -1.0;
    int correlation_len = -1;
    int n_storms = -1;
    double peak_rate = -1.0;
    int cluster_radius = -1;
    int n_cities = -1;
    double max_density = -1.0;
    int n_targets = -1;
    double min_side_km = -1.0, max_side_km = -1.0;
    bool overlay_given = false;   // config mentioned "overlay"
    bool overlay_null = false;    // ... and set it to null (no overlay)
    OverlayParams overlay;
    std::vector<std::string> planners;
    std::string scenario_dir;
    int n_instances = 50;  // oracle batch size
    int oracle_obs = 3;    // observations allowed per tiny instance
};

namespace detail {

using json = nlohmann::ordered_json;

inline void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> allowed,
                                const char* where) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (std::string_view k : allowed)
            if (item.key() == k) known = true;
        if (!known)
            throw ParamError(std::string("unknown config key '") + item.key() + "' in " + where);
    }
}

inline OverlayParams parse_overlay(const json& j) {
    reject_unknown_keys(j,
                        {"coarsening", "accuracy", "cadence_cycles", "latency_cycles", "n_frames",
                         "advect_cells_per_cycle", "noise_mae", "flip_one_to_zero",
                         "flip_zero_to_one"},
                        "overlay");
    OverlayParams p;
    if (j.contains("coarsening")) p.coarsening = j.at("coarsening").get<int>();
    if (j.contains("accuracy")) p.accuracy = j.at("accuracy").get<double>();
    if (j.contains("cadence_cycles")) p.cadence_cycles = j.at("cadence_cycles").get<int>();
    if (j.contains("latency_cycles")) p.latency_cycles = j.at("latency_cycles").get<int>();
    if (j.contains("n_frames")) p.n_frames = j.at("n_frames").get<int>();
    if (j.contains("advect_cells_per_cycle"))
        p.advect_cells_per_cycle = j.at("advect_cells_per_cycle").get<double>();
    if (j.contains("noise_mae")) p.noise_mae = j.at("noise_mae").get<double>();
    if (j.contains("flip_one_to_zero")) p.flip_one_to_zero = j.at("flip_one_to_zero").get<double>();
    if (j.contains("flip_zero_to_one")) p.flip_zero_to_one = j.at("flip_zero_to_one").get<double>();
    return p;
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
    detail::json j;
    try {
        j = detail::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParamError(std::string("config is not valid JSON: ") + e.what());
    }
    detail::reject_unknown_keys(
        j, {"family",      "n_scenarios",  "seed",           "n_cycles",    "resolution_km",
            "swath_km",    "ground_speed_km_s", "altitude_km", "coverage_lo", "coverage_hi",
            "correlation_len", "n_storms", "peak_rate",      "cluster_radius", "n_cities",
            "max_density", "n_targets",    "min_side_km",    "max_side_km", "overlay",
            "planners",    "scenario_dir", "n_instances",    "oracle_obs"},
        "config");
    RunConfig c;
    try {
        if (j.contains("family")) c.family = j.at("family").get<std::string>();
        if (j.contains("n_scenarios")) c.n_scenarios = j.at("n_scenarios").get<int>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("n_cycles")) c.n_cycles = j.at("n_cycles").get<int>();
        if (j.contains("resolution_km")) c.resolution_km = j.at("resolution_km").get<double>();
        if (j.contains("swath_km")) c.swath_km = j.at("swath_km").get<double>();
        if (j.contains("ground_speed_km_s"))
            c.ground_speed_km_s = j.at("ground_speed_km_s").get<double>();
        if (j.contains("altitude_km")) c.altitude_km = j.at("altitude_km").get<double>();
        if (j.contains("coverage_lo")) c.coverage_lo = j.at("coverage_lo").get<double>();
        if (j.contains("coverage_hi")) c.coverage_hi = j.at("coverage_hi").get<double>();
        if (j.contains("correlation_len")) c.correlation_len = j.at("correlation_len").get<int>();
        if (j.contains("n_storms")) c.n_storms = j.at("n_storms").get<int>();
        if (j.contains("peak_rate")) c.peak_rate = j.at("peak_rate").get<double>();
        if (j.contains("cluster_radius")) c.cluster_radius = j.at("cluster_radius").get<int>();
        if (j.contains("n_cities")) c.n_cities = j.at("n_cities").get<int>();
        if (j.contains("max_density")) c.max_density = j.at("max_density").get<double>();
        if (j.contains("n_targets")) c.n_targets = j.at("n_targets").get<int>();
        if (j.contains("min_side_km")) c.min_side_km = j.at("min_side_km").get<double>();
        if (j.contains("max_side_km")) c.max_side_km = j.at("max_side_km").get<double>();
        if (j.contains("overlay")) {
            c.overlay_given = true;
            if (j.at("overlay").is_null())
                c.overlay_null = true;
            else
                c.overlay = detail::parse_overlay(j.at("overlay"));
        }
        if (j.contains("planners"))
            c.planners = j.at("planners").get<std::vector<std::string>>();
        if (j.contains("scenario_dir")) c.scenario_dir = j.at("scenario_dir").get<std::string>();
        if (j.contains("n_instances")) c.n_instances = j.at("n_instances").get<int>();
        if (j.contains("oracle_obs")) c.oracle_obs = j.at("oracle_obs").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw ParamError(std::string("config field has the wrong type: ") + e.what());
    }
    return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open config file: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text);
}

inline UtilityKind family_kind(const std::string& family) {
    if (family == "CA") return UtilityKind::CA;
    if (family == "CAPD") return UtilityKind::CAPD;
    if (family == "CART") return UtilityKind::CART;
    if (family == "SH") return UtilityKind::SH;
    throw ParamError("unknown scenario family '" + family + "'");
}

// Fill family defaults into unset fields. CA mimics a 1 km imager under
// broken cloud; CAPD and CART add sparse static hotspots; SH is a coarse
// precipitation field with isolated storm clusters.
inline void resolve_family(RunConfig& c) {
    UtilityKind kind = family_kind(c.family);
    auto def_i = [](int& v, int d) { if (v < 0) v = d; };
    auto def_d = [](double& v, double d) { if (v < 0.0) v = d; };
    switch (kind) {
        case UtilityKind::CA:
            def_i(c.n_scenarios, 19);
            def_i(c.n_cycles, 525);
            def_d(c.resolution_km, 1.0);
            def_d(c.swath_km, 268.0);
            def_d(c.coverage_lo, 0.5);
            def_d(c.coverage_hi, 0.7);
            def_i(c.correlation_len, 120);
            if (!c.overlay_given) {
                c.overlay_given = true;
                c.overlay.coarsening = 2;
                c.overlay.accuracy = 0.8;
                c.overlay.cadence_cycles = 150;
                c.overlay.latency_cycles = 15;
                c.overlay.n_frames = 4;
            }
            break;
        case UtilityKind::CAPD:
            def_i(c.n_scenarios, 21);
            def_i(c.n_cycles, 300);
            def_d(c.resolution_km, 2.0);
            def_d(c.swath_km, 270.0);
            def_d(c.coverage_lo, 0.25);
            def_d(c.coverage_hi, 0.35);
            def_i(c.correlation_len, 75);
            def_i(c.n_cities, 5);
            def_d(c.max_density, 30000.0);
            if (!c.overlay_given) {
                c.overlay_given = true;
                c.overlay.coarsening = 2;
                c.overlay.accuracy = 0.8;
                c.overlay.cadence_cycles = 100;
                c.overlay.latency_cycles = 10;
                c.overlay.n_frames = 3;
            }
            break;
        case UtilityKind::CART:
            def_i(c.n_scenarios, 10);
            def_i(c.n_cycles, 300);
            def_d(c.resolution_km, 1.0);
            def_d(c.swath_km, 268.0);
            def_d(c.coverage_lo, 0.4);
            def_d(c.coverage_hi, 0.6);
            def_i(c.correlation_len, 100);
            def_i(c.n_targets, 12);
            def_d(c.min_side_km, 20.0);
            def_d(c.max_side_km, 100.0);
            if (!c.overlay_given) {
                c.overlay_given = true;
                c.overlay.coarsening = 2;
                c.overlay.accuracy = 0.8;
                c.overlay.cadence_cycles = 100;
                c.overlay.latency_cycles = 10;
                c.overlay.n_frames = 3;
            }
            break;
        case UtilityKind::SH:
            def_i(c.n_scenarios, 21);
            def_i(c.n_cycles, 450);
            def_d(c.resolution_km, 10.0);
            def_d(c.swath_km, 270.0);
            def_i(c.n_storms, 7);
            def_d(c.peak_rate, 25.0);
            def_i(c.cluster_radius, 8);
            if (!c.overlay_given) {
                c.overlay_given = true;
                c.overlay.coarsening = 1;
                c.overlay.cadence_cycles = 0;
                c.overlay.latency_cycles = 0;
                c.overlay.n_frames = 1;
                c.overlay.noise_mae = 0.19;
            }
            break;
    }
    if (c.coverage_lo > c.coverage_hi)
        throw ParamError("coverage_lo must not exceed coverage_hi");
}

namespace detail {

inline std::string scenario_name(const std::string& family, int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s-%03d", family.c_str(), index);
    return buf;
}

inline std::uint64_t scenario_seed(std::uint64_t base, int index) {
    std::uint64_t x = base + 0x9E3779B97F4A7C15ULL * std::uint64_t(index + 1);
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    return x;
}

}  // namespace detail

// Deterministically build scenario `index` of the family described by a
// resolved config.
inline Scenario make_family_scenario(const RunConfig& c, int index) {
    UtilityKind kind = family_kind(c.family);
    FlightPath flight = make_flight(c.n_cycles, c.ground_speed_km_s, c.swath_km, c.altitude_km);
    SlewModel slew = make_slew_model(flight);
    double res = c.resolution_km;
    int height = int(std::llround(c.swath_km / res));
    int width = int(std::ceil(c.n_cycles * flight.km_per_cycle() / res)) +
                int(std::floor(slew.envelope_half_km() / res)) + 2;

    Scenario s;
    s.id = detail::scenario_name(c.family, index);
    s.seed = detail::scenario_seed(c.seed, index);
    s.flight = flight;
    s.utility_kind = kind;
    std::mt19937_64 rng(s.seed);
    double coverage = kind == UtilityKind::SH
                          ? 0.0
                          : c.coverage_lo + (c.coverage_hi - c.coverage_lo) *
                                                dt::detail::uniform01(rng);
    std::uint64_t truth_seed = rng();
    std::uint64_t aux_seed = rng();
    std::uint64_t overlay_seed = rng();

    if (kind == UtilityKind::SH) {
        s.truth = gen_storm_field(width, height, c.n_storms, c.peak_rate, c.cluster_radius,
                                  truth_seed, res);
        s.sh_r_max = c.peak_rate;
    } else {
        s.truth = gen_cloud_field(width, height, coverage, c.correlation_len, truth_seed, res);
    }
    if (kind == UtilityKind::CAPD)
        s.population = gen_population_field(width, height, c.n_cities, c.max_density, aux_seed, res);
    if (kind == UtilityKind::CART)
        s.targets = gen_random_targets(flight, width, height, res, c.n_targets, c.min_side_km,
                                       c.max_side_km, aux_seed);
    if (c.overlay_given && !c.overlay_null) {
        DegradeConfig d;
        d.coarsening = c.overlay.coarsening;
        d.target_accuracy = c.overlay.accuracy;
        d.advect_cells_per_cycle = c.overlay.advect_cells_per_cycle;
        d.cadence_cycles = c.overlay.cadence_cycles;
        d.latency_cycles = c.overlay.latency_cycles;
        d.n_frames = c.overlay.n_frames;
        d.flip_one_to_zero = c.overlay.flip_one_to_zero;
        d.flip_zero_to_one = c.overlay.flip_zero_to_one;
        d.noise_mae = c.overlay.noise_mae;
        s.overlay = degrade_to_overlay(s.truth, d, overlay_seed);
    }
    s.validate();
    return s;
}

inline std::vector<Scenario> make_family_batch(const RunConfig& resolved) {
    std::vector<Scenario> out;
    out.reserve(resolved.n_scenarios);
    for (int i = 0; i < resolved.n_scenarios; ++i)
        out.push_back(make_family_scenario(resolved, i));
    return out;
}

// ---- scenario persistence ----

inline void cmd_generate(RunConfig cfg, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    if (cfg.family.empty()) throw ParamError("generate needs a scenario family");
    resolve_family(cfg);
    fs::create_directories(out_dir);

    detail::json manifest;
    manifest["family"] = cfg.family;
    manifest["base_seed"] = cfg.seed;
    manifest["flight"] = {{"n_cycles", cfg.n_cycles},
                          {"ground_speed_km_s", cfg.ground_speed_km_s},
                          {"swath_km", cfg.swath_km},
                          {"altitude_km", cfg.altitude_km}};
    manifest["scenarios"] = detail::json::array();

    for (int i = 0; i < cfg.n_scenarios; ++i) {
        Scenario s = make_family_scenario(cfg, i);
        fs::path dir = out_dir / s.id;
        fs::create_directories(dir);
        detail::json entry;
        entry["id"] = s.id;
        entry["seed"] = s.seed;
        entry["utility"] = utility_kind_name(s.utility_kind);
        entry["sh_r_max"] = s.sh_r_max;
        entry["truth"] = s.id + "/truth.grd";
        save_grid(s.truth, dir / "truth.grd");
        if (s.population) {
            entry["population"] = s.id + "/population.grd";
            save_grid(*s.population, dir / "population.grd");
        }
        if (s.targets) {
            entry["targets"] = s.id + "/targets.grd";
            save_grid(*s.targets, dir / "targets.grd");
        }
        if (s.overlay) {
            detail::json ov;
            ov["cadence_cycles"] = s.overlay->cadence_cycles;
            ov["latency_cycles"] = s.overlay->latency_cycles;
            ov["coarsening"] = s.overlay->coarsening;
            ov["frames"] = detail::json::array();
            for (std::size_t fidx = 0; fidx < s.overlay->frames.size(); ++fidx) {
                char name[32];
                std::snprintf(name, sizeof name, "overlay_%03d.grd", int(fidx));
                save_grid(s.overlay->frames[fidx].grid, dir / name);
                ov["frames"].push_back({{"file", s.id + "/" + name},
                                        {"valid_at_cycle", s.overlay->frames[fidx].valid_at_cycle}});
            }
            entry["overlay"] = ov;
        }
        manifest["scenarios"].push_back(entry);
    }
    std::ofstream out(out_dir / "manifest.json", std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot write manifest");
    out << manifest.dump(2) << "\n";
}

inline std::vector<Scenario> load_scenarios(const std::filesystem::path& dir) {
    std::ifstream in(dir / "manifest.json", std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open manifest in " + dir.string());
    detail::json manifest;
    try {
        manifest = detail::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("manifest is not valid JSON: ") + e.what(), 0, 0);
    }
    std::vector<Scenario> out;
    try {
        const auto& fl = manifest.at("flight");
        FlightPath flight =
            make_flight(fl.at("n_cycles").get<int>(), fl.at("ground_speed_km_s").get<double>(),
                        fl.at("swath_km").get<double>(), fl.at("altitude_km").get<double>());
        for (const auto& entry : manifest.at("scenarios")) {
            Scenario s;
            s.id = entry.at("id").get<std::string>();
            s.seed = entry.at("seed").get<std::uint64_t>();
            s.utility_kind = family_kind(entry.at("utility").get<std::string>());
            s.sh_r_max = entry.at("sh_r_max").get<double>();
            s.flight = flight;
            s.truth = load_grid(dir / entry.at("truth").get<std::string>());
            if (entry.contains("population"))
                s.population = load_grid(dir / entry.at("population").get<std::string>());
            if (entry.contains("targets"))
                s.targets = load_grid(dir / entry.at("targets").get<std::string>());
            if (entry.contains("overlay")) {
                const auto& ov = entry.at("overlay");
                GeoOverlay o;
                o.cadence_cycles = ov.at("cadence_cycles").get<int>();
                o.latency_cycles = ov.at("latency_cycles").get<int>();
                o.coarsening = ov.at("coarsening").get<int>();
                for (const auto& fr : ov.at("frames")) {
                    GeoFrame frame;
                    frame.valid_at_cycle = fr.at("valid_at_cycle").get<int>();
                    frame.grid = load_grid(dir / fr.at("file").get<std::string>());
                    o.frames.push_back(std::move(frame));
                }
                s.overlay = std::move(o);
            }
            s.validate();
            out.push_back(std::move(s));
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("manifest is missing fields: ") + e.what(), 0, 0);
    }
    return out;
}

// ---- experiment runs ----

namespace detail {

inline std::string format_pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline void append_csv_row(std::string& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += fields[i];
    }
    out += "\r\n";
}

}  // namespace detail

struct RunOutput {
    std::vector<ResultRow> rows;
    std::vector<AggregateRow> table;
    std::vector<std::string> warnings;
};

// Run the requested planners over a scenario batch. Scenario-level work is
// farmed out to `jobs` threads; results land in per-scenario slots so the
// output never depends on scheduling.
inline RunOutput run_batch(const std::vector<Scenario>& scenarios,
                           const std::vector<PlannerKind>& planners, int jobs,
                           const BeamConfig& cfg = {}) {
    struct Slot {
        std::vector<ResultRow> rows;
        std::vector<std::string> warnings;
    };
    std::vector<Slot> slots(scenarios.size());

    auto work = [&](std::size_t i) {
        const Scenario& sc = scenarios[i];
        Slot& slot = slots[i];
        if (sc.utility_kind == UtilityKind::SH) {
            for (double v : sc.truth.values)
                if (v > sc.sh_r_max) {
                    slot.warnings.push_back("calibration warning: scenario '" + sc.id +
                                            "' has precipitation above its rate normalizer; "
                                            "utilities saturate");
                    break;
                }
        }
        PlanningContext ctx = PlanningContext::build(sc);
        double ub = upper_bound_utility(ctx);
        for (PlannerKind k : planners) {
            ResultRow row;
            row.scenario_id = sc.id;
            row.planner_id = planner_id(k);
            row.ub_utility = ub;
            if (!planner_compatible(k, sc)) {
                row.ok = false;
                slot.warnings.push_back(std::string("warning: skipping planner '") +
                                        planner_id(k) + "' on scenario '" + sc.id +
                                        "': incompatible with utility model " +
                                        utility_kind_name(sc.utility_kind));
                slot.rows.push_back(std::move(row));
                continue;
            }
            EpisodeResult ep = run_episode(ctx, k, cfg);
            if (auto v = replay_check(sc, ep.trace))
                throw ConstraintViolationError(v->constraint, v->cycle,
                                               "replay of planner " + ep.planner_id +
                                                   " on scenario " + sc.id + ": " + v->detail);
            row.utility = ep.total_utility;
            row.obs_used = ep.observations_used;
            row.wall_ms = ep.wall_ms;
            slot.rows.push_back(std::move(row));
        }
    };

    int n_jobs = std::max(1, std::min<int>(jobs, int(scenarios.size())));
    if (n_jobs == 1) {
        for (std::size_t i = 0; i < scenarios.size(); ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        std::exception_ptr first_error;
        std::mutex err_mu;
        for (int t = 0; t < n_jobs; ++t)
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= scenarios.size()) return;
                    try {
                        work(i);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(err_mu);
                        if (!first_error) first_error = std::current_exception();
                        return;
                    }
                }
            });
        for (auto& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    RunOutput out;
    for (const Slot& slot : slots) {
        out.rows.insert(out.rows.end(), slot.rows.begin(), slot.rows.end());
        out.warnings.insert(out.warnings.end(), slot.warnings.begin(), slot.warnings.end());
    }
    out.table = aggregate(out.rows);
    return out;
}

inline std::string results_csv(const std::vector<ResultRow>& rows, bool timings) {
    std::string out;
    detail::append_csv_row(out, {"scenario_id", "planner", "utility", "obs_used", "ub_utility",
                                 "wall_ms"});
    for (const ResultRow& r : rows) {
        std::vector<std::string> f(6);
        f[0] = r.scenario_id;
        f[1] = r.planner_id;
        f[4] = dt::detail::format_double(r.ub_utility);
        if (r.ok) {
            f[2] = dt::detail::format_double(r.utility);
            f[3] = std::to_string(r.obs_used);
            f[5] = timings ? dt::detail::format_double(r.wall_ms) : "0";
        }
        detail::append_csv_row(out, f);
    }
    return out;
}

inline std::string aggregate_csv(const std::vector<AggregateRow>& table) {
    std::string out;
    detail::append_csv_row(out, {"planner", "total_utility", "pct_of_ub"});
    for (const AggregateRow& r : table)
        detail::append_csv_row(
            out, {r.planner_id, dt::detail::format_double(r.total_utility),
                  detail::format_pct(r.pct_of_ub)});
    return out;
}

inline std::vector<PlannerKind> parse_planner_list(const std::vector<std::string>& ids) {
    if (ids.empty()) throw ParamError("planner list must not be empty");
    std::vector<PlannerKind> requested;
    for (const std::string& id : ids) {
        auto k = planner_from_id(id);
        if (!k) throw ParamError("unknown planner id '" + id + "'");
        requested.push_back(*k);
    }
    // Canonical order, duplicates collapsed.
    std::vector<PlannerKind> out;
    for (PlannerKind k : all_planners())
        if (std::find(requested.begin(), requested.end(), k) != requested.end() &&
            std::find(out.begin(), out.end(), k) == out.end())
            out.push_back(k);
    return out;
}

inline void cmd_run(RunConfig cfg, const std::filesystem::path& out_dir, int jobs, bool timings) {
    namespace fs = std::filesystem;
    std::vector<PlannerKind> planners = parse_planner_list(cfg.planners);
    std::vector<Scenario> scenarios;
    if (!cfg.scenario_dir.empty()) {
        scenarios = load_scenarios(cfg.scenario_dir);
    } else {
        if (cfg.family.empty())
            throw ParamError("run needs either a scenario_dir or a scenario family");
        resolve_family(cfg);
        scenarios = make_family_batch(cfg);
    }
    RunOutput out = run_batch(scenarios, planners, jobs);
    for (const std::string& w : out.warnings) std::fprintf(stderr, "%s\n", w.c_str());

    fs::create_directories(out_dir);
    {
        std::ofstream f(out_dir / "results.csv", std::ios::binary);
        if (!f) throw std::ios_base::failure("cannot write results.csv");
        f << results_csv(out.rows, timings);
    }
    {
        std::ofstream f(out_dir / "aggregate.csv", std::ios::binary);
        if (!f) throw std::ios_base::failure("cannot write aggregate.csv");
        f << aggregate_csv(out.table);
    }
}

// ---- oracle verification ----

struct OracleReport {
    int instances = 0;
    int violations = 0;
    std::string csv;
};

// Tiny-instance scenario: coarse cells, slow flight, every row in the
// envelope, the whole grid inside the initial lookahead.
inline Scenario make_tiny_scenario(int index, std::uint64_t base_seed, int obs_allowed) {
    (void)obs_allowed;
    const double res = 10.0;
    int n_cycles = 6 + index % 3;
    FlightPath flight = make_flight(n_cycles, 2.5, 90.0, 500.0);
    int height = 9;
    int width = n_cycles + 16;

    Scenario s;
    static const UtilityKind kinds[4] = {UtilityKind::CA, UtilityKind::SH, UtilityKind::CAPD,
                                         UtilityKind::CART};
    s.utility_kind = kinds[index % 4];
    s.id = detail::scenario_name(std::string("tiny-") + utility_kind_name(s.utility_kind), index);
    s.seed = detail::scenario_seed(base_seed, index);
    s.flight = flight;
    std::mt19937_64 rng(s.seed);
    std::uint64_t truth_seed = rng();
    std::uint64_t aux_seed = rng();
    std::uint64_t overlay_seed = rng();
    if (s.utility_kind == UtilityKind::SH) {
        s.truth = gen_storm_field(width, height, 2, 25.0, 2, truth_seed, res);
        s.sh_r_max = 25.0;
    } else {
        s.truth = gen_cloud_field(width, height, 0.5, 2, truth_seed, res);
    }
    if (s.utility_kind == UtilityKind::CAPD)
        s.population = gen_population_field(width, height, 2, 20000.0, aux_seed, res);
    if (s.utility_kind == UtilityKind::CART)
        s.targets = gen_random_targets(flight, width, height, res, 3, 10.0, 30.0, aux_seed);
    DegradeConfig d;
    d.coarsening = 1;
    d.target_accuracy = s.truth.kind == GridKind::CloudMask ? 0.85 : 1.0;
    d.noise_mae = 0.5;
    s.overlay = degrade_to_overlay(s.truth, d, overlay_seed);
    s.validate();
    return s;
}

inline OracleReport run_oracle(int n_instances, std::uint64_t base_seed, int obs_allowed) {
    OracleReport rep;
    detail::append_csv_row(rep.csv, {"instance", "optimum", "beam_inf", "beam_w3", "ub",
                                     "status"});
    const double tol = 1e-9;
    for (int i = 0; i < n_instances; ++i) {
        Scenario sc = make_tiny_scenario(i, base_seed, obs_allowed);
        PlanningContext ctx = PlanningContext::build(sc);
        SatState root = initial_state(ctx.flight, sc.truth);
        int depth = ctx.flight.n_cycles;
        int obs = std::min(obs_allowed, 2 + i % 2);

        Plan opt = brute_force_optimal(ctx, root, depth, obs);
        Plan inf = beam_search(ctx, root, obs, BeamConfig{depth, 1 << 30});
        Plan w3 = beam_search(ctx, root, obs, BeamConfig{depth, 3});
        double ub = upper_bound_utility(ctx);

        bool ok = true;
        if (inf.planned_utility != opt.planned_utility) ok = false;
        if (w3.planned_utility > opt.planned_utility + tol) ok = false;
        if (opt.planned_utility > ub + tol) ok = false;
        for (PlannerKind k : all_planners()) {
            if (!planner_compatible(k, sc)) continue;
            EpisodeResult ep = run_episode(ctx, k);
            if (ep.total_utility > ub + tol) ok = false;
        }
        if (!ok) ++rep.violations;
        ++rep.instances;
        detail::append_csv_row(
            rep.csv, {sc.id, dt::detail::format_double(opt.planned_utility),
                      dt::detail::format_double(inf.planned_utility),
                      dt::detail::format_double(w3.planned_utility),
                      dt::detail::format_double(ub), ok ? "ok" : "VIOLATION"});
    }
    return rep;
}

inline int cmd_oracle(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    OracleReport rep = run_oracle(cfg.n_instances, cfg.seed, cfg.oracle_obs);
    fs::create_directories(out_dir);
    std::ofstream f(out_dir / "oracle_report.csv", std::ios::binary);
    if (!f) throw std::ios_base::failure("cannot write oracle_report.csv");
    f << rep.csv;
    std::fprintf(stdout, "oracle: %d instances, %d violations\n", rep.instances, rep.violations);
    return rep.violations == 0 ? 0 : 2;
}

}  // namespace dt
