#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dt/generators.hpp"
#include "dt/scenario.hpp"
#include "dt/transition.hpp"
#include "dt/utility.hpp"

using namespace dt;

namespace {

Scenario flat_ca(int width = 200, int height = 29, double res = 10.0, int n_cycles = 60,
                 double speed = 2.5) {
    Scenario s;
    s.id = "flat";
    s.flight = make_flight(n_cycles, speed, height * res, 500.0);
    s.truth = make_grid(width, height, res, GridKind::CloudMask, 0.0);
    s.utility_kind = UtilityKind::CA;
    return s;
}

}  // namespace

TEST_CASE("scenario validation cross-checks its grids") {
    Scenario s = flat_ca();
    CHECK_NOTHROW(s.validate());
    s.utility_kind = UtilityKind::CAPD;
    CHECK_THROWS_AS(s.validate(), ParamError);  // no population grid
    s.population = make_grid(200, 29, 10.0, GridKind::Population);
    CHECK_NOTHROW(s.validate());
    s.population->resolution_km = 5.0;
    CHECK_THROWS_AS(s.validate(), ParamError);  // geometry mismatch
    s = flat_ca(4, 29);
    CHECK_THROWS_AS(s.validate(), ParamError);  // grid shorter than the flight
}

TEST_CASE("the lookahead view ends one sensor reach ahead of nadir") {
    Scenario s = flat_ca();
    LookaheadView v0 = lookahead_view(s.flight, s, 0);
    CHECK(v0.visible_through_col == 50);  // 500 km ahead at 10 km cells
    CHECK(v0.contains(0));
    CHECK(v0.contains(50));
    CHECK_FALSE(v0.contains(51));
    CHECK_FALSE(v0.contains(-1));
    LookaheadView v9 = lookahead_view(s.flight, s, 9);
    CHECK(v9.visible_through_col == 59);
    LookaheadView vend = lookahead_view(s.flight, s, 10000);
    CHECK(vend.visible_through_col == s.truth.width - 1);
}

TEST_CASE("the newest valid overlay frame wins") {
    Scenario s = flat_ca();
    GeoOverlay ov;
    ov.coarsening = 1;
    for (int t : {0, 20, 40}) {
        GeoFrame f;
        f.valid_at_cycle = t;
        f.grid = s.truth;
        ov.frames.push_back(f);
    }
    s.overlay = ov;
    CHECK(geo_frame_index(s, 0) == std::size_t{0});
    CHECK(geo_frame_index(s, 19) == std::size_t{0});
    CHECK(geo_frame_index(s, 20) == std::size_t{1});
    CHECK(geo_frame_index(s, 59) == std::size_t{2});
    s.overlay->frames[0].valid_at_cycle = 5;
    s.overlay->frames.erase(s.overlay->frames.begin() + 1, s.overlay->frames.end());
    CHECK_FALSE(geo_frame_index(s, 4).has_value());
    Scenario bare = flat_ca();
    CHECK_FALSE(geo_frame_index(bare, 10).has_value());
    CHECK(geo_view(bare, 10) == nullptr);
}

TEST_CASE("transition holds, observes and advances the nadir") {
    Scenario s = flat_ca();
    SlewModel m = make_slew_model(s.flight);
    SatState st = initial_state(s.flight, s.truth);
    CHECK(st.cycle == 0);
    CHECK(st.point_col == 0);
    CHECK(st.point_row == 14);
    CHECK(st.obs_used == 0);

    SatState held = transition(st, {0, 14, false}, s.flight, m, s);
    CHECK(held.cycle == 1);
    CHECK(held.nadir_col == 1);
    CHECK(held.point_col == 0);
    CHECK(held.obs_used == 0);

    SatState obs = transition(st, {0, 14, true}, s.flight, m, s);
    CHECK(obs.obs_used == 1);

    SatState moved = transition(st, {2, 16, true}, s.flight, m, s);
    CHECK(moved.point_col == 2);
    CHECK(moved.point_row == 16);
    CHECK(moved.obs_used == 1);
}

TEST_CASE("multi-cycle slews pend, forbid observing, then arrive") {
    Scenario s = flat_ca();
    SlewModel m = make_slew_model(s.flight);
    SatState st = initial_state(s.flight, s.truth);

    // Col 6 sits ~6.9 degrees of pitch away: too far for one cycle.
    CHECK_THROWS_AS(transition(st, {6, 14, true}, s.flight, m, s), ConstraintViolationError);
    SatState pending = transition(st, {6, 14, false}, s.flight, m, s);
    REQUIRE(pending.pending_slew.has_value());
    CHECK(pending.pending_slew->target_col == 6);
    CHECK(pending.pending_slew->remaining_cycles == 1);
    CHECK(pending.point_col == 0);

    // Deviating or observing mid-slew is illegal.
    CHECK_THROWS_AS(transition(pending, {5, 14, false}, s.flight, m, s),
                    ConstraintViolationError);
    try {
        transition(pending, {6, 14, false}, s.flight, m, s);
    } catch (const ConstraintViolationError&) {
        FAIL("continuing the pending slew must be legal");
    }
    SatState arrived = transition(pending, {6, 14, true}, s.flight, m, s);
    CHECK_FALSE(arrived.pending_slew.has_value());
    CHECK(arrived.point_col == 6);
    CHECK(arrived.obs_used == 1);
    CHECK(arrived.cycle == 2);
}

TEST_CASE("transition rejects infeasible actions by constraint") {
    Scenario s = flat_ca();
    SlewModel m = make_slew_model(s.flight);
    SatState st = initial_state(s.flight, s.truth);

    try {
        transition(st, {0, 40, false}, s.flight, m, s);
        FAIL("expected bounds violation");
    } catch (const ConstraintViolationError& e) {
        CHECK(e.constraint == Constraint::Bounds);
    }

    // Row 0 of a 29-row grid at 10 km cells is 140 km off nadir: outside.
    try {
        transition(st, {0, 0, false}, s.flight, m, s);
        FAIL("expected envelope violation");
    } catch (const ConstraintViolationError& e) {
        CHECK(e.constraint == Constraint::Envelope);
    }

    SatState tired = st;
    tired.obs_used = kObservationBudget;
    try {
        transition(tired, {0, 14, true}, s.flight, m, s);
        FAIL("expected budget violation");
    } catch (const ConstraintViolationError& e) {
        CHECK(e.constraint == Constraint::Budget);
    }

    // Shrinking the sensor reach exposes the visibility check.
    Scenario blind = flat_ca();
    blind.flight.lookahead_km = 20.0;
    SatState ahead = initial_state(blind.flight, blind.truth);
    ahead.point_col = 3;
    try {
        transition(ahead, {3, 14, true}, blind.flight, m, blind);
        FAIL("expected visibility violation");
    } catch (const ConstraintViolationError& e) {
        CHECK(e.constraint == Constraint::Visibility);
    }

    SatState last = st;
    last.cycle = s.flight.n_cycles;
    CHECK_THROWS_AS(transition(last, {0, 14, false}, s.flight, m, s), ParamError);
}

TEST_CASE("cell rewards match the model tables") {
    UtilityModel ca{UtilityKind::CA, 25.0, kPopulationScale};
    CHECK(cell_utility(ca, 1.0, 0.0, false) == 1.0);
    CHECK(cell_utility(ca, 0.0, 0.0, false) == 10.0);

    UtilityModel capd{UtilityKind::CAPD, 25.0, kPopulationScale};
    CHECK(cell_utility(capd, 1.0, 10000.0, false) == 1.0);
    CHECK(cell_utility(capd, 0.0, 10000.0, false) == 100.0);
    CHECK(cell_utility(capd, 0.0, 0.0, false) == 10.0);
    CHECK(cell_utility(capd, 0.0, 5000.0, false) ==
          Catch::Approx(std::pow(10.0, 1.5)).epsilon(1e-12));

    UtilityModel cart{UtilityKind::CART, 25.0, kPopulationScale};
    CHECK(cell_utility(cart, 1.0, 0.0, true) == 1.0);
    CHECK(cell_utility(cart, 0.0, 0.0, true) == 100.0);
    CHECK(cell_utility(cart, 0.0, 0.0, false) == 10.0);

    UtilityModel sh{UtilityKind::SH, 25.0, kPopulationScale};
    CHECK(cell_utility(sh, 25.0, 0.0, false) == 100.0);
    CHECK(cell_utility(sh, 0.0, 0.0, false) == 1.0);
    CHECK(cell_utility(sh, 12.5, 0.0, false) == Catch::Approx(10.0).epsilon(1e-12));
    CHECK(cell_utility(sh, 40.0, 0.0, false) == 100.0);  // saturates above r_max
}

TEST_CASE("utility maps agree with per-cell evaluation") {
    Scenario s;
    s.id = "mix";
    s.flight = make_flight(6, 2.5, 90.0, 500.0);
    s.truth = gen_cloud_field(24, 9, 0.5, 2, 3);
    s.population = gen_population_field(24, 9, 2, 20000.0, 4, 1.0);
    s.population->resolution_km = s.truth.resolution_km;
    s.utility_kind = UtilityKind::CAPD;
    UtilityModel m = make_utility_model(s);

    UtilityMap truth_map = truth_utility_map(m, s);
    for (int r = 0; r < 9; ++r)
        for (int c = 0; c < 24; ++c)
            CHECK(truth_map.at(c, r) == cell_utility_truth(m, s, c, r));

    // An identity overlay anticipates exactly the truth rewards.
    DegradeConfig identity;
    identity.target_accuracy = 1.0;
    s.overlay = degrade_to_overlay(s.truth, identity, 5);
    UtilityMap ant = anticipated_utility_map(m, s, s.overlay->frames[0]);
    CHECK(ant.values == truth_map.values);

    UtilityMap known = known_target_map(m, s);
    for (int r = 0; r < 9; ++r)
        for (int c = 0; c < 24; ++c)
            CHECK(known.at(c, r) ==
                  std::pow(10.0, s.population->at(c, r) / kPopulationScale + 1.0));

    Scenario ca = flat_ca();
    CHECK_THROWS_AS(known_target_map(make_utility_model(ca), ca), UnsupportedModelError);
}
