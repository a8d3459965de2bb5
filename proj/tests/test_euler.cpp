// Advection checks: symmetry and conservation of the semi-Lagrangian step,
// the orbit distance, and the stability-experiment plumbing.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "vortexpair/euler.hpp"
#include "vortexpair/optimizer.hpp"

using namespace vortexpair;

TEST_CASE("row shift moves values up and raises impulse by one cell height") {
    const Domain d(1.0, 1.5, 2, 3);
    Field f(d);
    f.values = {1.0, 2.0, 3.0, 4.0, 0.0, 0.0};
    const Field up = shift_rows(f, 1);
    CHECK(up.values == std::vector<double>{0.0, 0.0, 1.0, 2.0, 3.0, 4.0});
    CHECK(impulse(up) == Catch::Approx(impulse(f) + d.dy() * integrate(f)).epsilon(1e-14));
    const Field down = shift_rows(f, -1);
    CHECK(down.values == std::vector<double>{3.0, 4.0, 0.0, 0.0, 0.0, 0.0});
}

TEST_CASE("zero vorticity stays zero") {
    const Domain d(1.0, 1.0, 8, 8);
    const EulerAdvector adv(d);
    EvolutionState s = adv.make_state(Field(d), 0.05);
    CHECK(s.energy0 == 0.0);
    CHECK(s.mass0 == 0.0);
    const Trajectory traj = adv.evolve(s, 0.25, 2);
    CHECK(traj.state.t == Catch::Approx(0.25));
    for (double v : traj.state.omega.values) CHECK(v == 0.0);
    for (const ConservationSample& c : traj.series) {
        CHECK(c.energy == 0.0);
        CHECK(c.mass == 0.0);
        CHECK(c.xp == 0.0);
    }
    CHECK_FALSE(traj.state.cfl_warning);
}

TEST_CASE("state construction is validated") {
    const Domain d(1.0, 1.0, 8, 8);
    const EulerAdvector adv(d);
    CHECK_THROWS_AS(adv.make_state(Field(d), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(adv.make_state(Field(Domain(1.0, 1.0, 4, 4)), 0.1), std::invalid_argument);
    Field neg(d);
    neg.values[3] = -1.0;
    CHECK_THROWS_AS(adv.make_state(neg, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(adv.evolve(adv.make_state(Field(d), 0.1), -1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(adv.evolve(adv.make_state(Field(d), 0.1), 1.0, 0), std::invalid_argument);
}

TEST_CASE("columns translate equivariantly under the step") {
    const Domain d(2.0, 1.5, 48, 24);
    const EulerAdvector adv(d);
    const Field bump = vptest::smooth_bump(d, -0.25, 0.8, 0.3);
    EvolutionState a = adv.make_state(bump, 0.01);
    EvolutionState b = adv.make_state(shift_columns(bump, 1), 0.01);
    for (int n = 0; n < 5; ++n) {
        a = adv.step(a);
        b = adv.step(b);
    }
    const Field moved = shift_columns(a.omega, 1);
    double worst = 0.0;
    for (std::size_t k = 0; k < moved.values.size(); ++k)
        worst = std::max(worst, std::fabs(moved.values[k] - b.omega.values[k]));
    CHECK(worst <= 1e-10);
}

TEST_CASE("smooth bump conserves mass to a tenth of a basis point per step") {
    const Domain d(1.0, 1.0, 64, 32); // square cells of side 1/32
    const EulerAdvector adv(d);
    const Field bump = vptest::smooth_bump(d, 0.0, 0.5, 0.35, 0.4);
    EvolutionState s = adv.make_state(bump, 0.01);
    REQUIRE(s.mass0 > 0.0);
    const int steps = 10;
    for (int n = 0; n < steps; ++n) {
        s = adv.step(s);
        CHECK(std::fabs(integrate(s.omega) - s.mass0) / s.mass0 <= 1e-4 * (n + 1));
    }
    CHECK(is_nonnegative(s.omega));
    CHECK(s.clamped_mass == 0.0); // bilinear sampling of nonnegative data stays nonnegative
    CHECK_FALSE(s.cfl_warning);

    SECTION("energy and impulse drift stay small over the run") {
        CHECK(std::fabs(adv.kernel().energy(s.omega) - s.energy0) / s.energy0 <= 3e-3);
        CHECK(std::fabs(impulse(s.omega) - s.impulse0) / s.impulse0 <= 3e-3);
    }
}

TEST_CASE("oversized steps raise the CFL warning") {
    const Domain d(1.0, 1.0, 32, 16);
    const EulerAdvector adv(d);
    EvolutionState s = adv.make_state(vptest::smooth_bump(d, 0.0, 0.5, 0.25), 50.0);
    s = adv.step(s);
    CHECK(s.cfl_warning);
}

TEST_CASE("evolve samples the series at the requested cadence") {
    const Domain d(1.0, 1.0, 16, 8);
    const EulerAdvector adv(d);
    const Trajectory traj =
        adv.evolve(adv.make_state(vptest::smooth_bump(d, 0.0, 0.5, 0.2), 0.01), 0.1, 4);
    // 10 steps: records at t=0, steps 4 and 8, and the final step
    REQUIRE(traj.series.size() == 4);
    CHECK(traj.series.front().t == 0.0);
    CHECK(traj.series[1].t == Catch::Approx(0.04));
    CHECK(traj.series.back().t == Catch::Approx(0.1));
    int seen = 0;
    adv.evolve(adv.make_state(vptest::smooth_bump(d, 0.0, 0.5, 0.2), 0.01), 0.1, 4, 3.0,
               [&](const EvolutionState&) { ++seen; });
    CHECK(seen == 4);
}

TEST_CASE("orbit distance vanishes exactly on the translate family") {
    const Domain d(2.0, 1.0, 24, 12);
    const Field rep = vptest::smooth_bump(d, 0.1, 0.5, 0.25);
    CHECK(orbit_distance(rep, rep, 3.0) == 0.0);
    CHECK(orbit_distance(shift_columns(rep, 3), rep, 3.0) == 0.0);
    CHECK(orbit_distance(shift_columns(rep, -2), rep, 3.0) == 0.0);
    CHECK_THROWS_AS(orbit_distance(rep, Field(Domain(2.0, 1.0, 12, 6)), 3.0),
                    std::invalid_argument);
}

TEST_CASE("orbit distance of a single-cell addition matches the hand value") {
    const Domain d(2.0, 1.0, 24, 12);
    const Field rep = vptest::smooth_bump(d, 0.0, 0.5, 0.25);
    const double p = 3.0;
    const double area = d.cell_area();
    const double m = 1e-3; // perturbation mass, small enough that no shift competes
    const int ci = 15, cj = 8;
    Field pert = rep;
    pert.at(ci, cj) += m / area;

    const double want = m * d.y_center(cj) + m + m * std::pow(area, 1.0 / p - 1.0);
    CHECK(orbit_distance(pert, rep, p) == Catch::Approx(want).epsilon(1e-12));
}

TEST_CASE("stability experiment realizes the requested perturbation size") {
    const Domain d(2.0, 2.0, 32, 16);
    const Field patch = vptest::disc_patch(d, 0.0, 0.75, 0.5);
    SolverConfig cfg;
    cfg.impulse = 1.0;
    const SolverState st = AscentSolver(d, decreasing_rearrangement(patch), cfg).run();
    REQUIRE(st.converged);
    const EulerAdvector adv(d);

    SECTION("perturbed start sits exactly delta away in the solution norm") {
        const double delta = 1e-2;
        const Field raised = shift_rows(st.zeta, 1);
        const double eps = delta / xp_norm(raised - st.zeta, 3.0);
        const Field omega0 = (1.0 - eps) * st.zeta + eps * raised;
        CHECK(xp_norm(omega0 - st.zeta, 3.0) == Catch::Approx(delta).epsilon(1e-12));
    }
    SECTION("unperturbed maximizer moves only at discretization scale") {
        const StabilityReport r = adv.stability_experiment(st.zeta, 0.0, 0.05, 0.01, 1);
        CHECK(r.epsilon == 0.0);
        CHECK(r.distances.size() == r.series.size());
        CHECK(r.max_distance <= 0.04 * xp_norm(st.zeta, 3.0));
    }
    SECTION("perturbed run reports distances at every sample") {
        const StabilityReport r = adv.stability_experiment(st.zeta, 5e-3, 0.05, 0.01, 1);
        CHECK(r.epsilon > 0.0);
        CHECK(r.delta == 5e-3);
        REQUIRE(r.distances.size() == r.series.size());
        CHECK(r.max_distance > 0.0);
        CHECK(r.distances.front() == Catch::Approx(5e-3).epsilon(1e-9));
    }
    SECTION("hypothesis guards reject bad input") {
        CHECK_THROWS_AS(adv.stability_experiment(st.zeta, -1.0, 0.1, 0.01, 1),
                        std::invalid_argument);
        CHECK_THROWS_AS(adv.stability_experiment(st.zeta, 1e9, 0.1, 0.01, 1),
                        std::invalid_argument);
        Field neg = st.zeta;
        neg.values[0] = -1.0;
        neg.nonneg = false;
        CHECK_THROWS_AS(adv.stability_experiment(neg, 1e-3, 0.1, 0.01, 1),
                        std::invalid_argument);
    }
}
