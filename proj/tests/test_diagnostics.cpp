#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "lub1d/diagnostics.hpp"
#include "lub1d/initializer.hpp"
#include "lub1d/integrator.hpp"

#include "test_support.hpp"

using namespace lub1d;

namespace {

Trajectory run_case1(int n, double horizon, double dt_init = 1e-4,
                     ForceField force = ForceField::zero(), bool pressure = true) {
    SimConfig cfg = testsup::plain_config(n);
    cfg.horizon = horizon;
    cfg.integrator.dt_init = dt_init;
    cfg.force = force;
    cfg.pressure = pressure;
    if (!pressure) {
        cfg.init.rhostar0 = Profile::constant(1.0);
    }
    auto [state, report] = build_initial_state(validate_config(cfg));
    return advance(state, cfg, report);
}

}  // namespace

TEST_CASE("energy ledger at equilibrium stays constant") {
    SimConfig cfg = testsup::plain_config(10);
    cfg.horizon = 0.01;
    cfg.init.u0 = Profile::constant(0.0);
    auto [state, report] = build_initial_state(validate_config(cfg));
    const Trajectory traj = advance(state, cfg, report);
    const EnergyLedger led = energy_check(traj, cfg);
    CHECK(led.pass);
    for (std::size_t f = 0; f < led.time.size(); ++f) {
        CHECK(led.kinetic[f] == Catch::Approx(0.0).margin(1e-18));
        CHECK(led.potential[f] == Catch::Approx(led.potential[0]).margin(1e-12));
        CHECK(led.dissipation[f] == Catch::Approx(0.0).margin(1e-15));
        CHECK(led.margin[f] == Catch::Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("force-free case 1 obeys the energy inequality") {
    const Trajectory traj = run_case1(50, 0.5);
    const EnergyLedger led = energy_check(traj, traj.config);
    CHECK(led.pass);
    CHECK(led.gamma1_extension);
    for (double m : led.margin) CHECK(m >= -led.tol);
    // The inequality discards three quarters of the dissipation, so away from
    // equilibrium the measured margin is strictly positive.
    CHECK(led.margin.back() > 0.0);
}

TEST_CASE("constant forcing budget uses the L1 norm") {
    const double c = 0.8;
    const Trajectory traj = run_case1(30, 0.2, 1e-4, ForceField::constant(c));
    const EnergyLedger led = energy_check(traj, traj.config);
    CHECK(led.pass);
    double dn0 = 0.0;
    for (int k = 0; k < traj.frames.front().n_gaps(); ++k)
        dn0 += traj.frames.front().gap(k);
    // ||f(t,.)||_{L1} = |c| so the budget integrates exactly to c^2 t D_N/mu.
    CHECK(led.source_budget.back() ==
          Catch::Approx(c * c * 0.2 * dn0 / traj.config.mu).epsilon(1e-10));
}

TEST_CASE("gamma=1 log primitive closes the discrete energy identity") {
    // With f = 0 the scheme should track K + P + 4 D = E0 up to O(dt);
    // a wrong gamma=1 primitive would break this at O(1).
    SimConfig cfg = testsup::plain_config(20);
    cfg.horizon = 0.01;
    cfg.integrator.dt_init = 1e-6;
    auto [state, report] = build_initial_state(validate_config(cfg));
    const Trajectory traj = advance(state, cfg, report);
    const EnergyLedger led = energy_check(traj, cfg);
    for (std::size_t f = 0; f < led.time.size(); ++f) {
        const double identity =
            led.kinetic[f] + led.potential[f] + 4.0 * led.dissipation[f];
        CHECK(identity == Catch::Approx(led.e0).margin(1e-5));
    }
}

TEST_CASE("distance certificate on the case 1 initial frame") {
    SimConfig cfg = testsup::plain_config(50);
    auto [state, report] = build_initial_state(validate_config(cfg));
    Trajectory traj;
    traj.config = cfg;
    traj.init_report = report;
    traj.frames = {state};
    traj.frame_aux = {{}};
    traj.aggregates.min_gap_over_eps = report.c0;
    traj.aggregates.max_gap_over_eps = report.C0;
    traj.aggregates.max_increment = report.max_inc_d;
    const EstimateReport rep = distance_certificate(traj);
    CHECK(rep.min_gap_over_eps == Catch::Approx(6.0 / 7.0).epsilon(1e-11));
    CHECK(rep.max_gap_over_eps == Catch::Approx(6.0 / 7.0).epsilon(1e-11));
    CHECK(rep.max_increment_over_eps2 < 1e-6);
    CHECK(rep.tv_rho_max < 1e-8);
}

TEST_CASE("case 3 increment measure is stable under N doubling") {
    std::vector<double> measured;
    for (int n : {50, 100}) {
        SimConfig cfg = testsup::plain_config(n);
        cfg.init.rho0 = Profile::gaussian_bump(0.6, 0.2, 0.5, 0.1);
        cfg.init.rhostar0 = Profile::gaussian_bump(0.6, -0.2, 0.5, 0.1);
        cfg.init.delta = 0.4;
        cfg.init.rhobar = 0.8;
        cfg.horizon = 0.2;
        auto [state, report] = build_initial_state(validate_config(cfg));
        const Trajectory traj = advance(state, cfg, report);
        measured.push_back(distance_certificate(traj).max_increment_over_eps2);
    }
    const double ratio = measured[1] / measured[0];
    CHECK(ratio > 0.5);
    CHECK(ratio < 2.0);
}

TEST_CASE("velocity certificate") {
    SECTION("tight at equilibrium") {
        SimConfig cfg = testsup::plain_config(10);
        cfg.horizon = 0.01;
        cfg.init.u0 = Profile::constant(0.0);
        auto [state, report] = build_initial_state(validate_config(cfg));
        const Trajectory traj = advance(state, cfg, report);
        const VelocityCertificate vc = velocity_certificate(traj);
        CHECK(vc.pass);
        CHECK(vc.max_abs_velocity <= 1e-14);  // solve roundoff only
        CHECK(vc.bound_b <= 1e-12);
    }
    SECTION("case 1 band") {
        const Trajectory traj = run_case1(50, 0.5);
        const VelocityCertificate vc = velocity_certificate(traj);
        CHECK(vc.pass);
        CHECK(vc.max_abs_velocity <= 0.5 + vc.bound_b + vc.slack);
    }
    SECTION("band grows with the forcing and still holds") {
        const Trajectory traj = run_case1(30, 0.2, 1e-4, ForceField::constant(5.0));
        const VelocityCertificate vc = velocity_certificate(traj);
        CHECK(vc.pass);
        CHECK(vc.bound_b >= 5.0 * 0.2);  // the f term alone contributes |c| T
    }
}

TEST_CASE("exact invariants") {
    const Trajectory traj = run_case1(40, 0.2);
    const InvariantReport ir = invariant_check(traj);
    CHECK(ir.pass);
    CHECK(ir.gap_sum_drift <= 1e-12);
    CHECK(ir.mass_drift <= 1e-10);
    CHECK(ir.rhostar_multiset_ok);
    CHECK(ir.dissipation_monotone);
}

TEST_CASE("pressure-off trajectories certify too") {
    const Trajectory traj = run_case1(30, 0.2, 1e-4, ForceField::zero(), false);
    const Certificates c = certify(traj, traj.config);
    CHECK(c.all_pass);
    for (double p : c.energy.potential) CHECK(p == 0.0);
    CHECK_FALSE(c.energy.gamma1_extension);
}
