#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "lub1d/harness.hpp"
#include "lub1d/macro_solver.hpp"

#include "oracles.hpp"

using namespace lub1d;

TEST_CASE("uniform rest state is steady") {
    PdeParams p;
    PdeState s = pde_init(Profile::constant(0.7), Profile::constant(0.7),
                          Profile::constant(0.0), 64);
    const double dt = 0.5 * cfl_dt(s, p);
    PdeState out = s;
    for (int k = 0; k < 25; ++k) out = pde_step(out, p, dt);
    for (int i = 0; i < 64; ++i) {
        CHECK(out.rho[i] == Catch::Approx(0.7).margin(1e-13));
        CHECK(out.rhostar[i] == Catch::Approx(0.7).margin(1e-13));
    }
    for (double v : out.u) CHECK(std::abs(v) < 1e-13);
}

TEST_CASE("constant critical density is transported exactly") {
    const PdeRun run = pde_solve(Profile::constant(0.7), Profile::constant(0.7),
                                 Profile::sinusoid(0.0, 0.5, 1), PdeParams{}, 128, 0.3,
                                 {0.1, 0.2, 0.3});
    for (const PdeState& f : run.frames)
        for (double v : f.rhostar) CHECK(v == Catch::Approx(0.7).margin(1e-14));
}

TEST_CASE("manufactured advection matches the characteristics oracle") {
    const Profile bump = Profile::gaussian_bump(0.6, 0.2, 0.4, 0.1);
    auto u_exact = [](double x) { return 0.4 * std::sin(std::numbers::pi * x); };
    const double horizon = 0.1;

    auto solve_at = [&](int m) {
        const double dx = 1.0 / m;
        std::vector<double> rhostar(m), u(m + 1);
        for (int i = 0; i < m; ++i)
            rhostar[i] = bump.integral(i * dx, (i + 1) * dx) / dx;
        for (int j = 0; j <= m; ++j) u[j] = u_exact(j * dx);
        u[0] = u[m] = 0.0;
        const double dt0 = 0.4 * dx / 0.4;
        double t = 0.0;
        while (t < horizon - 1e-14) {
            const double dt = std::min(dt0, horizon - t);
            rhostar = transport_update(rhostar, u, dt, dx);
            t += dt;
        }
        double err = 0.0;
        for (int i = 0; i < m; ++i) {
            const double xc = (i + 0.5) * dx;
            const double exact = bump(oracle::transport_backtrace(u_exact, xc, horizon, 400));
            err += std::abs(rhostar[i] - exact) * dx;
        }
        return err;
    };

    const double e200 = solve_at(200);
    CHECK(e200 <= 1.0 / 200.0);  // first-order upwind: L1 error <= C dx, C = 1
    const double e100 = solve_at(100);
    CHECK(e100 / e200 > 1.5);    // and it shrinks roughly linearly in dx
}

TEST_CASE("CFL step") {
    PdeParams p;
    SECTION("pressure-wave formula") {
        PdeState s = pde_init(Profile::constant(0.7), Profile::constant(0.7),
                              Profile::constant(0.0), 100);
        CHECK(cfl_dt(s, p) ==
              Catch::Approx(0.4 * 0.01 / std::sqrt(1.0 / 0.7)).epsilon(1e-12));
    }
    SECTION("degenerate states stay finite") {
        PdeState s;
        s.dx = 0.01;
        s.rho.assign(100, 1e-12);
        s.rhostar.assign(100, 1e-12);
        s.u.assign(101, 0.0);
        const double dt = cfl_dt(s, p);
        CHECK(std::isfinite(dt));
        CHECK(dt > 0.0);
    }
    SECTION("doubling the resolution halves dt") {
        PdeState a = pde_init(Profile::constant(0.7), Profile::constant(0.7),
                              Profile::sinusoid(0.0, 0.5, 1), 100);
        PdeState b = pde_init(Profile::constant(0.7), Profile::constant(0.7),
                              Profile::sinusoid(0.0, 0.5, 1), 200);
        CHECK(cfl_dt(a, p) == Catch::Approx(2.0 * cfl_dt(b, p)).epsilon(1e-10));
    }
}

TEST_CASE("case 1 relaxes back to the flat state") {
    PdeParams p;
    p.mu = 0.03;  // preset viscosity
    const PdeRun run = pde_solve(Profile::constant(0.7), Profile::constant(0.7),
                                 Profile::sinusoid(0.0, 0.5, 1), p, 200, 1.0,
                                 {0.2, 1.0});
    CHECK(run.clamp_activations == 0);
    CHECK(run.mass_drift <= 1e-12);
    CHECK(run.max_rho_overall < 1.0);
    CHECK(run.max_rho_overall > 0.75);  // the compression is visible first
    const PdeState& last = run.frames.back();
    for (double v : last.rho) CHECK(std::abs(v - 0.7) <= 0.05);
}

TEST_CASE("pressureless congestion forms and persists") {
    PdeParams p;
    p.mu = 0.03;
    p.pressure = false;
    const PdeRun run = pde_solve(Profile::constant(0.7), Profile::constant(1.0),
                                 Profile::sinusoid(0.0, 0.5, 1), p, 400, 1.0, {1.0});
    CHECK(run.max_rho_overall >= 0.9);
    CHECK(run.max_rho_overall <= 1.0 - 1e-4);
    // After formation (first time max rho reaches 0.9) the congestion never
    // decays by more than 0.01 below its running peak.
    double peak = 0.0;
    bool formed = false;
    for (const auto& [t, mx] : run.max_rho_series) {
        if (!formed && mx >= 0.9) formed = true;
        if (formed) {
            CHECK(mx >= peak - 0.01);
            peak = std::max(peak, mx);
        }
    }
    CHECK(formed);
}

TEST_CASE("with-pressure congestion peaks and then releases") {
    PdeParams p;
    p.mu = 0.03;
    const PdeRun run = pde_solve(Profile::constant(0.7), Profile::constant(1.0),
                                 Profile::sinusoid(0.0, 0.5, 1), p, 200, 1.0, {1.0});
    double peak = 0.0, t_peak = 0.0;
    for (const auto& [t, mx] : run.max_rho_series)
        if (mx > peak) {
            peak = mx;
            t_peak = t;
        }
    CHECK(t_peak > 0.1);
    CHECK(t_peak < 0.35);
    CHECK(run.max_rho_series.back().second < peak - 0.01);
}

TEST_CASE("stiffer pressure lowers the congestion peak") {
    auto peak_at = [](double gamma) {
        PdeParams p;
        p.mu = 0.03;
        p.gamma = gamma;
        return pde_solve(Profile::constant(0.7), Profile::constant(0.7),
                         Profile::sinusoid(0.0, 0.5, 1), p, 200, 0.5, {0.5})
            .max_rho_overall;
    };
    CHECK(peak_at(5.0) < peak_at(2.0));
}

TEST_CASE("implicit viscous solve is unconditionally stable") {
    std::mt19937 rng(89);
    std::uniform_real_distribution<double> dens(0.4, 0.95);
    std::uniform_real_distribution<double> vel(-1.0, 1.0);
    std::uniform_real_distribution<double> logdt(-6.0, 3.0);
    for (int trial = 0; trial < 25; ++trial) {
        const int m = 100;
        std::vector<double> rho(m), u(m + 1, 0.0);
        for (double& v : rho) v = dens(rng);
        for (int j = 1; j < m; ++j) u[j] = vel(rng);
        const double dt = std::pow(10.0, logdt(rng));
        const std::vector<double> out = viscous_update(rho, u, 1.0, 1e-6, dt, 1.0 / m);
        double n0 = 0.0, n1 = 0.0;
        for (int j = 0; j <= m; ++j) {
            n0 += u[j] * u[j];
            n1 += out[j] * out[j];
        }
        CHECK(std::sqrt(n1) <= std::sqrt(n0) * (1.0 + 1e-12));
    }
}

TEST_CASE("self-convergence under mesh refinement") {
    auto run_at = [](int m) {
        return pde_solve(Profile::constant(0.7), Profile::constant(0.7),
                         Profile::sinusoid(0.0, 0.5, 1), PdeParams{}, m, 0.2, {0.2});
    };
    const PdeRun r100 = run_at(100), r200 = run_at(200), r400 = run_at(400);
    const double d1 =
        l1_distance(macro_density_cells(r100.frames.back()),
                    macro_density_cells(r200.frames.back()));
    const double d2 =
        l1_distance(macro_density_cells(r200.frames.back()),
                    macro_density_cells(r400.frames.back()));
    CHECK(d1 / d2 >= 1.7);
}

TEST_CASE("step rejects a CFL violation") {
    PdeParams p;
    PdeState s = pde_init(Profile::constant(0.7), Profile::constant(0.7),
                          Profile::sinusoid(0.0, 0.5, 1), 50);
    CHECK_THROWS_WITH(pde_step(s, p, 10.0 * cfl_dt(s, p)),
                      Catch::Matchers::ContainsSubstring("CFL"));
}
