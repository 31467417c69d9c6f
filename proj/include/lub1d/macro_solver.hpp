#pragma once

// Finite-difference solver for the limit system
//   rho_t + (rho u)_x = 0
//   (rho u)_t + (rho u^2)_x - (mu/(1-rho) u_x)_x + ((rho/rho*)^gamma)_x = rho f
//   rho*_t + u rho*_x = 0
// with no-slip velocity. Staggered grid (cell rho, face u), first-order
// operator splitting: upwind continuity and rho* transport, explicit upwind
// convection and centered pressure gradient, implicit singular viscosity.
// The viscosity clamp 1 - rho >= eta only guards round-off; the dynamics keeps
// rho < 1 and activations are logged, not fatal.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "lub1d/profiles.hpp"
#include "lub1d/tridiag.hpp"

namespace lub1d {

struct PdeParams {
    double mu = 1.0;
    double gamma = 1.0;
    bool pressure = true;
    ForceField force = ForceField::zero();
    double cfl_safety = 0.4;
    double clamp_eta = 1e-6;
};

struct PdeState {
    double time = 0.0;
    double dx = 0.0;
    std::vector<double> rho;      // M cells
    std::vector<double> rhostar;  // M cells
    std::vector<double> u;        // M+1 faces, u[0] = u[M] = 0

    int cells() const { return static_cast<int>(rho.size()); }
};

// dt = safety dx / (max|u| + c_max); c_max from the pressure-wave estimate
// dp/drho = gamma (rho/rho*)^{gamma-1} / rho*. Denominator floored so the
// result stays finite for degenerate states.
inline double cfl_dt(const PdeState& s, const PdeParams& p) {
    double umax = 0.0;
    for (double v : s.u) umax = std::max(umax, std::abs(v));
    double cmax = 0.0;
    if (p.pressure) {
        for (int i = 0; i < s.cells(); ++i) {
            const double rst = std::max(s.rhostar[i], 1e-10);
            const double ratio = std::max(s.rho[i], 0.0) / rst;
            cmax = std::max(cmax, std::sqrt(p.gamma * std::pow(ratio, p.gamma - 1.0) / rst));
        }
    }
    return p.cfl_safety * s.dx / std::max(umax + cmax, 1e-12);
}

namespace detail {

inline double face_density(const std::vector<double>& rho, int j) {
    const int m = static_cast<int>(rho.size());
    if (j == 0) return rho.front();
    if (j == m) return rho.back();
    return 0.5 * (rho[j - 1] + rho[j]);
}

}  // namespace detail

// Conservative upwind continuity update; boundary fluxes vanish with no-slip,
// so the discrete mass sum is preserved exactly.
inline std::vector<double> continuity_update(const std::vector<double>& rho,
                                             const std::vector<double>& u, double dt,
                                             double dx) {
    const int m = static_cast<int>(rho.size());
    std::vector<double> flux(m + 1, 0.0);
    for (int j = 1; j < m; ++j) flux[j] = u[j] * (u[j] > 0.0 ? rho[j - 1] : rho[j]);
    std::vector<double> out(m);
    for (int i = 0; i < m; ++i) out[i] = rho[i] - dt / dx * (flux[i + 1] - flux[i]);
    return out;
}

// Non-conservative upwind for rho*_t + u rho*_x = 0 with cell-centered
// advective velocity; zero-gradient ghosts at the walls.
inline std::vector<double> transport_update(const std::vector<double>& rhostar,
                                            const std::vector<double>& u, double dt,
                                            double dx) {
    const int m = static_cast<int>(rhostar.size());
    std::vector<double> out(m);
    for (int i = 0; i < m; ++i) {
        const double a = 0.5 * (u[i] + u[i + 1]);
        double grad;
        if (a > 0.0)
            grad = (i > 0) ? (rhostar[i] - rhostar[i - 1]) : 0.0;
        else
            grad = (i + 1 < m) ? (rhostar[i + 1] - rhostar[i]) : 0.0;
        out[i] = rhostar[i] - dt / dx * a * grad;
    }
    return out;
}

// Implicit viscous solve: (rhohat/dt)(u^{n+1} - u*) = (nu u_x^{n+1})_x with
// nu = mu / max(1 - rho, eta) at cells. SPD tridiagonal system.
inline std::vector<double> viscous_update(const std::vector<double>& rho,
                                          const std::vector<double>& ustar, double mu,
                                          double eta, double dt, double dx,
                                          long* clamp_count = nullptr) {
    const int m = static_cast<int>(rho.size());
    std::vector<double> nu(m);
    for (int i = 0; i < m; ++i) {
        double one_minus = 1.0 - rho[i];
        if (one_minus < eta) {
            one_minus = eta;
            if (clamp_count) ++(*clamp_count);
        }
        nu[i] = mu / one_minus;
    }
    const int n = m - 1;  // interior faces
    SymTridiag a;
    a.diag.resize(n);
    a.off.resize(n > 1 ? n - 1 : 0);
    std::vector<double> rhs(n);
    const double r = dt / (dx * dx);
    for (int j = 1; j < m; ++j) {
        const double rh = detail::face_density(rho, j);
        a.diag[j - 1] = rh + r * (nu[j] + nu[j - 1]);
        if (j + 1 < m) a.off[j - 1] = -r * nu[j];
        rhs[j - 1] = rh * ustar[j];
    }
    std::vector<double> ui = solve_sym_tridiag(a, std::move(rhs));
    std::vector<double> out(m + 1, 0.0);
    for (int j = 1; j < m; ++j) out[j] = ui[j - 1];
    return out;
}

struct PdeStepStats {
    long clamp_activations = 0;
};

inline PdeState pde_step(const PdeState& s, const PdeParams& p, double dt,
                         PdeStepStats* stats = nullptr) {
    const int m = s.cells();
    const double dx = s.dx;
    if (!(dt > 0.0)) throw std::invalid_argument("pde_step requires dt > 0");
    if (dt > cfl_dt(s, p) * (1.0 + 1e-12))
        throw std::runtime_error("CFL violation in pde_step");

    PdeState out = s;
    out.time = s.time + dt;
    out.rho = continuity_update(s.rho, s.u, dt, dx);
    out.rhostar = transport_update(s.rhostar, s.u, dt, dx);

    // Momentum: update the conservative face momentum explicitly, then divide
    // by the post-continuity face density.
    std::vector<double> mom(m + 1, 0.0);
    for (int j = 1; j < m; ++j) mom[j] = detail::face_density(s.rho, j) * s.u[j];
    std::vector<double> conv(m, 0.0);  // rho u^2 flux at cells
    for (int i = 0; i < m; ++i) {
        const double a = 0.5 * (s.u[i] + s.u[i + 1]);
        conv[i] = a * (a > 0.0 ? mom[i] : mom[i + 1]);
    }
    std::vector<double> pres(m, 0.0);
    if (p.pressure)
        for (int i = 0; i < m; ++i)
            pres[i] = std::pow(s.rho[i] / std::max(s.rhostar[i], 1e-10), p.gamma);

    std::vector<double> ustar(m + 1, 0.0);
    for (int j = 1; j < m; ++j) {
        double mj = mom[j] - dt / dx * (conv[j] - conv[j - 1]);
        if (p.pressure) mj -= dt / dx * (pres[j] - pres[j - 1]);
        if (!p.force.is_zero())
            mj += dt * detail::face_density(s.rho, j) * p.force(s.time, j * dx);
        ustar[j] = mj / std::max(detail::face_density(out.rho, j), 1e-10);
    }

    long clamps = 0;
    out.u = viscous_update(out.rho, ustar, p.mu, p.clamp_eta, dt, dx, &clamps);
    if (stats) stats->clamp_activations += clamps;
    return out;
}

struct PdeRun {
    PdeParams params;
    int cells = 0;
    double horizon = 0.0;
    std::vector<PdeState> frames;              // at requested output times
    std::vector<std::pair<double, double>> max_rho_series;  // (t, max_x rho) per step
    long clamp_activations = 0;
    long steps = 0;
    double mass0 = 0.0;
    double mass_drift = 0.0;
    double max_rho_overall = 0.0;
};

inline PdeState pde_init(const Profile& rho0, const Profile& rhostar0, const Profile& u0,
                         int cells) {
    PdeState s;
    s.dx = 1.0 / cells;
    s.rho.resize(cells);
    s.rhostar.resize(cells);
    s.u.assign(cells + 1, 0.0);
    for (int i = 0; i < cells; ++i) {
        const double a = i * s.dx, b = (i + 1) * s.dx;
        s.rho[i] = rho0.integral(a, b) / s.dx;
        s.rhostar[i] = rhostar0.integral(a, b) / s.dx;
    }
    for (int j = 1; j < cells; ++j) s.u[j] = u0(j * s.dx);
    return s;
}

// Advances to T with the CFL step, landing exactly on every requested output
// time, and records the per-step congestion history.
inline PdeRun pde_solve(const Profile& rho0, const Profile& rhostar0, const Profile& u0,
                        const PdeParams& params, int cells, double horizon,
                        std::vector<double> output_times) {
    PdeRun run;
    run.params = params;
    run.cells = cells;
    run.horizon = horizon;

    output_times.push_back(0.0);
    output_times.push_back(horizon);
    std::sort(output_times.begin(), output_times.end());
    output_times.erase(std::unique(output_times.begin(), output_times.end(),
                                   [](double a, double b) { return std::abs(a - b) < 1e-14; }),
                       output_times.end());
    for (double t : output_times)
        if (t < 0.0 || t > horizon + 1e-14)
            throw std::invalid_argument("output time out of range");

    PdeState s = pde_init(rho0, rhostar0, u0, cells);
    for (double v : s.rho) run.mass0 += v * s.dx;

    auto track = [&](const PdeState& st) {
        double mx = 0.0, mass = 0.0;
        for (double v : st.rho) {
            mx = std::max(mx, v);
            mass += v * st.dx;
        }
        run.max_rho_series.emplace_back(st.time, mx);
        run.max_rho_overall = std::max(run.max_rho_overall, mx);
        run.mass_drift = std::max(run.mass_drift, std::abs(mass - run.mass0));
    };
    track(s);

    std::size_t next_out = 0;
    while (next_out < output_times.size() && output_times[next_out] <= 1e-14) {
        run.frames.push_back(s);
        run.frames.back().time = output_times[next_out];
        ++next_out;
    }

    PdeStepStats stats;
    while (horizon - s.time > 1e-12 * std::max(horizon, 1.0)) {
        double dt = std::min(cfl_dt(s, params), horizon - s.time);
        if (next_out < output_times.size())
            dt = std::min(dt, std::max(output_times[next_out] - s.time, 1e-15));
        s = pde_step(s, params, dt, &stats);
        ++run.steps;
        track(s);
        while (next_out < output_times.size() &&
               s.time >= output_times[next_out] - 1e-12) {
            run.frames.push_back(s);
            run.frames.back().time = output_times[next_out];
            ++next_out;
        }
    }
    run.clamp_activations = stats.clamp_activations;
    return run;
}

}  // namespace lub1d
