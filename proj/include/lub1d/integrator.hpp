#pragma once

// Time integration of the stiff microscopic ODE.
//
// Scheme: lubrication implicit, repulsion and forcing explicit. One step with
// frozen coefficients A(q^n):
//     (2 eps/dt I + A(q^n)) u^{n+1} = (2 eps/dt) u^n + b(q^n) + 2 eps fbar(t^n, q^n)
//     q^{n+1} = q^n + dt u^{n+1}
// The system matrix is SPD plus a positive diagonal shift, so the velocity
// solve is unconditionally stable; the explicit repulsion is the non-stiff
// part for moderate gamma. First order in dt; dt control below is the main
// accuracy limiter.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "lub1d/micro_dynamics.hpp"
#include "lub1d/state.hpp"
#include "lub1d/tridiag.hpp"

namespace lub1d {

namespace detail {

inline MicroState step_candidate(const MicroState& s, const SimConfig& cfg, double dt) {
    const ForceAssembly fa = assemble_forces(s, cfg, s.time);
    const int n = s.n_particles() - 1;
    const double shift = 2.0 * s.eps / dt;

    SymTridiag m = fa.A;
    for (int r = 0; r < n; ++r) m.diag[r] += shift;

    std::vector<double> rhs(n);
    for (int r = 0; r < n; ++r)
        rhs[r] = shift * s.u[r + 1] + fa.b[r] + 2.0 * s.eps * fa.fbar[r];
    const std::vector<double> ui = solve_sym_tridiag(m, std::move(rhs));

    MicroState out = s;
    out.time = s.time + dt;
    for (int r = 0; r < n; ++r) {
        out.u[r + 1] = ui[r];
        out.q[r + 1] = s.q[r + 1] + dt * ui[r];
    }
    return out;  // dstar, eps, pinned entries unchanged
}

}  // namespace detail

// One committed semi-implicit step. A post-step contact (gap <= 0) is a hard
// error here; the adaptive driver rejects such steps instead of committing.
inline MicroState step(const MicroState& s, const SimConfig& cfg, double dt) {
    if (!(dt > 0.0)) throw SolverAbort("step requires dt > 0");
    MicroState out = detail::step_candidate(s, cfg, dt);
    for (int k = 0; k < out.n_gaps(); ++k)
        if (!(out.gap(k) > 0.0))
            throw SolverAbort("post-step gap <= 0 at index " + std::to_string(k));
    return out;
}

inline MicroState interpolate_state(const MicroState& a, const MicroState& b, double t) {
    if (!(b.time > a.time)) {
        MicroState out = a;
        out.time = t;
        return out;
    }
    const double th = std::clamp((t - a.time) / (b.time - a.time), 0.0, 1.0);
    MicroState out = a;
    out.time = t;
    for (std::size_t i = 0; i < a.q.size(); ++i) {
        out.q[i] = a.q[i] + th * (b.q[i] - a.q[i]);
        out.u[i] = a.u[i] + th * (b.u[i] - a.u[i]);
    }
    return out;
}

// Integrates to the horizon with adaptive dt: a step is rejected (dt halved)
// when a gap falls below gap_floor_frac of its pre-step value, a gap closes,
// or the velocity change exceeds cfl_safety * (|u^n|_inf + 1); dt doubles
// (capped at dt_init) after 5 consecutive accepted steps. Frames at the
// requested output times are linearly interpolated between committed states.
inline Trajectory advance(const MicroState& initial, const SimConfig& cfg,
                          const InitReport& report = {}) {
    validate_state(initial);
    const double T = cfg.horizon;
    const IntegratorControls& ic = cfg.integrator;

    // Output schedule: always include t=0 and t=T.
    std::vector<double> out_times = ic.output_times;
    out_times.push_back(0.0);
    out_times.push_back(T);
    std::sort(out_times.begin(), out_times.end());
    out_times.erase(std::unique(out_times.begin(), out_times.end(),
                                [](double a, double b) { return std::abs(a - b) < 1e-14; }),
                    out_times.end());

    Trajectory traj;
    traj.config = cfg;
    traj.init_report = report;

    MicroState cur = initial;
    cur.time = 0.0;

    FrameAux aux{};
    auto slope_of = [&](const MicroState& s) {
        return cfg.pressure ? max_interior_dxg(repulsion(s, cfg.gamma), s.eps) : 0.0;
    };
    double slope_cur = slope_of(cur);
    double f_l1_cur = cfg.force.l1_norm_at(0.0);
    double f_linf_cur = cfg.force.linf_norm_at(0.0);

    auto record_aggregates = [&](const MicroState& s, double slope) {
        double dmin = s.gap(0), dmax = s.gap(0), inc = 0.0, umax = 0.0;
        for (int k = 0; k < s.n_gaps(); ++k) {
            dmin = std::min(dmin, s.gap(k));
            dmax = std::max(dmax, s.gap(k));
            if (k > 0) inc = std::max(inc, std::abs(s.gap(k) - s.gap(k - 1)));
        }
        for (double v : s.u) umax = std::max(umax, std::abs(v));
        RunAggregates& ag = traj.aggregates;
        ag.min_gap_over_eps = std::min(ag.min_gap_over_eps, dmin / s.eps);
        ag.max_gap_over_eps = std::max(ag.max_gap_over_eps, dmax / s.eps);
        ag.max_increment = std::max(ag.max_increment, inc);
        ag.max_abs_velocity = std::max(ag.max_abs_velocity, umax);
        ag.max_abs_dxg = std::max(ag.max_abs_dxg, slope);
        return std::pair{dmin, umax};
    };

    traj.aggregates.min_gap_over_eps = cur.gap(0) / cur.eps;
    traj.aggregates.min_dt_accepted = ic.dt_init;
    record_aggregates(cur, slope_cur);

    std::size_t next_out = 0;
    auto emit_frames_up_to = [&](const MicroState& a, const FrameAux& aux_a,
                                 const MicroState& b, const FrameAux& aux_b) {
        while (next_out < out_times.size() && out_times[next_out] <= b.time + 1e-14) {
            const double ot = out_times[next_out];
            const double th =
                std::clamp((ot - a.time) / std::max(b.time - a.time, 1e-300), 0.0, 1.0);
            traj.frames.push_back(interpolate_state(a, b, ot));
            FrameAux fx;
            fx.dissipation = aux_a.dissipation + th * (aux_b.dissipation - aux_a.dissipation);
            fx.f_l2l1 = aux_a.f_l2l1 + th * (aux_b.f_l2l1 - aux_a.f_l2l1);
            fx.dxg_l1linf = aux_a.dxg_l1linf + th * (aux_b.dxg_l1linf - aux_a.dxg_l1linf);
            fx.f_l1linf = aux_a.f_l1linf + th * (aux_b.f_l1linf - aux_a.f_l1linf);
            traj.frame_aux.push_back(fx);
            ++next_out;
        }
    };

    // Frame at t=0.
    emit_frames_up_to(cur, aux, cur, aux);

    double dt_next = ic.dt_init;
    int consecutive_accepts = 0;

    while (T - cur.time > 1e-14 * std::max(T, 1.0)) {
        const double dt = std::min(dt_next, T - cur.time);
        MicroState cand = detail::step_candidate(cur, cfg, dt);

        // Rejection tests.
        int bad_gap = -1;
        for (int k = 0; k < cand.n_gaps(); ++k) {
            const double d_new = cand.gap(k);
            if (!(d_new > 0.0) || d_new < ic.gap_floor_frac * cur.gap(k)) {
                bad_gap = k;
                break;
            }
        }
        double du_max = 0.0, u_max = 0.0;
        for (std::size_t i = 0; i < cur.u.size(); ++i) {
            du_max = std::max(du_max, std::abs(cand.u[i] - cur.u[i]));
            u_max = std::max(u_max, std::abs(cur.u[i]));
        }
        const bool velocity_reject = du_max > ic.cfl_safety * (u_max + 1.0);

        if (bad_gap >= 0 || velocity_reject) {
            ++traj.aggregates.steps_rejected;
            consecutive_accepts = 0;
            dt_next *= 0.5;
            if (dt_next < ic.dt_min)
                throw SolverAbort(
                    "dt underflow below dt_min at t=" + std::to_string(cur.time) +
                    (bad_gap >= 0 ? ", gap index " + std::to_string(bad_gap)
                                  : ", velocity change"));
            continue;
        }

        // Accept: accumulate the running integrals (midpoint/trapezoid in time).
        FrameAux aux_new = aux;
        {
            double diss = 0.0;
            for (int k = 0; k < cur.n_gaps(); ++k) {
                const double d_mid = 0.5 * (cur.gap(k) + cand.gap(k));
                const double du_mid = 0.5 * ((cur.u[k + 1] - cur.u[k]) +
                                             (cand.u[k + 1] - cand.u[k]));
                diss += du_mid * du_mid / d_mid;
            }
            aux_new.dissipation += dt * 0.25 * cfg.mu * diss;
        }
        const double slope_new = slope_of(cand);
        const double f_l1_new = cfg.force.l1_norm_at(cand.time);
        const double f_linf_new = cfg.force.linf_norm_at(cand.time);
        aux_new.f_l2l1 += dt * 0.5 * (f_l1_cur * f_l1_cur + f_l1_new * f_l1_new);
        aux_new.dxg_l1linf += dt * 0.5 * (slope_cur + slope_new);
        aux_new.f_l1linf += dt * 0.5 * (f_linf_cur + f_linf_new);

        emit_frames_up_to(cur, aux, cand, aux_new);

        const auto [dmin, umax] = record_aggregates(cand, slope_new);
        traj.step_log.push_back({cand.time, dt, dmin, umax});
        RunAggregates& ag = traj.aggregates;
        ag.max_dt_accepted = std::max(ag.max_dt_accepted, dt);
        ag.min_dt_accepted = std::min(ag.min_dt_accepted, dt);
        ++ag.steps_accepted;

        cur = std::move(cand);
        aux = aux_new;
        slope_cur = slope_new;
        f_l1_cur = f_l1_new;
        f_linf_cur = f_linf_new;

        if (++consecutive_accepts >= 5) {
            dt_next = std::min(2.0 * dt_next, ic.dt_init);
            consecutive_accepts = 0;
        }
    }

    // Terminal frame (and any outputs in the final step window).
    emit_frames_up_to(cur, aux, cur, aux);
    return traj;
}

}  // namespace lub1d
