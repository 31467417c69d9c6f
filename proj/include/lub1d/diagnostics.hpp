#pragma once

// Runtime certificates for the a-priori estimates: a discrete energy ledger,
// distance/increment envelopes, a velocity maximum-principle band, and the
// exact conservation checks attached to every trajectory.

#include <algorithm>
#include <cmath>
#include <vector>

#include "lub1d/macro_fields.hpp"
#include "lub1d/micro_dynamics.hpp"
#include "lub1d/state.hpp"

namespace lub1d {

// First-order scheme slack per unit of accepted dt in the energy inequality.
inline constexpr double kEnergySlackPerDt = 2.0;

struct EnergyLedger {
    std::vector<double> time;
    std::vector<double> kinetic;       // eps sum u_i^2
    std::vector<double> potential;     // repulsion primitive, branch on gamma
    std::vector<double> dissipation;   // accumulated (mu/4) sum int |du|^2/d
    std::vector<double> source_budget; // (1/mu) ||f||^2_{L2L1} D_N(0)
    std::vector<double> margin;        // rhs - lhs, should stay >= -tol
    double e0 = 0.0;
    double tol = 0.0;
    bool gamma1_extension = false;  // log-primitive branch in use
    bool pass = false;
};

namespace detail {

inline double potential_energy(const MicroState& s, const SimConfig& cfg) {
    if (!cfg.pressure) return 0.0;
    const double w = 2.0 * s.eps;
    double acc = 0.0;
    if (cfg.gamma == 1.0) {
        // Primitive of the gamma=1 force: (d*+2eps) log((d*+2eps)/(d+2eps)).
        for (int k = 0; k < s.n_gaps(); ++k) {
            const double a = s.dstar[k] + w;
            acc += a * std::log(a / (s.gap(k) + w));
        }
    } else {
        for (int k = 0; k < s.n_gaps(); ++k) {
            const double g = std::pow((s.dstar[k] + w) / (s.gap(k) + w), cfg.gamma);
            acc += (s.gap(k) + w) * g / (cfg.gamma - 1.0);
        }
    }
    return acc;
}

inline double kinetic_energy(const MicroState& s) {
    double acc = 0.0;
    for (double v : s.u) acc += v * v;
    return s.eps * acc;
}

inline double gap_sum(const MicroState& s) {
    double acc = 0.0;
    for (int k = 0; k < s.n_gaps(); ++k) acc += s.gap(k);
    return acc;
}

}  // namespace detail

// Verifies kinetic + potential + dissipation <= E0 + source budget + tol at
// every frame; tol = 1e-8 |E0| + first-order dt slack.
inline EnergyLedger energy_check(const Trajectory& traj, const SimConfig& cfg) {
    EnergyLedger led;
    led.gamma1_extension = (cfg.gamma == 1.0) && cfg.pressure;
    const double dn0 = detail::gap_sum(traj.frames.front());
    led.e0 = detail::kinetic_energy(traj.frames.front()) +
             detail::potential_energy(traj.frames.front(), cfg);
    led.tol = 1e-8 * std::abs(led.e0) + kEnergySlackPerDt * traj.aggregates.max_dt_accepted;
    led.pass = true;
    for (std::size_t f = 0; f < traj.frames.size(); ++f) {
        const MicroState& s = traj.frames[f];
        const double kin = detail::kinetic_energy(s);
        const double pot = detail::potential_energy(s, cfg);
        const double dis = traj.frame_aux[f].dissipation;
        const double bud = traj.frame_aux[f].f_l2l1 * dn0 / cfg.mu;
        const double margin = led.e0 + bud - (kin + pot + dis);
        led.time.push_back(s.time);
        led.kinetic.push_back(kin);
        led.potential.push_back(pot);
        led.dissipation.push_back(dis);
        led.source_budget.push_back(bud);
        led.margin.push_back(margin);
        if (margin < -led.tol) led.pass = false;
    }
    return led;
}

struct EstimateReport {
    double min_gap_over_eps = 0.0;       // empirical c1
    double max_gap_over_eps = 0.0;       // empirical C2
    double max_increment_over_eps2 = 0.0;
    double max_abs_velocity = 0.0;
    double max_abs_dxg = 0.0;
    double tv_rho_max = 0.0;
    double tv_rhostar_max = 0.0;
};

inline EstimateReport distance_certificate(const Trajectory& traj) {
    EstimateReport r;
    const double eps = traj.frames.front().eps;
    r.min_gap_over_eps = traj.aggregates.min_gap_over_eps;
    r.max_gap_over_eps = traj.aggregates.max_gap_over_eps;
    r.max_increment_over_eps2 = traj.aggregates.max_increment / (eps * eps);
    r.max_abs_velocity = traj.aggregates.max_abs_velocity;
    r.max_abs_dxg = traj.aggregates.max_abs_dxg;
    for (const MicroState& s : traj.frames) {
        r.tv_rho_max = std::max(r.tv_rho_max, density_field(s).total_variation());
        r.tv_rhostar_max =
            std::max(r.tv_rhostar_max, critical_density_field(s).total_variation());
    }
    return r;
}

struct VelocityCertificate {
    double max_abs_velocity = 0.0;
    double bound_b = 0.0;  // int ||dx G||_inf + int ||f||_inf over the run
    double slack = 0.0;
    bool pass = false;
};

// Maximum principle: every u_i(t) within [min u(0) - B(t), max u(0) + B(t)].
inline VelocityCertificate velocity_certificate(const Trajectory& traj) {
    VelocityCertificate vc;
    const MicroState& s0 = traj.frames.front();
    double lo0 = 0.0, hi0 = 0.0;
    for (double v : s0.u) {
        lo0 = std::min(lo0, v);
        hi0 = std::max(hi0, v);
    }
    const FrameAux& last = traj.frame_aux.back();
    vc.bound_b = last.dxg_l1linf + last.f_l1linf;
    vc.slack = 1e-9 * (1.0 + std::max(std::abs(lo0), hi0) + vc.bound_b);
    vc.pass = true;
    for (std::size_t f = 0; f < traj.frames.size(); ++f) {
        const double b = traj.frame_aux[f].dxg_l1linf + traj.frame_aux[f].f_l1linf;
        for (double v : traj.frames[f].u) {
            vc.max_abs_velocity = std::max(vc.max_abs_velocity, std::abs(v));
            if (v < lo0 - b - vc.slack || v > hi0 + b + vc.slack) vc.pass = false;
        }
    }
    return vc;
}

struct InvariantReport {
    double gap_sum_drift = 0.0;     // max |sum d_k (t) - sum d_k (0)|
    double mass_drift = 0.0;        // max |int rho^eps - 2 eps N|
    bool rhostar_multiset_ok = true;
    bool dissipation_monotone = true;
    bool pass = false;
};

inline InvariantReport invariant_check(const Trajectory& traj) {
    InvariantReport ir;
    const MicroState& s0 = traj.frames.front();
    const double dn0 = detail::gap_sum(s0);
    const double m0 = 2.0 * s0.eps * s0.n_particles();
    double prev_diss = 0.0;
    for (std::size_t f = 0; f < traj.frames.size(); ++f) {
        const MicroState& s = traj.frames[f];
        ir.gap_sum_drift = std::max(ir.gap_sum_drift, std::abs(detail::gap_sum(s) - dn0));
        ir.mass_drift = std::max(ir.mass_drift, std::abs(density_field(s).integral() - m0));
        if (s.dstar != s0.dstar) ir.rhostar_multiset_ok = false;
        if (traj.frame_aux[f].dissipation < prev_diss - 1e-15)
            ir.dissipation_monotone = false;
        prev_diss = traj.frame_aux[f].dissipation;
    }
    ir.pass = ir.gap_sum_drift <= 1e-12 && ir.mass_drift <= 1e-10 &&
              ir.rhostar_multiset_ok && ir.dissipation_monotone;
    return ir;
}

struct Certificates {
    EnergyLedger energy;
    EstimateReport distances;
    VelocityCertificate velocity;
    InvariantReport invariants;
    bool all_pass = false;
};

// Worst energy margin after the initial frame (the t=0 margin is identically
// zero by construction and carries no information).
inline double worst_energy_margin(const EnergyLedger& led) {
    if (led.margin.size() < 2) return 0.0;
    double worst = led.margin[1];
    for (std::size_t f = 2; f < led.margin.size(); ++f) worst = std::min(worst, led.margin[f]);
    return worst;
}

inline Certificates certify(const Trajectory& traj, const SimConfig& cfg) {
    Certificates c;
    c.energy = energy_check(traj, cfg);
    c.distances = distance_certificate(traj);
    c.velocity = velocity_certificate(traj);
    c.invariants = invariant_check(traj);
    c.all_pass = c.energy.pass && c.velocity.pass && c.invariants.pass &&
                 c.distances.min_gap_over_eps > 0.0;
    return c;
}

}  // namespace lub1d
