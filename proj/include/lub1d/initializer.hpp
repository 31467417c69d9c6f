#pragma once

// Well-prepared discrete initial data from macroscopic profiles.
//
// Construction: eps = M0/(2N) with M0 = int rho0; positions chosen so every
// cell (q_{k}, q_{k+1}) carries mass exactly 2*eps; critical distances chosen
// so the cellwise critical density equals the cell mean of rhostar0; initial
// velocities sampled at the particle positions.

#include <cmath>
#include <utility>
#include <vector>

#include "lub1d/config.hpp"
#include "lub1d/state.hpp"

namespace lub1d {

namespace detail {

// Solve profile.cdf(x) = target on [lo, hi] by bisection, run to the point
// where the interval no longer contains a representable midpoint. The cell
// bounds c0 >= 2(1/rhobar - 1) - 1e-12 are certified at equality for constant
// profiles, which needs position errors at the few-ulp level.
inline double invert_cdf(const Profile& p, double target, double lo, double hi) {
    double flo = p.cdf(lo) - target;
    if (flo > 0.0) {
        if (flo < 1e-12) return lo;
        throw StateError("mass level not bracketed: invalid profile");
    }
    double fhi = p.cdf(hi) - target;
    if (fhi < 0.0) {
        if (fhi > -1e-12) return hi;
        throw StateError("mass level not bracketed: invalid profile");
    }
    while (true) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (p.cdf(mid) - target < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

}  // namespace detail

// Positions q0 (length N+1) with q0[0]=0, q0[N]=1 and equal cell masses 2*eps.
inline std::vector<double> partition_positions(const Profile& rho0, int n_particles) {
    const int n = n_particles;
    const double m0 = rho0.integral(0.0, 1.0);
    const double eps = m0 / (2.0 * n);
    if (!(2.0 * eps < m0)) throw StateError("n_particles too small for the total mass");
    std::vector<double> q(n + 1);
    q[0] = 0.0;
    for (int i = 1; i < n; ++i)
        q[i] = detail::invert_cdf(rho0, 2.0 * eps * i, q[i - 1], 1.0);
    q[n] = 1.0;
    for (int i = 0; i < n; ++i)
        if (!(q[i + 1] - q[i] > 2.0 * eps))
            throw StateError("negative gap: rho0 exceeds 1 on cell " + std::to_string(i));
    return q;
}

// Critical distances per gap: dstar_k = 2*eps*(1/m_k - 1) with m_k the mean of
// rhostar0 over cell k. Tiny negative values from roundoff at rhostar0 = 1 are
// clamped to the exact contact threshold 0.
inline std::vector<double> assign_critical_distances(const Profile& rhostar0,
                                                     const std::vector<double>& q0,
                                                     double eps) {
    const int n = static_cast<int>(q0.size()) - 1;
    std::vector<double> dstar(n);
    for (int k = 0; k < n; ++k) {
        const double mean = rhostar0.integral(q0[k], q0[k + 1]) / (q0[k + 1] - q0[k]);
        if (!(mean > 0.0) || mean > 1.0 + 1e-12)
            throw StateError("rhostar0 cell mean outside (0,1]");
        double d = 2.0 * eps * (1.0 / mean - 1.0);
        if (d < 0.0) {
            if (d < -1e-12) throw StateError("rhostar0 cell mean outside (0,1]");
            d = 0.0;
        }
        dstar[k] = d;
    }
    return dstar;
}

// Initial velocities u0_vec[i] = u0(q0[i]) with pinned zero ends.
inline std::vector<double> sample_velocities(const Profile& u0, const std::vector<double>& q0) {
    std::vector<double> u(q0.size());
    for (std::size_t i = 1; i + 1 < q0.size(); ++i) u[i] = u0(q0[i]);
    u.front() = 0.0;
    u.back() = 0.0;
    return u;
}

inline InitReport measure_init_report(const MicroState& s) {
    InitReport r;
    r.eps = s.eps;
    double dmin = s.gap(0), dmax = s.gap(0), dstarmax = 0.0;
    for (int k = 0; k < s.n_gaps(); ++k) {
        dmin = std::min(dmin, s.gap(k));
        dmax = std::max(dmax, s.gap(k));
        dstarmax = std::max(dstarmax, s.dstar[k]);
        if (k > 0) {
            r.max_inc_d = std::max(r.max_inc_d, std::abs(s.gap(k) - s.gap(k - 1)));
            r.max_inc_dstar = std::max(r.max_inc_dstar, std::abs(s.dstar[k] - s.dstar[k - 1]));
        }
    }
    r.c0 = dmin / s.eps;
    r.C0 = std::max(dmax, dstarmax) / s.eps;
    return r;
}

inline std::pair<MicroState, InitReport> build_initial_state(const SimConfig& cfg) {
    MicroState s;
    s.time = 0.0;
    s.q = partition_positions(cfg.init.rho0, cfg.n_particles);
    s.eps = cfg.init.rho0.integral(0.0, 1.0) / (2.0 * cfg.n_particles);
    s.dstar = assign_critical_distances(cfg.init.rhostar0, s.q, s.eps);
    s.u = sample_velocities(cfg.init.u0, s.q);
    validate_state(s);
    return {s, measure_init_report(s)};
}

}  // namespace lub1d
