#pragma once

// Clustered initial data: particles in exact contact move rigidly and obey the
// merged balance of forces. Clusters exist only at t=0 and are neither created
// nor destroyed (lubrication prevents new contacts); the integrator works in
// reduced coordinates (one position and one velocity per cluster), so
// within-cluster gaps are zero by construction, not by arithmetic luck.
//
// A cluster with m particles carries mass 2 m eps (each particle contributes
// (2 eps)^3 before the common (2 eps)^2 normalization) and averages the
// external force over its whole footprint. With all-singleton partitions the
// reduced system is the plain microscopic one, operation for operation.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "lub1d/integrator.hpp"
#include "lub1d/micro_dynamics.hpp"
#include "lub1d/state.hpp"
#include "lub1d/tridiag.hpp"

namespace lub1d {

struct ClusterPartition {
    std::vector<int> heads;  // first particle index of each cluster, ascending
    std::vector<int> sizes;  // particle count of each cluster
    bool fully_congested = false;  // single cluster spanning both pinned ends

    int count() const { return static_cast<int>(heads.size()); }
    bool all_singletons() const {
        return std::all_of(sizes.begin(), sizes.end(), [](int s) { return s == 1; });
    }
};

// Groups consecutive particles whose gap is <= tol (exact-contact bookkeeping).
inline ClusterPartition detect_clusters(const MicroState& s, double tol = 1e-12) {
    ClusterPartition p;
    p.heads.push_back(0);
    p.sizes.push_back(1);
    for (int k = 0; k < s.n_gaps(); ++k) {
        const double d = s.gap(k);
        if (d < -tol) throw StateError("negative gap at index " + std::to_string(k));
        if (d <= tol) {
            ++p.sizes.back();
        } else {
            p.heads.push_back(k + 1);
            p.sizes.push_back(1);
        }
    }
    p.fully_congested = (p.count() == 1);
    return p;
}

namespace detail {

inline double simpson_mean(const ForceField& f, double t, double a, double b) {
    if (f.is_zero()) return 0.0;
    if (f.kind() == ForceField::Kind::Constant) return f.constant_value();
    constexpr int panels = 8;
    const double h = (b - a) / panels;
    double acc = f(t, a) + f(t, b);
    for (int j = 1; j < panels; ++j) acc += (j % 2 ? 4.0 : 2.0) * f(t, a + j * h);
    return acc * h / 3.0 / (b - a);
}

// Reduced coordinates: one (position, velocity) pair per cluster head.
struct ClusterState {
    double time = 0.0;
    double eps = 0.0;
    std::vector<int> heads, sizes;
    std::vector<double> q;      // head particle position per cluster
    std::vector<double> v;      // shared velocity per cluster (ends pinned 0)
    std::vector<double> dstar;  // critical distance per inter-cluster gap

    int count() const { return static_cast<int>(heads.size()); }
    // Gap between clusters j-1 and j (j = 1..count-1); the last particle of
    // cluster j-1 sits 2 eps (sizes-1) right of its head.
    double cgap(int j) const {
        const double tail = q[j - 1] + 2.0 * eps * (sizes[j - 1] - 1);
        return q[j] - tail - 2.0 * eps;
    }
    double footprint_lo(int j) const { return q[j] - eps; }
    double footprint_hi(int j) const { return q[j] + 2.0 * eps * (sizes[j] - 1) + eps; }
};

inline ClusterState reduce(const MicroState& s, const ClusterPartition& p) {
    ClusterState c;
    c.time = s.time;
    c.eps = s.eps;
    c.heads = p.heads;
    c.sizes = p.sizes;
    c.q.resize(p.count());
    c.v.resize(p.count());
    for (int j = 0; j < p.count(); ++j) {
        c.q[j] = s.q[p.heads[j]];
        c.v[j] = s.u[p.heads[j]];
    }
    c.dstar.resize(p.count() > 1 ? p.count() - 1 : 0);
    for (int j = 1; j < p.count(); ++j) c.dstar[j - 1] = s.dstar[p.heads[j] - 1];
    // Boundary clusters contain a pinned particle, so they move with velocity 0.
    c.v.front() = 0.0;
    c.v.back() = 0.0;
    return c;
}

inline MicroState materialize(const ClusterState& c, const MicroState& like) {
    MicroState s = like;
    s.time = c.time;
    const int m = c.count();
    for (int j = 0; j < m; ++j)
        for (int mi = 0; mi < c.sizes[j]; ++mi) {
            const int i = c.heads[j] + mi;
            s.q[i] = c.q[j] + 2.0 * c.eps * mi;
            s.u[i] = c.v[j];
        }
    // Pinned ends stay exact; the boundary clusters never move, so anchor the
    // last one at q_N = 1 and the first at q_0 = 0.
    s.q.front() = 0.0;
    for (int mi = 0; mi < c.sizes[m - 1]; ++mi)
        s.q[c.heads[m - 1] + mi] = 1.0 - 2.0 * c.eps * (c.sizes[m - 1] - 1 - mi);
    s.u.front() = 0.0;
    s.u.back() = 0.0;
    return s;
}

inline std::vector<double> cluster_repulsion(const ClusterState& c, const SimConfig& cfg) {
    const int m = c.count();
    std::vector<double> g(m > 1 ? m - 1 : 0, 0.0);
    if (!cfg.pressure) return g;
    const double w = 2.0 * c.eps;
    for (int j = 1; j < m; ++j)
        g[j - 1] = std::pow((c.dstar[j - 1] + w) / (c.cgap(j) + w), cfg.gamma);
    return g;
}

// Semi-implicit step in reduced coordinates, same scheme as the plain
// integrator; with all singletons the assembled system is identical.
inline ClusterState cluster_step_candidate(const ClusterState& c, const SimConfig& cfg,
                                           double dt) {
    const int m = c.count();
    const int n = m - 2;  // interior clusters
    ClusterState out = c;
    out.time = c.time + dt;
    if (n <= 0) return out;

    const std::vector<double> g = cluster_repulsion(c, cfg);
    SymTridiag a;
    a.diag.resize(n);
    a.off.resize(n > 1 ? n - 1 : 0);
    std::vector<double> rhs(n);
    for (int r = 0; r < n; ++r) {
        const int j = r + 1;
        const double mass = 2.0 * c.eps * c.sizes[j];
        const double shift = mass / dt;
        a.diag[r] = cfg.mu * (1.0 / c.cgap(j) + 1.0 / c.cgap(j + 1)) + shift;
        if (r + 1 < n) a.off[r] = -cfg.mu / c.cgap(j + 1);
        const double fbar =
            simpson_mean(cfg.force, c.time, c.footprint_lo(j), c.footprint_hi(j));
        rhs[r] = shift * c.v[j] + (g[j - 1] - g[j]) + mass * fbar;
    }
    const std::vector<double> vi = solve_sym_tridiag(a, std::move(rhs));
    for (int r = 0; r < n; ++r) {
        out.v[r + 1] = vi[r];
        out.q[r + 1] = c.q[r + 1] + dt * vi[r];
    }
    return out;
}

}  // namespace detail

// Per-interior-cluster acceleration of the merged balance of forces.
inline std::vector<double> cluster_rhs(const MicroState& s, const ClusterPartition& p,
                                       const SimConfig& cfg, double t) {
    detail::ClusterState c = detail::reduce(s, p);
    c.time = t;
    const int m = c.count();
    std::vector<double> acc(m > 2 ? m - 2 : 0, 0.0);
    const std::vector<double> g = detail::cluster_repulsion(c, cfg);
    for (int j = 1; j + 1 < m; ++j) {
        const double mass = 2.0 * c.eps * c.sizes[j];
        const double lub = cfg.mu * ((c.v[j + 1] - c.v[j]) / c.cgap(j + 1) -
                                     (c.v[j] - c.v[j - 1]) / c.cgap(j));
        const double fbar =
            detail::simpson_mean(cfg.force, t, c.footprint_lo(j), c.footprint_hi(j));
        acc[j - 1] = (lub + (g[j - 1] - g[j])) / mass + fbar;
    }
    return acc;
}

// Adaptive advance of the reduced system; same dt control as the plain
// integrator. Frames are materialized back to full particle states.
inline Trajectory advance_clustered(const MicroState& initial, const SimConfig& cfg,
                                    const InitReport& report = {},
                                    double contact_tol = 1e-12) {
    const ClusterPartition part = detect_clusters(initial, contact_tol);
    detail::ClusterState cur = detail::reduce(initial, part);
    cur.time = 0.0;
    const double T = cfg.horizon;
    const IntegratorControls& ic = cfg.integrator;

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
    traj.cluster_heads = part.heads;
    traj.cluster_sizes = part.sizes;

    const int m = cur.count();
    FrameAux aux{};
    auto slope_of = [&](const detail::ClusterState& c) {
        const std::vector<double> g = detail::cluster_repulsion(c, cfg);
        double s = 0.0;
        for (std::size_t k = 0; k + 1 < g.size(); ++k)
            s = std::max(s, std::abs(g[k + 1] - g[k]) / (2.0 * c.eps));
        return s;
    };
    double slope_cur = slope_of(cur);
    double f_l1_cur = cfg.force.l1_norm_at(0.0);
    double f_linf_cur = cfg.force.linf_norm_at(0.0);

    auto record_aggregates = [&](const detail::ClusterState& c, double slope) {
        RunAggregates& ag = traj.aggregates;
        double dmin = c.cgap(1), dmax = c.cgap(1), inc = 0.0, vmax = 0.0;
        for (int j = 1; j < c.count(); ++j) {
            dmin = std::min(dmin, c.cgap(j));
            dmax = std::max(dmax, c.cgap(j));
            if (j > 1) inc = std::max(inc, std::abs(c.cgap(j) - c.cgap(j - 1)));
        }
        for (double v : c.v) vmax = std::max(vmax, std::abs(v));
        ag.min_gap_over_eps = std::min(ag.min_gap_over_eps, dmin / c.eps);
        ag.max_gap_over_eps = std::max(ag.max_gap_over_eps, dmax / c.eps);
        ag.max_increment = std::max(ag.max_increment, inc);
        ag.max_abs_velocity = std::max(ag.max_abs_velocity, vmax);
        ag.max_abs_dxg = std::max(ag.max_abs_dxg, slope);
        return std::pair{dmin, vmax};
    };

    if (m < 2) throw SolverAbort("fully congested initial data: no free gaps");
    traj.aggregates.min_gap_over_eps = cur.cgap(1) / cur.eps;
    traj.aggregates.min_dt_accepted = ic.dt_init;
    record_aggregates(cur, slope_cur);

    std::size_t next_out = 0;
    auto emit_frames_up_to = [&](const detail::ClusterState& a, const FrameAux& aux_a,
                                 const detail::ClusterState& b, const FrameAux& aux_b) {
        while (next_out < out_times.size() && out_times[next_out] <= b.time + 1e-14) {
            const double ot = out_times[next_out];
            const double th =
                std::clamp((ot - a.time) / std::max(b.time - a.time, 1e-300), 0.0, 1.0);
            detail::ClusterState mid = a;
            mid.time = ot;
            for (int j = 0; j < a.count(); ++j) {
                mid.q[j] = a.q[j] + th * (b.q[j] - a.q[j]);
                mid.v[j] = a.v[j] + th * (b.v[j] - a.v[j]);
            }
            traj.frames.push_back(detail::materialize(mid, initial));
            FrameAux fx;
            fx.dissipation = aux_a.dissipation + th * (aux_b.dissipation - aux_a.dissipation);
            fx.f_l2l1 = aux_a.f_l2l1 + th * (aux_b.f_l2l1 - aux_a.f_l2l1);
            fx.dxg_l1linf = aux_a.dxg_l1linf + th * (aux_b.dxg_l1linf - aux_a.dxg_l1linf);
            fx.f_l1linf = aux_a.f_l1linf + th * (aux_b.f_l1linf - aux_a.f_l1linf);
            traj.frame_aux.push_back(fx);
            ++next_out;
        }
    };
    emit_frames_up_to(cur, aux, cur, aux);

    double dt_next = ic.dt_init;
    int consecutive_accepts = 0;
    while (T - cur.time > 1e-14 * std::max(T, 1.0)) {
        const double dt = std::min(dt_next, T - cur.time);
        detail::ClusterState cand = detail::cluster_step_candidate(cur, cfg, dt);

        int bad_gap = -1;
        for (int j = 1; j < m; ++j) {
            const double d_new = cand.cgap(j);
            if (!(d_new > 0.0) || d_new < ic.gap_floor_frac * cur.cgap(j)) {
                bad_gap = j;
                break;
            }
        }
        double du_max = 0.0, v_max = 0.0;
        for (int j = 0; j < m; ++j) {
            du_max = std::max(du_max, std::abs(cand.v[j] - cur.v[j]));
            v_max = std::max(v_max, std::abs(cur.v[j]));
        }
        if (bad_gap >= 0 || du_max > ic.cfl_safety * (v_max + 1.0)) {
            ++traj.aggregates.steps_rejected;
            consecutive_accepts = 0;
            dt_next *= 0.5;
            if (dt_next < ic.dt_min)
                throw SolverAbort("dt underflow below dt_min at t=" +
                                  std::to_string(cur.time) +
                                  (bad_gap >= 0 ? ", cluster gap " + std::to_string(bad_gap)
                                                : ", velocity change"));
            continue;
        }

        FrameAux aux_new = aux;
        {
            double diss = 0.0;
            for (int j = 1; j < m; ++j) {
                const double d_mid = 0.5 * (cur.cgap(j) + cand.cgap(j));
                const double du_mid =
                    0.5 * ((cur.v[j] - cur.v[j - 1]) + (cand.v[j] - cand.v[j - 1]));
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
        const auto [dmin, vmax] = record_aggregates(cand, slope_new);
        traj.step_log.push_back({cand.time, dt, dmin, vmax});
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
    emit_frames_up_to(cur, aux, cur, aux);
    return traj;
}

}  // namespace lub1d
