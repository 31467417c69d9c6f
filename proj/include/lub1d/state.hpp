#pragma once

// Microscopic state and trajectory containers.
//
// Index conventions (0-based throughout):
//   particles  i = 0..N,   q[i], u[i]; q[0]=0, q[N]=1, u[0]=u[N]=0 pinned.
//   gaps       k = 0..N-1, between particles k and k+1: d_k = q[k+1]-q[k]-2*eps.
//   dstar[k] is the critical distance of pair (k, k+1), frozen in time.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "lub1d/config.hpp"

namespace lub1d {

struct MicroState {
    double time = 0.0;
    double eps = 0.0;                // particle radius
    std::vector<double> q;           // N+1 positions
    std::vector<double> u;           // N+1 velocities
    std::vector<double> dstar;       // N critical distances

    int n_gaps() const { return static_cast<int>(dstar.size()); }
    int n_particles() const { return static_cast<int>(q.size()) - 1; }  // N

    double gap(int k) const { return q[k + 1] - q[k] - 2.0 * eps; }
};

struct StateError : std::runtime_error {
    explicit StateError(const std::string& what) : std::runtime_error(what) {}
};

// Invariant checker for contact-free states. Cluster-mode states (gaps exactly
// zero inside clusters) are validated at the cluster level instead.
inline const MicroState& validate_state(const MicroState& s) {
    const std::size_t n = s.q.size();
    if (n < 3 || s.u.size() != n || s.dstar.size() + 1 != n)
        throw StateError("state arrays inconsistent");
    if (s.q.front() != 0.0 || s.q.back() != 1.0) throw StateError("endpoints not pinned");
    if (s.u.front() != 0.0 || s.u.back() != 0.0) throw StateError("boundary velocity not zero");
    if (!(s.eps > 0.0)) throw StateError("eps <= 0");
    double gap_sum = 0.0;
    for (int k = 0; k < s.n_gaps(); ++k) {
        const double d = s.gap(k);
        if (!(d > 0.0)) throw StateError("non-positive gap at index " + std::to_string(k));
        if (s.dstar[k] < 0.0) throw StateError("negative dstar at index " + std::to_string(k));
        gap_sum += d;
    }
    // Fixed endpoints: sum of gaps + 2*eps*N telescopes to 1.
    if (std::abs(gap_sum + 2.0 * s.eps * s.n_particles() - 1.0) > 1e-12)
        throw StateError("gap sum inconsistent with pinned endpoints");
    return s;
}

// Certified bounds of the constructed initial data.
struct InitReport {
    double eps = 0.0;
    double c0 = 0.0;             // min_k d_k / eps
    double C0 = 0.0;             // max over d_k/eps and dstar_k/eps
    double max_inc_d = 0.0;      // max_k |d_{k+1} - d_k|
    double max_inc_dstar = 0.0;  // max_k |dstar_{k+1} - dstar_k|
};

struct StepRecord {
    double t = 0.0;
    double dt = 0.0;
    double min_gap = 0.0;
    double max_abs_u = 0.0;
};

// Cumulative integrals carried along the run, sampled at each frame time.
struct FrameAux {
    double dissipation = 0.0;   // (mu/4) sum_k int |u_{k+1}-u_k|^2 / d_k dtau
    double f_l2l1 = 0.0;        // int_0^t ||f(s,.)||_{L1}^2 ds
    double dxg_l1linf = 0.0;    // int_0^t max interior |G_{k+1}-G_k|/(2 eps) ds
    double f_l1linf = 0.0;      // int_0^t ||f(s,.)||_inf ds
};

struct RunAggregates {
    double min_gap_over_eps = 0.0;
    double max_gap_over_eps = 0.0;
    double max_increment = 0.0;  // max over accepted states of max_k |d_{k+1}-d_k|
    double max_abs_velocity = 0.0;
    double max_abs_dxg = 0.0;    // max interior |G_{k+1}-G_k|/(2 eps)
    double max_dt_accepted = 0.0;
    double min_dt_accepted = 0.0;
    long steps_accepted = 0;
    long steps_rejected = 0;
};

struct Trajectory {
    SimConfig config;
    InitReport init_report;
    std::vector<MicroState> frames;   // at requested output times; first 0, last T
    std::vector<FrameAux> frame_aux;  // aligned with frames
    std::vector<StepRecord> step_log;
    RunAggregates aggregates;
    // Cluster bookkeeping (empty for plain runs): first particle index and
    // particle count of each cluster, in order.
    std::vector<int> cluster_heads;
    std::vector<int> cluster_sizes;
};

struct SolverAbort : std::runtime_error {
    explicit SolverAbort(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lub1d
