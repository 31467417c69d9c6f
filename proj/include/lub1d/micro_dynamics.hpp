#pragma once

// Force assembly and the right-hand side of the microscopic ODE.
//
// Interior particle i = 1..N-1 obeys
//   2 eps qdd_i = mu (w_{k+1} - w_k) + (G_k - G_{k+1}) + 2 eps fbar_i,
// with k = i-1 the gap left of particle i, w_k = (u[k+1]-u[k])/d_k the shear
// rate across gap k, and G_k the normalized repulsion across gap k.

#include <cmath>
#include <vector>

#include "lub1d/state.hpp"
#include "lub1d/tridiag.hpp"

namespace lub1d {

// Edge-to-edge distances, length N. Throws with the offending index when a
// gap is non-positive (contact breach).
inline std::vector<double> gaps(const MicroState& s) {
    std::vector<double> d(s.n_gaps());
    for (int k = 0; k < s.n_gaps(); ++k) {
        d[k] = s.gap(k);
        if (!(d[k] > 0.0)) throw StateError("non-positive gap at index " + std::to_string(k));
    }
    return d;
}

// Normalized repulsion G_k = ((dstar_k + 2eps)/(d_k + 2eps))^gamma, length N.
// G_k = 1 exactly at d_k = dstar_k; overlap of the rough layers (d < dstar)
// only makes the force larger, it is never singular.
inline std::vector<double> repulsion(const MicroState& s, double gamma) {
    std::vector<double> g(s.n_gaps());
    const double w = 2.0 * s.eps;
    for (int k = 0; k < s.n_gaps(); ++k)
        g[k] = std::pow((s.dstar[k] + w) / (s.gap(k) + w), gamma);
    return g;
}

// Tridiagonal lubrication stiffness matrix acting on interior velocities:
// row r (particle r+1) has diagonal mu (1/d_r + 1/d_{r+1}) and couples to its
// neighbours with -mu/d_{r+1}. Symmetric, weakly diagonally dominant, PSD.
inline SymTridiag lubrication_matrix(const MicroState& s, double mu) {
    const int n = s.n_particles() - 1;  // interior count
    const std::vector<double> d = gaps(s);
    SymTridiag a;
    a.diag.resize(n);
    a.off.resize(n > 0 ? n - 1 : 0);
    for (int r = 0; r < n; ++r) {
        a.diag[r] = mu * (1.0 / d[r] + 1.0 / d[r + 1]);
        if (r + 1 < n) a.off[r] = -mu / d[r + 1];
    }
    return a;
}

// Particle-averaged external force fbar_i = (1/2eps) int_{q_i-eps}^{q_i+eps} f,
// for interior particles (length N-1). Composite Simpson, 8 panels per
// particle: exact for constant/affine f, O(h^4) for smooth presets.
inline std::vector<double> external_average(const ForceField& f, const MicroState& s,
                                            double t) {
    const int n = s.n_particles() - 1;
    std::vector<double> fbar(n, 0.0);
    if (f.is_zero()) return fbar;
    if (f.kind() == ForceField::Kind::Constant) {
        for (int r = 0; r < n; ++r) fbar[r] = f.constant_value();
        return fbar;
    }
    constexpr int panels = 8;
    for (int r = 0; r < n; ++r) {
        const double a = s.q[r + 1] - s.eps;
        const double h = 2.0 * s.eps / panels;
        double acc = f(t, a) + f(t, a + 2.0 * s.eps);
        for (int j = 1; j < panels; ++j) acc += (j % 2 ? 4.0 : 2.0) * f(t, a + j * h);
        fbar[r] = acc * h / 3.0 / (2.0 * s.eps);
    }
    return fbar;
}

struct ForceAssembly {
    SymTridiag A;              // lubrication couplings (interior x interior)
    std::vector<double> G;     // repulsion per gap, length N
    std::vector<double> b;     // G_k - G_{k+1} per interior particle, length N-1
    std::vector<double> fbar;  // particle-averaged force, length N-1
};

inline ForceAssembly assemble_forces(const MicroState& s, const SimConfig& cfg, double t) {
    ForceAssembly fa;
    fa.A = lubrication_matrix(s, cfg.mu);
    fa.G = cfg.pressure ? repulsion(s, cfg.gamma)
                        : std::vector<double>(s.n_gaps(), 0.0);
    const int n = s.n_particles() - 1;
    fa.b.resize(n);
    for (int r = 0; r < n; ++r) fa.b[r] = fa.G[r] - fa.G[r + 1];
    fa.fbar = external_average(cfg.force, s, t);
    return fa;
}

// Acceleration of the interior particles: (1/2eps)(-A u + b) + fbar.
inline std::vector<double> rhs(const MicroState& s, const SimConfig& cfg, double t) {
    const ForceAssembly fa = assemble_forces(s, cfg, t);
    const int n = s.n_particles() - 1;
    std::vector<double> ui(s.u.begin() + 1, s.u.end() - 1);
    std::vector<double> au = fa.A.apply(ui);
    std::vector<double> acc(n);
    const double inv2e = 1.0 / (2.0 * s.eps);
    for (int r = 0; r < n; ++r) acc[r] = (fa.b[r] - au[r]) * inv2e + fa.fbar[r];
    return acc;
}

// Shear rates w_k = (u[k+1]-u[k])/d_k per gap, length N.
inline std::vector<double> shear_rates(const MicroState& s) {
    std::vector<double> w(s.n_gaps());
    for (int k = 0; k < s.n_gaps(); ++k) w[k] = (s.u[k + 1] - s.u[k]) / s.gap(k);
    return w;
}

// Largest slope of the continuous repulsion representation over the interior
// particle footprints: max_k |G_{k+1} - G_k| / (2 eps).
inline double max_interior_dxg(const std::vector<double>& g, double eps) {
    double m = 0.0;
    for (std::size_t k = 0; k + 1 < g.size(); ++k)
        m = std::max(m, std::abs(g[k + 1] - g[k]) / (2.0 * eps));
    return m;
}

}  // namespace lub1d
