#pragma once

// Macroscopic representation fields reconstructed from a particle state.
//
// Every field is exposed as an exact piecewise description (breakpoints plus
// values); total variation and integrals always use the exact description,
// since grid sampling aliases the jumps. Cell convention is half-open
// [q_k, q_{k+1}) matching the indicator in the density definition.
//
// Footprints: P_i = [q_i - eps, q_i + eps] for interior particles,
// P_0 = [0, eps], P_N = [1 - eps, 1].

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "lub1d/config.hpp"
#include "lub1d/micro_dynamics.hpp"
#include "lub1d/state.hpp"

namespace lub1d {

struct PiecewiseConstant {
    std::vector<double> breaks;  // n+1, strictly increasing
    std::vector<double> values;  // n

    // Right-continuous at interior breakpoints; the last cell is closed at 1.
    double operator()(double x) const {
        const auto it = std::upper_bound(breaks.begin(), breaks.end(), x);
        std::ptrdiff_t j = (it - breaks.begin()) - 1;
        j = std::clamp<std::ptrdiff_t>(j, 0, static_cast<std::ptrdiff_t>(values.size()) - 1);
        return values[static_cast<std::size_t>(j)];
    }

    double integral() const {
        double acc = 0.0;
        for (std::size_t j = 0; j < values.size(); ++j)
            acc += values[j] * (breaks[j + 1] - breaks[j]);
        return acc;
    }

    double total_variation() const {
        double tv = 0.0;
        for (std::size_t j = 1; j < values.size(); ++j) tv += std::abs(values[j] - values[j - 1]);
        return tv;
    }
};

struct PiecewiseLinear {
    std::vector<double> x;  // strictly increasing
    std::vector<double> y;

    double operator()(double v) const {
        if (v <= x.front()) return y.front();
        if (v >= x.back()) return y.back();
        const auto it = std::upper_bound(x.begin(), x.end(), v);
        const std::size_t i = static_cast<std::size_t>(it - x.begin());
        const double t = (v - x[i - 1]) / (x[i] - x[i - 1]);
        return y[i - 1] + t * (y[i] - y[i - 1]);
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : y) m = std::max(m, std::abs(v));
        return m;
    }
};

// Exact sum of jumps of a piecewise-constant field given its cell values.
inline double total_variation(const std::vector<double>& cell_values) {
    double tv = 0.0;
    for (std::size_t j = 1; j < cell_values.size(); ++j)
        tv += std::abs(cell_values[j] - cell_values[j - 1]);
    return tv;
}

// rho^eps: value 2eps/(d_k + 2eps) on [q_k, q_{k+1}).
inline PiecewiseConstant density_field(const MicroState& s) {
    PiecewiseConstant pc;
    pc.breaks = s.q;
    pc.values.resize(s.n_gaps());
    for (int k = 0; k < s.n_gaps(); ++k)
        pc.values[k] = 2.0 * s.eps / (s.gap(k) + 2.0 * s.eps);
    return pc;
}

// rho*^eps: value 2eps/(dstar_k + 2eps) per cell; constant in time per index.
inline PiecewiseConstant critical_density_field(const MicroState& s) {
    PiecewiseConstant pc;
    pc.breaks = s.q;
    pc.values.resize(s.n_gaps());
    for (int k = 0; k < s.n_gaps(); ++k)
        pc.values[k] = 2.0 * s.eps / (s.dstar[k] + 2.0 * s.eps);
    return pc;
}

// u^eps: continuous piecewise-linear interpolant of (q_i, u_i), zero at both ends.
inline PiecewiseLinear velocity_field_u(const MicroState& s) {
    return PiecewiseLinear{s.q, s.u};
}

namespace detail {

// Shared footprint/gap breakpoint walk for the plateau-shaped fields. Emits
// strictly increasing breakpoints; requires positive gaps.
inline PiecewiseLinear plateau_field(const MicroState& s, const std::vector<double>& left,
                                     const std::vector<double>& right) {
    // left[i], right[i]: field values at the left/right edge of footprint P_i.
    const int n = s.n_particles();
    PiecewiseLinear pl;
    pl.x.reserve(2 * (n + 1));
    pl.y.reserve(2 * (n + 1));
    auto push = [&](double x, double y) {
        pl.x.push_back(x);
        pl.y.push_back(y);
    };
    push(0.0, left[0]);
    push(s.eps, right[0]);
    for (int i = 1; i < n; ++i) {
        push(s.q[i] - s.eps, left[i]);
        push(s.q[i] + s.eps, right[i]);
    }
    push(1.0 - s.eps, left[n]);
    push(1.0, right[n]);
    for (std::size_t j = 1; j < pl.x.size(); ++j)
        if (!(pl.x[j] > pl.x[j - 1])) throw StateError("overlapping particle footprints");
    return pl;
}

}  // namespace detail

// v^eps: equal to u_i across the whole footprint P_i, affine across each gap.
inline PiecewiseLinear velocity_field_v(const MicroState& s) {
    const int n = s.n_particles();
    std::vector<double> left(n + 1), right(n + 1);
    for (int i = 0; i <= n; ++i) left[i] = right[i] = s.u[i];
    return detail::plateau_field(s, left, right);
}

// w^eps: constant w_k = (u_{k+1}-u_k)/d_k across gap k, affine across interior
// footprints, ramps to zero over the two boundary footprints.
inline PiecewiseLinear strain_field_w(const MicroState& s) {
    const std::vector<double> w = shear_rates(s);
    const int n = s.n_particles();
    std::vector<double> left(n + 1), right(n + 1);
    left[0] = 0.0;
    right[0] = w[0];
    for (int i = 1; i < n; ++i) {
        left[i] = w[i - 1];
        right[i] = w[i];
    }
    left[n] = w[n - 1];
    right[n] = 0.0;
    return detail::plateau_field(s, left, right);
}

// G^eps: same shape as w^eps with the repulsion values.
inline PiecewiseLinear interaction_field_G(const MicroState& s, const SimConfig& cfg) {
    const std::vector<double> g = cfg.pressure ? repulsion(s, cfg.gamma)
                                               : std::vector<double>(s.n_gaps(), 0.0);
    const int n = s.n_particles();
    std::vector<double> left(n + 1), right(n + 1);
    left[0] = 0.0;
    right[0] = g[0];
    for (int i = 1; i < n; ++i) {
        left[i] = g[i - 1];
        right[i] = g[i];
    }
    left[n] = g[n - 1];
    right[n] = 0.0;
    return detail::plateau_field(s, left, right);
}

// chi^eps: indicator of the union of footprints; integral is exactly 2 eps N.
inline PiecewiseConstant volume_fraction(const MicroState& s) {
    const int n = s.n_particles();
    PiecewiseConstant pc;
    pc.breaks.push_back(0.0);
    pc.values.push_back(1.0);  // P_0
    pc.breaks.push_back(s.eps);
    for (int i = 1; i < n; ++i) {
        const double lo = s.q[i] - s.eps, hi = s.q[i] + s.eps;
        if (!(lo > pc.breaks.back())) throw StateError("overlapping particle footprints");
        pc.values.push_back(0.0);
        pc.breaks.push_back(lo);
        pc.values.push_back(1.0);
        pc.breaks.push_back(hi);
    }
    if (!(1.0 - s.eps > pc.breaks.back())) throw StateError("overlapping particle footprints");
    pc.values.push_back(0.0);
    pc.breaks.push_back(1.0 - s.eps);
    pc.values.push_back(1.0);  // P_N
    pc.breaks.push_back(1.0);
    return pc;
}

// Sampled bundle of every representation field on a user grid.
struct MacroProfile {
    double time = 0.0;
    std::vector<double> grid;
    std::vector<double> rho, rhostar, u, v, w, G, chi;
};

inline MacroProfile sample_macro_profile(const MicroState& s, const SimConfig& cfg,
                                         const std::vector<double>& grid) {
    MacroProfile mp;
    mp.time = s.time;
    mp.grid = grid;
    const PiecewiseConstant rho = density_field(s);
    const PiecewiseConstant rst = critical_density_field(s);
    const PiecewiseLinear uu = velocity_field_u(s);
    const PiecewiseLinear vv = velocity_field_v(s);
    const PiecewiseLinear ww = strain_field_w(s);
    const PiecewiseLinear gg = interaction_field_G(s, cfg);
    const PiecewiseConstant chi = volume_fraction(s);
    mp.rho.reserve(grid.size());
    for (double x : grid) {
        mp.rho.push_back(rho(x));
        mp.rhostar.push_back(rst(x));
        mp.u.push_back(uu(x));
        mp.v.push_back(vv(x));
        mp.w.push_back(ww(x));
        mp.G.push_back(gg(x));
        mp.chi.push_back(chi(x));
    }
    return mp;
}

}  // namespace lub1d
