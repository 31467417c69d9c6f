#pragma once

// Independent test oracles. Everything here is transliterated directly from
// the governing equations with its own quadrature and stepping, deliberately
// sharing no code with the implementation paths it is used to check.

#include <cmath>
#include <functional>
#include <vector>

#include "lub1d/config.hpp"
#include "lub1d/state.hpp"

namespace oracle {

// ---- microscopic right-hand side, written out longhand ----

// Acceleration of interior particle i (1..N-1):
//   qdd_i = [ mu((u_{i+1}-u_i)/d_{i+1} - (u_i-u_{i-1})/d_i)
//             + (G_i - G_{i+1}) ] / (2 eps) + fbar_i
// with paper-index gaps d_i = q_i - q_{i-1} - 2 eps and G over those gaps.
inline std::vector<double> micro_accelerations(const lub1d::MicroState& s,
                                               const lub1d::SimConfig& cfg, double t) {
    const int n = s.n_particles();
    const double eps = s.eps;
    auto d = [&](int i) { return s.q[i] - s.q[i - 1] - 2.0 * eps; };  // i = 1..N
    auto big_g = [&](int i) {
        if (!cfg.pressure) return 0.0;
        return std::pow((s.dstar[i - 1] + 2.0 * eps) / (d(i) + 2.0 * eps), cfg.gamma);
    };
    auto fbar = [&](int i) {
        if (cfg.force.is_zero()) return 0.0;
        // 64-point midpoint rule; independent of the implementation's Simpson.
        const int m = 64;
        const double h = 2.0 * eps / m;
        double acc = 0.0;
        for (int j = 0; j < m; ++j) acc += cfg.force(t, s.q[i] - eps + (j + 0.5) * h);
        return acc * h / (2.0 * eps);
    };
    std::vector<double> a(n - 1);
    for (int i = 1; i < n; ++i) {
        const double lub = cfg.mu * ((s.u[i + 1] - s.u[i]) / d(i + 1) -
                                     (s.u[i] - s.u[i - 1]) / d(i));
        a[i - 1] = (lub + (big_g(i) - big_g(i + 1))) / (2.0 * eps) + fbar(i);
    }
    return a;
}

// Classical RK4 on (q, u) for the interior particles, fixed tiny dt.
inline lub1d::MicroState rk4_advance(lub1d::MicroState s, const lub1d::SimConfig& cfg,
                                     double dt, long steps) {
    const int n = s.n_particles();
    const int m = n - 1;
    for (long step = 0; step < steps; ++step) {
        const double t = s.time;
        auto deriv = [&](const lub1d::MicroState& st, double tt,
                         std::vector<double>& dq, std::vector<double>& du) {
            const std::vector<double> acc = micro_accelerations(st, cfg, tt);
            for (int i = 0; i < m; ++i) {
                dq[i] = st.u[i + 1];
                du[i] = acc[i];
            }
        };
        auto shifted = [&](const std::vector<double>& dq, const std::vector<double>& du,
                           double h) {
            lub1d::MicroState st = s;
            st.time = t + h;
            for (int i = 0; i < m; ++i) {
                st.q[i + 1] = s.q[i + 1] + h * dq[i];
                st.u[i + 1] = s.u[i + 1] + h * du[i];
            }
            return st;
        };
        std::vector<double> k1q(m), k1u(m), k2q(m), k2u(m), k3q(m), k3u(m), k4q(m), k4u(m);
        deriv(s, t, k1q, k1u);
        deriv(shifted(k1q, k1u, dt / 2), t + dt / 2, k2q, k2u);
        deriv(shifted(k2q, k2u, dt / 2), t + dt / 2, k3q, k3u);
        deriv(shifted(k3q, k3u, dt), t + dt, k4q, k4u);
        for (int i = 0; i < m; ++i) {
            s.q[i + 1] += dt / 6.0 * (k1q[i] + 2 * k2q[i] + 2 * k3q[i] + k4q[i]);
            s.u[i + 1] += dt / 6.0 * (k1u[i] + 2 * k2u[i] + 2 * k3u[i] + k4u[i]);
        }
        s.time += dt;
    }
    return s;
}

// ---- cluster balance of forces, longhand ----

// Accelerations of the interior clusters for a given partition; mass of a
// cluster with m particles is 2 m eps, force averaged over its footprint.
inline std::vector<double> cluster_accelerations(
    const std::vector<double>& head_q, const std::vector<double>& v,
    const std::vector<int>& sizes, const std::vector<double>& dstar_between,
    double eps, const lub1d::SimConfig& cfg, double t) {
    const int m = static_cast<int>(head_q.size());
    auto tail_q = [&](int j) { return head_q[j] + 2.0 * eps * (sizes[j] - 1); };
    auto gap = [&](int j) { return head_q[j] - tail_q(j - 1) - 2.0 * eps; };  // j=1..m-1
    auto big_g = [&](int j) {
        if (!cfg.pressure) return 0.0;
        return std::pow((dstar_between[j - 1] + 2.0 * eps) / (gap(j) + 2.0 * eps), cfg.gamma);
    };
    std::vector<double> acc(m > 2 ? m - 2 : 0, 0.0);
    for (int j = 1; j + 1 < m; ++j) {
        const double mass = 2.0 * eps * sizes[j];
        const double lub = cfg.mu * ((v[j + 1] - v[j]) / gap(j + 1) -
                                     (v[j] - v[j - 1]) / gap(j));
        double fbar = 0.0;
        if (!cfg.force.is_zero()) {
            const double a = head_q[j] - eps, b = tail_q(j) + eps;
            const int mm = 64;
            const double h = (b - a) / mm;
            for (int k = 0; k < mm; ++k) fbar += cfg.force(t, a + (k + 0.5) * h);
            fbar *= h / (b - a);
        }
        acc[j - 1] = (lub + (big_g(j) - big_g(j + 1))) / mass + fbar;
    }
    return acc;
}

// RK4 for the reduced cluster system.
inline void cluster_rk4(std::vector<double>& head_q, std::vector<double>& v,
                        const std::vector<int>& sizes,
                        const std::vector<double>& dstar_between, double eps,
                        const lub1d::SimConfig& cfg, double t0, double dt, long steps) {
    const int m = static_cast<int>(head_q.size());
    const int n = m - 2;
    double t = t0;
    for (long step = 0; step < steps; ++step) {
        auto deriv = [&](const std::vector<double>& q, const std::vector<double>& vv,
                         double tt, std::vector<double>& dq, std::vector<double>& dv) {
            const std::vector<double> acc =
                cluster_accelerations(q, vv, sizes, dstar_between, eps, cfg, tt);
            for (int i = 0; i < n; ++i) {
                dq[i] = vv[i + 1];
                dv[i] = acc[i];
            }
        };
        auto shifted = [&](const std::vector<double>& dq, const std::vector<double>& dv,
                           double h, std::vector<double>& q, std::vector<double>& vv) {
            q = head_q;
            vv = v;
            for (int i = 0; i < n; ++i) {
                q[i + 1] += h * dq[i];
                vv[i + 1] += h * dv[i];
            }
        };
        std::vector<double> k1q(n), k1v(n), k2q(n), k2v(n), k3q(n), k3v(n), k4q(n), k4v(n);
        std::vector<double> tq, tv;
        deriv(head_q, v, t, k1q, k1v);
        shifted(k1q, k1v, dt / 2, tq, tv);
        deriv(tq, tv, t + dt / 2, k2q, k2v);
        shifted(k2q, k2v, dt / 2, tq, tv);
        deriv(tq, tv, t + dt / 2, k3q, k3v);
        shifted(k3q, k3v, dt, tq, tv);
        deriv(tq, tv, t + dt, k4q, k4v);
        for (int i = 0; i < n; ++i) {
            head_q[i + 1] += dt / 6.0 * (k1q[i] + 2 * k2q[i] + 2 * k3q[i] + k4q[i]);
            v[i + 1] += dt / 6.0 * (k1v[i] + 2 * k2v[i] + 2 * k3v[i] + k4v[i]);
        }
        t += dt;
    }
}

// ---- profile mass partition via dense cumulative trapezoid ----

struct TrapezoidCdf {
    std::vector<double> x, cum;

    TrapezoidCdf(const std::function<double(double)>& f, int points) {
        x.resize(points + 1);
        cum.resize(points + 1);
        cum[0] = 0.0;
        double prev = f(0.0);
        for (int i = 1; i <= points; ++i) {
            x[i] = static_cast<double>(i) / points;
            const double cur = f(x[i]);
            cum[i] = cum[i - 1] + 0.5 * (prev + cur) / points;
            prev = cur;
        }
    }

    double operator()(double v) const {
        if (v <= 0.0) return 0.0;
        if (v >= 1.0) return cum.back();
        const double pos = v * (x.size() - 1);
        const auto i = static_cast<std::size_t>(pos);
        const double t = pos - static_cast<double>(i);
        return cum[i] + t * (cum[i + 1] - cum[i]);
    }

    double invert(double target, double lo, double hi) const {
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if ((*this)(mid) < target)
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    }
};

// ---- characteristics (semi-Lagrangian) oracle for rho* transport ----

// rho*(T, x) = rho*_0(X(0)) where dX/dt = u(X), X(T) = x, integrated
// backwards with RK4 on a frozen velocity field.
inline double transport_backtrace(const std::function<double(double)>& u, double x,
                                  double horizon, int steps) {
    double pos = x;
    const double dt = horizon / steps;
    for (int i = 0; i < steps; ++i) {
        const double k1 = u(pos);
        const double k2 = u(pos - 0.5 * dt * k1);
        const double k3 = u(pos - 0.5 * dt * k2);
        const double k4 = u(pos - dt * k3);
        pos -= dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return pos;
}

// Simple log-log least-squares slope through (x_i, y_i).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle
