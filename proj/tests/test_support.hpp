#pragma once

// Shared helpers for the unit tests: seeded random states and small configs.

#include <random>
#include <vector>

#include "lub1d/config.hpp"
#include "lub1d/state.hpp"

namespace testsup {

// Random contact-free state with pinned ends; gaps sum to 1 - 2 eps N exactly.
inline lub1d::MicroState random_state(int n, std::mt19937& rng, double eps_scale = 0.25) {
    lub1d::MicroState s;
    s.eps = eps_scale / n;
    std::uniform_real_distribution<double> gap_raw(0.4, 1.6);
    std::uniform_real_distribution<double> vel(-0.5, 0.5);
    std::vector<double> d(n);
    double sum = 0.0;
    for (double& v : d) {
        v = gap_raw(rng);
        sum += v;
    }
    const double free_len = 1.0 - 2.0 * s.eps * n;
    for (double& v : d) v *= free_len / sum;
    s.q.resize(n + 1);
    s.u.resize(n + 1, 0.0);
    s.dstar.resize(n);
    s.q[0] = 0.0;
    for (int k = 0; k < n; ++k) s.q[k + 1] = s.q[k] + 2.0 * s.eps + d[k];
    s.q[n] = 1.0;
    for (int i = 1; i < n; ++i) s.u[i] = vel(rng);
    std::uniform_real_distribution<double> ds(0.0, 2.0 * s.eps);
    for (double& v : s.dstar) v = ds(rng);
    return s;
}

inline lub1d::SimConfig plain_config(int n, double mu = 1.0, double gamma = 1.0) {
    lub1d::SimConfig cfg;
    cfg.n_particles = n;
    cfg.mu = mu;
    cfg.gamma = gamma;
    cfg.horizon = 0.1;
    cfg.init.rho0 = lub1d::Profile::constant(0.7);
    cfg.init.rhostar0 = lub1d::Profile::constant(0.7);
    cfg.init.u0 = lub1d::Profile::sinusoid(0.0, 0.5, 1);
    cfg.init.delta = 0.7;
    cfg.init.rhobar = 0.7;
    return cfg;
}

}  // namespace testsup
