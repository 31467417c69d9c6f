#pragma once

// Scenario configuration and validation.

#include <stdexcept>
#include <string>
#include <vector>

#include "lub1d/profiles.hpp"

namespace lub1d {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct IntegratorControls {
    double dt_init = 5e-5;
    double dt_min = 1e-12;
    // Safety factor in (0,1]; also scales the step-rejection velocity tolerance.
    double cfl_safety = 0.5;
    // Reject a step if any gap would drop below this fraction of its pre-step value.
    double gap_floor_frac = 0.5;
    // Requested frame times; t=0 and t=T are always emitted.
    std::vector<double> output_times;

    bool operator==(const IntegratorControls&) const = default;
};

struct InitialProfiles {
    Profile rho0 = Profile::constant(0.7);
    Profile rhostar0 = Profile::constant(0.7);
    Profile u0 = Profile::constant(0.0);
    double delta = 0.7;   // lower bound for rho0 and rhostar0
    double rhobar = 0.7;  // upper bound for rho0, strictly below 1

    bool operator==(const InitialProfiles&) const = default;
};

struct SimConfig {
    int n_particles = 50;  // N; the chain has N+1 particles with pinned ends
    double mu = 1.0;
    double gamma = 1.0;
    double horizon = 0.5;  // T
    ForceField force = ForceField::zero();
    InitialProfiles init;
    IntegratorControls integrator;
    // Repulsion (the microscopic counterpart of the congestion pressure) can be
    // switched off end-to-end for the pressureless scenario.
    bool pressure = true;

    bool operator==(const SimConfig&) const = default;
};

// Returns cfg unchanged when all type invariants hold; otherwise throws
// ConfigError naming the first violated invariant.
inline SimConfig validate_config(const SimConfig& cfg) {
    if (cfg.n_particles < 2) throw ConfigError("n_particles < 2");
    if (!(cfg.mu > 0.0)) throw ConfigError("mu <= 0");
    if (!(cfg.gamma >= 1.0)) throw ConfigError("gamma < 1");
    if (!(cfg.horizon > 0.0)) throw ConfigError("horizon <= 0");

    const IntegratorControls& ic = cfg.integrator;
    if (!(ic.dt_init > 0.0)) throw ConfigError("dt_init <= 0");
    if (!(ic.dt_min > 0.0)) throw ConfigError("dt_min <= 0");
    if (ic.dt_min > ic.dt_init) throw ConfigError("dt_min > dt_init");
    if (!(ic.cfl_safety > 0.0 && ic.cfl_safety <= 1.0))
        throw ConfigError("cfl_safety not in (0,1]");
    if (!(ic.gap_floor_frac > 0.0 && ic.gap_floor_frac < 1.0))
        throw ConfigError("gap_floor_frac not in (0,1)");
    for (std::size_t i = 0; i < ic.output_times.size(); ++i) {
        const double t = ic.output_times[i];
        if (t < 0.0 || t > cfg.horizon) throw ConfigError("output_times out of range");
        if (i > 0 && t < ic.output_times[i - 1]) throw ConfigError("output_times not sorted");
    }

    const InitialProfiles& p = cfg.init;
    if (!(p.delta > 0.0 && p.delta < 1.0)) throw ConfigError("delta not in (0,1)");
    if (!(p.rhobar > 0.0 && p.rhobar < 1.0)) throw ConfigError("rhobar not in (0,1)");
    if (p.delta > p.rhobar) throw ConfigError("delta > rhobar");
    // Bound checks carry a roundoff allowance (profiles like 0.6 - 0.2 exp(..)
    // touch their declared bound only up to the last ulp).
    if (p.rho0.min_on_unit_interval() < p.delta - 1e-12) throw ConfigError("rho0 below delta");
    if (p.rho0.max_on_unit_interval() > p.rhobar + 1e-12)
        throw ConfigError("rho0 exceeds rhobar");
    if (p.rhostar0.min_on_unit_interval() < p.delta - 1e-12)
        throw ConfigError("rhostar0 below delta");
    if (p.rhostar0.max_on_unit_interval() > 1.0 + 1e-12)
        throw ConfigError("rhostar0 exceeds 1");
    // Roundoff tolerance: sin(2*pi*k) is a few ulp away from zero.
    if (std::abs(p.u0(0.0)) > 1e-12 || std::abs(p.u0(1.0)) > 1e-12)
        throw ConfigError("u0 boundary not zero");

    if (!cfg.force.covers(cfg.horizon)) throw ConfigError("force grid does not cover domain");
    return cfg;
}

}  // namespace lub1d
