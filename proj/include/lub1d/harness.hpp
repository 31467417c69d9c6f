#pragma once

// Scenario presets, N-sweeps, micro-vs-macro convergence studies, and the
// artifact layer behind the CLI. Runs are deterministic: identical options
// (including the echoed seed) produce byte-identical JSON artifacts.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "lub1d/cluster.hpp"
#include "lub1d/diagnostics.hpp"
#include "lub1d/initializer.hpp"
#include "lub1d/integrator.hpp"
#include "lub1d/json_io.hpp"
#include "lub1d/macro_fields.hpp"
#include "lub1d/macro_solver.hpp"

namespace lub1d {

// ---- exact micro-vs-macro error norms ----

inline PiecewiseConstant macro_density_cells(const PdeState& s, bool critical = false) {
    PiecewiseConstant pc;
    const int m = s.cells();
    pc.breaks.resize(m + 1);
    for (int j = 0; j <= m; ++j) pc.breaks[j] = j * s.dx;
    pc.values = critical ? s.rhostar : s.rho;
    return pc;
}

inline PiecewiseLinear macro_velocity(const PdeState& s) {
    PiecewiseLinear pl;
    const int m = s.cells();
    pl.x.resize(m + 1);
    for (int j = 0; j <= m; ++j) pl.x[j] = j * s.dx;
    pl.y = s.u;
    return pl;
}

namespace detail {

inline std::vector<double> merged_breakpoints(const std::vector<double>& a,
                                              const std::vector<double>& b) {
    std::vector<double> m;
    m.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(m));
    m.erase(std::unique(m.begin(), m.end()), m.end());
    return m;
}

}  // namespace detail

// L1 distance of two piecewise-constant fields, integrated exactly cell by
// cell over the merged breakpoints (grid sampling would alias the jumps).
inline double l1_distance(const PiecewiseConstant& a, const PiecewiseConstant& b) {
    const std::vector<double> brk = detail::merged_breakpoints(a.breaks, b.breaks);
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < brk.size(); ++j) {
        const double mid = 0.5 * (brk[j] + brk[j + 1]);
        acc += std::abs(a(mid) - b(mid)) * (brk[j + 1] - brk[j]);
    }
    return acc;
}

// L2 distance of two piecewise-linear fields; the difference is linear on each
// merged segment, so the segment integral (b-a)(ga^2+ga gb+gb^2)/3 is exact.
inline double l2_distance(const PiecewiseLinear& a, const PiecewiseLinear& b) {
    const std::vector<double> brk = detail::merged_breakpoints(a.x, b.x);
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < brk.size(); ++j) {
        const double ga = a(brk[j]) - b(brk[j]);
        const double gb = a(brk[j + 1]) - b(brk[j + 1]);
        acc += (brk[j + 1] - brk[j]) * (ga * ga + ga * gb + gb * gb) / 3.0;
    }
    return std::sqrt(acc);
}

// ---- scenario presets ----

struct Scenario {
    std::string name;
    SimConfig config;          // profiles, gamma, mu, pressure, horizon
    bool macro_only = false;   // gamma-sweep runs only the PDE solver
    std::vector<double> gammas;
};

inline Scenario make_scenario(const std::string& preset) {
    Scenario sc;
    sc.name = preset;
    SimConfig& cfg = sc.config;
    // Viscosity for the shipped presets. Large mu overdamps the compressive
    // sine before any congestion can form; 0.03 puts the presets in the
    // regime of interest: congestion forming near t = 0.2, release, and
    // long-time relaxation toward the flat state.
    cfg.mu = 0.03;
    cfg.gamma = 1.0;
    cfg.horizon = 0.5;
    cfg.init.u0 = Profile::sinusoid(0.0, 0.5, 1);
    if (preset == "case1") {
        cfg.init.rho0 = Profile::constant(0.7);
        cfg.init.rhostar0 = Profile::constant(0.7);
        cfg.init.delta = 0.7;
        cfg.init.rhobar = 0.7;
    } else if (preset == "case2a" || preset == "case2b") {
        cfg.init.rho0 = Profile::constant(0.7);
        cfg.init.rhostar0 = Profile::constant(1.0);
        cfg.init.delta = 0.7;
        cfg.init.rhobar = 0.7;
        cfg.pressure = (preset == "case2b");
        cfg.horizon = 1.0;
    } else if (preset == "case3") {
        cfg.init.rho0 = Profile::gaussian_bump(0.6, 0.2, 0.5, 0.1);
        cfg.init.rhostar0 = Profile::gaussian_bump(0.6, -0.2, 0.5, 0.1);
        cfg.init.delta = 0.4;
        cfg.init.rhobar = 0.8;
        cfg.horizon = 0.2;
    } else if (preset == "gamma-sweep") {
        cfg.init.rho0 = Profile::constant(0.7);
        cfg.init.rhostar0 = Profile::constant(0.7);
        cfg.init.delta = 0.7;
        cfg.init.rhobar = 0.7;
        sc.macro_only = true;
        sc.gammas = {2.0, 5.0, 10.0};
    } else {
        throw ConfigError("unknown preset: " + preset);
    }
    cfg.integrator.dt_init = 5e-5;
    cfg.integrator.dt_min = 1e-12;
    cfg.integrator.cfl_safety = 0.5;
    cfg.integrator.gap_floor_frac = 0.5;
    return sc;
}

inline std::vector<double> uniform_times(double horizon, int count) {
    std::vector<double> t(count);
    for (int i = 0; i < count; ++i) t[i] = horizon * i / (count - 1);
    return t;
}

// ---- convergence study ----

struct ConvergenceRow {
    int n_particles = 0;
    double eps = 0.0;
    double err_rho_l1 = 0.0;
    double err_rhostar_l1 = 0.0;
    double err_u_l2 = 0.0;
    double min_gap_over_eps = 0.0;
    double energy_margin = 0.0;  // worst frame margin of the energy ledger
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    std::string reference;  // macro run descriptor
    double compare_time = 0.0;
    bool rho_monotone = true;  // allowing one flagged pair
    int flagged_pairs = 0;
    bool u_monotone = true;
};

inline const MicroState& frame_at(const Trajectory& traj, double t) {
    for (const MicroState& s : traj.frames)
        if (std::abs(s.time - t) <= 1e-10 * std::max(1.0, t)) return s;
    throw std::runtime_error("no trajectory frame at requested time");
}

inline const PdeState& pde_frame_at(const PdeRun& run, double t) {
    for (const PdeState& s : run.frames)
        if (std::abs(s.time - t) <= 1e-10 * std::max(1.0, t)) return s;
    throw std::runtime_error("no PDE frame at requested time");
}

inline ConvergenceRow compare_frames(const MicroState& micro, const SimConfig& cfg,
                                     const PdeState& macro) {
    ConvergenceRow row;
    row.eps = micro.eps;
    row.err_rho_l1 = l1_distance(density_field(micro), macro_density_cells(macro));
    row.err_rhostar_l1 =
        l1_distance(critical_density_field(micro), macro_density_cells(macro, true));
    row.err_u_l2 = l2_distance(velocity_field_u(micro), macro_velocity(macro));
    (void)cfg;
    return row;
}

// For each N: build initial data, integrate, and diff the exact representation
// fields against the reference macro solve at the comparison time.
inline ConvergenceTable convergence_study(const SimConfig& base,
                                          const std::vector<int>& n_list, int m_ref,
                                          double compare_time,
                                          std::vector<Trajectory>* keep_trajectories = nullptr,
                                          const PdeRun* reference = nullptr) {
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1]) throw ConfigError("N list not ascending");
    if (m_ref < 2 * n_list.back()) throw ConfigError("M_ref < 2 max(N)");
    if (compare_time > base.horizon) throw ConfigError("compare time beyond horizon");

    ConvergenceTable table;
    table.compare_time = compare_time;
    table.reference = "macro M=" + std::to_string(m_ref);

    PdeRun local_ref;
    if (!reference) {
        PdeParams pp;
        pp.mu = base.mu;
        pp.gamma = base.gamma;
        pp.pressure = base.pressure;
        pp.force = base.force;
        local_ref = pde_solve(base.init.rho0, base.init.rhostar0, base.init.u0, pp, m_ref,
                              base.horizon, {compare_time});
        reference = &local_ref;
    }
    const PdeState& macro = pde_frame_at(*reference, compare_time);

    for (int n : n_list) {
        SimConfig cfg = base;
        cfg.n_particles = n;
        if (std::find_if(cfg.integrator.output_times.begin(), cfg.integrator.output_times.end(),
                         [&](double t) { return std::abs(t - compare_time) < 1e-14; }) ==
            cfg.integrator.output_times.end())
            cfg.integrator.output_times.push_back(compare_time);
        std::sort(cfg.integrator.output_times.begin(), cfg.integrator.output_times.end());
        validate_config(cfg);
        auto [state, report] = build_initial_state(cfg);
        Trajectory traj = advance(state, cfg, report);
        const Certificates certs = certify(traj, cfg);

        ConvergenceRow row = compare_frames(frame_at(traj, compare_time), cfg, macro);
        row.n_particles = n;
        row.min_gap_over_eps = traj.aggregates.min_gap_over_eps;
        row.energy_margin = worst_energy_margin(certs.energy);
        table.rows.push_back(row);
        if (keep_trajectories) keep_trajectories->push_back(std::move(traj));
    }

    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        if (!(table.rows[i].err_rho_l1 < table.rows[i - 1].err_rho_l1)) ++table.flagged_pairs;
        if (!(table.rows[i].err_u_l2 < table.rows[i - 1].err_u_l2)) table.u_monotone = false;
    }
    table.rho_monotone = table.flagged_pairs <= 1;
    return table;
}

inline json to_json(const ConvergenceTable& t) {
    json rows = json::array();
    for (const ConvergenceRow& r : t.rows)
        rows.push_back({{"N", r.n_particles},
                        {"eps", r.eps},
                        {"err_rho_L1", r.err_rho_l1},
                        {"err_rhostar_L1", r.err_rhostar_l1},
                        {"err_u_L2", r.err_u_l2},
                        {"min_gap_over_eps", r.min_gap_over_eps},
                        {"energy_margin", r.energy_margin}});
    return {{"rows", rows},
            {"reference", t.reference},
            {"compare_time", t.compare_time},
            {"rho_monotone", t.rho_monotone},
            {"flagged_pairs", t.flagged_pairs},
            {"u_monotone", t.u_monotone}};
}

inline std::string table_to_csv(const ConvergenceTable& t) {
    std::ostringstream os;
    os << "N,eps,err_rho_L1,err_rhostar_L1,err_u_L2,min_gap_over_eps,energy_margin\n";
    char buf[256];
    for (const ConvergenceRow& r : t.rows) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      r.n_particles, r.eps, r.err_rho_l1, r.err_rhostar_l1, r.err_u_l2,
                      r.min_gap_over_eps, r.energy_margin);
        os << buf;
    }
    return os.str();
}

// ---- artifact emission ----

inline std::string trajectory_csv(const Trajectory& traj) {
    std::ostringstream os;
    os << "t,particle,q,u\n";
    char buf[160];
    for (const MicroState& s : traj.frames)
        for (std::size_t i = 0; i < s.q.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g,%zu,%.17g,%.17g\n", s.time, i, s.q[i],
                          s.u[i]);
            os << buf;
        }
    return os.str();
}

inline std::string fields_csv(const MicroState& s, const SimConfig& cfg,
                              const std::vector<double>& grid) {
    const MacroProfile mp = sample_macro_profile(s, cfg, grid);
    std::ostringstream os;
    os << "t,x,rho,rhostar,u,v,w,G,chi\n";
    char buf[320];
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::snprintf(buf, sizeof(buf),
                      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", mp.time,
                      mp.grid[i], mp.rho[i], mp.rhostar[i], mp.u[i], mp.v[i], mp.w[i], mp.G[i],
                      mp.chi[i]);
        os << buf;
    }
    return os.str();
}

// Aligned micro/macro columns at the macro cell centers for one time.
inline std::string plot_csv(const MicroState& micro, const PdeState& macro) {
    const PiecewiseConstant rho_micro = density_field(micro);
    std::ostringstream os;
    os << "x,rho_micro,rho_macro,rhostar,u\n";
    char buf[256];
    for (int i = 0; i < macro.cells(); ++i) {
        const double x = (i + 0.5) * macro.dx;
        const double um = 0.5 * (macro.u[i] + macro.u[i + 1]);
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", x, rho_micro(x),
                      macro.rho[i], macro.rhostar[i], um);
        os << buf;
    }
    return os.str();
}

// Frame at an arbitrary time, interpolated between the stored output frames.
inline MicroState trajectory_state_at(const Trajectory& traj, double t) {
    const MicroState* lo = &traj.frames.front();
    const MicroState* hi = &traj.frames.back();
    for (std::size_t i = 0; i + 1 < traj.frames.size(); ++i)
        if (traj.frames[i].time <= t + 1e-14 && t <= traj.frames[i + 1].time + 1e-14) {
            lo = &traj.frames[i];
            hi = &traj.frames[i + 1];
            break;
        }
    return interpolate_state(*lo, *hi, t);
}

// Per requested time, write fields_t<time>.csv with aligned micro/macro
// columns. Empty time list writes nothing; times beyond the run horizon are an
// error.
inline std::vector<std::string> emit_plot_data(const Trajectory& traj, const PdeRun& run,
                                               const std::vector<double>& times,
                                               const std::string& out_dir) {
    std::vector<std::string> written;
    if (times.empty()) return written;
    const double T = std::min(traj.frames.back().time, run.horizon);
    for (double t : times)
        if (t < 0.0 || t > T + 1e-12) throw ConfigError("time out of range");
    std::filesystem::create_directories(out_dir);
    for (double t : times) {
        const MicroState micro = trajectory_state_at(traj, t);
        const PdeState* plo = &run.frames.front();
        const PdeState* phi = &run.frames.back();
        for (std::size_t i = 0; i + 1 < run.frames.size(); ++i)
            if (run.frames[i].time <= t + 1e-14 && t <= run.frames[i + 1].time + 1e-14) {
                plo = &run.frames[i];
                phi = &run.frames[i + 1];
                break;
            }
        PdeState macro = *plo;
        if (phi->time > plo->time) {
            const double th = std::clamp((t - plo->time) / (phi->time - plo->time), 0.0, 1.0);
            for (std::size_t i = 0; i < macro.rho.size(); ++i) {
                macro.rho[i] += th * (phi->rho[i] - plo->rho[i]);
                macro.rhostar[i] += th * (phi->rhostar[i] - plo->rhostar[i]);
            }
            for (std::size_t i = 0; i < macro.u.size(); ++i)
                macro.u[i] += th * (phi->u[i] - plo->u[i]);
            macro.time = t;
        }
        char name[64];
        std::snprintf(name, sizeof(name), "fields_t%.6g.csv", t);
        const std::string path = out_dir + "/" + name;
        write_text_file(path, plot_csv(micro, macro));
        written.push_back(path);
    }
    return written;
}

// Representation-field export per time: the 9-column sampled CSV plus the
// exact piecewise descriptions as JSON.
inline std::vector<std::string> emit_field_data(const Trajectory& traj,
                                                const std::vector<double>& times,
                                                const std::string& out_dir,
                                                int grid_points = 1000) {
    std::vector<std::string> written;
    if (times.empty()) return written;
    const double T = traj.frames.back().time;
    for (double t : times)
        if (t < 0.0 || t > T + 1e-12) throw ConfigError("time out of range");
    std::filesystem::create_directories(out_dir);
    std::vector<double> grid(grid_points + 1);
    for (int i = 0; i <= grid_points; ++i)
        grid[i] = static_cast<double>(i) / grid_points;
    for (double t : times) {
        const MicroState micro = trajectory_state_at(traj, t);
        char name[64];
        std::snprintf(name, sizeof(name), "micro_fields_t%.6g.csv", t);
        write_text_file(out_dir + "/" + name, fields_csv(micro, traj.config, grid));
        written.push_back(out_dir + "/" + name);
        std::snprintf(name, sizeof(name), "micro_fields_t%.6g.json", t);
        write_text_file(out_dir + "/" + name,
                        exact_fields_json(micro, traj.config).dump(2) + "\n");
        written.push_back(out_dir + "/" + name);
    }
    return written;
}

// ---- scenario runner ----

struct RunOptions {
    std::vector<int> n_list = {50, 100, 200};
    int cells = 400;                       // macro resolution M
    std::optional<double> horizon;         // override preset T
    std::optional<double> gamma;
    std::optional<double> mu;
    std::optional<bool> pressure;
    std::vector<double> gammas;            // gamma-sweep override
    bool clusters = false;                 // use the clustered integrator
    bool csv = false;                      // also flatten trajectories to CSV
    std::string out_dir = "out";
    unsigned seed = 0;                     // echoed into artifacts
};

struct RunResult {
    int exit_code = 0;  // 0 ok, 2 config, 3 solver abort, 4 certificate failure
    std::vector<Trajectory> trajectories;
    std::optional<PdeRun> macro;
    std::optional<ConvergenceTable> table;
    std::vector<double> sweep_max_rho;  // gamma-sweep verdict data
    bool sweep_monotone = false;
};

inline RunResult run_scenario(const std::string& preset, const RunOptions& opts,
                              std::ostream& log) {
    RunResult result;
    Scenario sc = make_scenario(preset);
    if (opts.horizon) sc.config.horizon = *opts.horizon;
    if (opts.gamma) sc.config.gamma = *opts.gamma;
    if (opts.mu) sc.config.mu = *opts.mu;
    if (opts.pressure) sc.config.pressure = *opts.pressure;
    if (!opts.gammas.empty()) sc.gammas = opts.gammas;
    const double T = sc.config.horizon;
    sc.config.integrator.output_times = uniform_times(T, 51);

    std::filesystem::create_directories(opts.out_dir);
    PdeParams pp;
    pp.mu = sc.config.mu;
    pp.gamma = sc.config.gamma;
    pp.pressure = sc.config.pressure;
    pp.force = sc.config.force;

    if (sc.macro_only) {
        // gamma sweep: one PDE run per gamma, monotonicity verdict on max rho.
        for (double g : sc.gammas) {
            PdeParams pg = pp;
            pg.gamma = g;
            PdeRun run = pde_solve(sc.config.init.rho0, sc.config.init.rhostar0,
                                   sc.config.init.u0, pg, opts.cells, T,
                                   uniform_times(T, 26));
            char name[96];
            std::snprintf(name, sizeof(name), "%s/macro_M%d_gamma%g.json",
                          opts.out_dir.c_str(), opts.cells, g);
            write_text_file(name, to_json(run).dump(2) + "\n");
            result.sweep_max_rho.push_back(run.max_rho_overall);
            log << "gamma=" << g << " max_rho=" << run.max_rho_overall << "\n";
        }
        result.sweep_monotone = true;
        for (std::size_t i = 1; i < result.sweep_max_rho.size(); ++i)
            if (!(result.sweep_max_rho[i] < result.sweep_max_rho[i - 1]))
                result.sweep_monotone = false;
        json verdict = {{"gammas", sc.gammas},
                        {"max_rho", result.sweep_max_rho},
                        {"monotone_decreasing", result.sweep_monotone},
                        {"seed", opts.seed}};
        write_text_file(opts.out_dir + "/gamma_sweep.json", verdict.dump(2) + "\n");
        log << "[" << (result.sweep_monotone ? "PASS" : "FAIL")
            << "] gamma-sweep: max rho strictly decreasing in gamma\n";
        result.exit_code = result.sweep_monotone ? 0 : 4;
        return result;
    }

    const double t_cmp = std::min(0.2, T);
    bool certificates_ok = true;
    for (int n : opts.n_list) {
        SimConfig cfg = sc.config;
        cfg.n_particles = n;
        cfg.integrator.output_times.push_back(t_cmp);
        std::sort(cfg.integrator.output_times.begin(), cfg.integrator.output_times.end());
        validate_config(cfg);
        auto [state, report] = build_initial_state(cfg);
        Trajectory traj =
            opts.clusters ? advance_clustered(state, cfg, report) : advance(state, cfg, report);
        const Certificates certs = certify(traj, cfg);
        certificates_ok = certificates_ok && certs.all_pass;
        char name[96];
        std::snprintf(name, sizeof(name), "%s/micro_N%d.json", opts.out_dir.c_str(), n);
        write_text_file(name, to_json(traj, &certs).dump(2) + "\n");
        if (opts.csv) {
            std::snprintf(name, sizeof(name), "%s/micro_N%d.csv", opts.out_dir.c_str(), n);
            write_text_file(name, trajectory_csv(traj));
        }
        log << "[" << (certs.all_pass ? "PASS" : "FAIL") << "] " << preset << " micro N=" << n
            << " certificates (energy margin=" << worst_energy_margin(certs.energy)
            << ", min gap/eps=" << certs.distances.min_gap_over_eps << ")\n";
        result.trajectories.push_back(std::move(traj));
    }

    std::vector<double> macro_times = uniform_times(T, 26);
    macro_times.push_back(t_cmp);
    PdeRun macro = pde_solve(sc.config.init.rho0, sc.config.init.rhostar0, sc.config.init.u0,
                             pp, opts.cells, T, macro_times);
    char name[96];
    std::snprintf(name, sizeof(name), "%s/macro_M%d.json", opts.out_dir.c_str(), opts.cells);
    write_text_file(name, to_json(macro).dump(2) + "\n");
    log << "macro M=" << opts.cells << " max_rho=" << macro.max_rho_overall
        << " clamps=" << macro.clamp_activations << "\n";

    // Convergence table against the macro run at the comparison time.
    ConvergenceTable table;
    table.compare_time = t_cmp;
    table.reference = "macro M=" + std::to_string(opts.cells);
    const PdeState& macro_cmp = pde_frame_at(macro, t_cmp);
    for (std::size_t i = 0; i < result.trajectories.size(); ++i) {
        const Trajectory& traj = result.trajectories[i];
        ConvergenceRow row =
            compare_frames(frame_at(traj, t_cmp), traj.config, macro_cmp);
        row.n_particles = opts.n_list[i];
        row.min_gap_over_eps = traj.aggregates.min_gap_over_eps;
        row.energy_margin = worst_energy_margin(energy_check(traj, traj.config));
        table.rows.push_back(row);
    }
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        if (!(table.rows[i].err_rho_l1 < table.rows[i - 1].err_rho_l1)) ++table.flagged_pairs;
        if (!(table.rows[i].err_u_l2 < table.rows[i - 1].err_u_l2)) table.u_monotone = false;
    }
    table.rho_monotone = table.flagged_pairs <= 1;
    json tj = to_json(table);
    tj["seed"] = opts.seed;
    write_text_file(opts.out_dir + "/table.json", tj.dump(2) + "\n");
    write_text_file(opts.out_dir + "/table.csv", table_to_csv(table));

    result.macro = std::move(macro);
    result.table = std::move(table);
    result.exit_code = certificates_ok ? 0 : 4;
    if (!certificates_ok) log << "[FAIL] certificate failure; exiting nonzero\n";
    return result;
}

}  // namespace lub1d
