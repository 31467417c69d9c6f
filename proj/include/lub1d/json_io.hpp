#pragma once

// Config and artifact (de)serialization. nlohmann::json orders keys and emits
// shortest round-trip doubles, so identical runs produce byte-identical files.

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lub1d/config.hpp"
#include "lub1d/diagnostics.hpp"
#include "lub1d/macro_fields.hpp"
#include "lub1d/macro_solver.hpp"
#include "lub1d/state.hpp"

namespace lub1d {

using json = nlohmann::json;

// ---- exact piecewise field descriptions ----

inline json to_json(const PiecewiseConstant& pc) {
    return {{"type", "piecewise-constant"}, {"breaks", pc.breaks}, {"values", pc.values}};
}

inline json to_json(const PiecewiseLinear& pl) {
    return {{"type", "piecewise-linear"}, {"x", pl.x}, {"y", pl.y}};
}

// Every representation field of one state as exact descriptions (breakpoints
// plus values), immune to grid aliasing.
inline json exact_fields_json(const MicroState& s, const SimConfig& cfg) {
    return {{"t", s.time},
            {"eps", s.eps},
            {"rho", to_json(density_field(s))},
            {"rhostar", to_json(critical_density_field(s))},
            {"u", to_json(velocity_field_u(s))},
            {"v", to_json(velocity_field_v(s))},
            {"w", to_json(strain_field_w(s))},
            {"G", to_json(interaction_field_G(s, cfg))},
            {"chi", to_json(volume_fraction(s))}};
}

// ---- profiles ----

inline json to_json(const Profile& p) {
    switch (p.kind()) {
        case Profile::Kind::Constant:
            return {{"kind", "constant"}, {"value", p.param_a()}};
        case Profile::Kind::Sinusoid:
            return {{"kind", "sinusoid"},
                    {"offset", p.param_a()},
                    {"amplitude", p.param_b()},
                    {"wavenumber", p.param_wavenumber()}};
        case Profile::Kind::GaussianBump:
            return {{"kind", "gaussian-bump"},
                    {"base", p.param_a()},
                    {"amplitude", p.param_b()},
                    {"center", p.param_center()},
                    {"width", p.param_width()}};
        case Profile::Kind::Tabulated:
            return {{"kind", "tabulated"}, {"x", p.knots_x()}, {"y", p.knots_y()}};
    }
    throw std::logic_error("unreachable");
}

inline Profile profile_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") return Profile::constant(j.at("value").get<double>());
    if (kind == "sinusoid")
        return Profile::sinusoid(j.at("offset").get<double>(), j.at("amplitude").get<double>(),
                                 j.at("wavenumber").get<int>());
    if (kind == "gaussian-bump")
        return Profile::gaussian_bump(j.at("base").get<double>(),
                                      j.at("amplitude").get<double>(),
                                      j.at("center").get<double>(), j.at("width").get<double>());
    if (kind == "tabulated")
        return Profile::tabulated(j.at("x").get<std::vector<double>>(),
                                  j.at("y").get<std::vector<double>>());
    throw ConfigError("unknown profile kind: " + kind);
}

inline json to_json(const ForceField& f) {
    switch (f.kind()) {
        case ForceField::Kind::Zero: return {{"kind", "zero"}};
        case ForceField::Kind::Constant:
            return {{"kind", "constant"}, {"value", f.constant_value()}};
        case ForceField::Kind::Tabulated:
            return {{"kind", "tabulated"},
                    {"t", f.knots_t()},
                    {"x", f.knots_x()},
                    {"values", f.table()}};
    }
    throw std::logic_error("unreachable");
}

inline ForceField force_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero") return ForceField::zero();
    if (kind == "constant") return ForceField::constant(j.at("value").get<double>());
    if (kind == "tabulated")
        return ForceField::tabulated(j.at("t").get<std::vector<double>>(),
                                     j.at("x").get<std::vector<double>>(),
                                     j.at("values").get<std::vector<std::vector<double>>>());
    throw ConfigError("unknown force kind: " + kind);
}

// ---- config ----

inline json to_json(const SimConfig& cfg) {
    return {{"n_particles", cfg.n_particles},
            {"mu", cfg.mu},
            {"gamma", cfg.gamma},
            {"horizon", cfg.horizon},
            {"pressure", cfg.pressure},
            {"force", to_json(cfg.force)},
            {"init",
             {{"delta", cfg.init.delta},
              {"rhobar", cfg.init.rhobar},
              {"rho0", to_json(cfg.init.rho0)},
              {"rhostar0", to_json(cfg.init.rhostar0)},
              {"u0", to_json(cfg.init.u0)}}},
            {"integrator",
             {{"dt_init", cfg.integrator.dt_init},
              {"dt_min", cfg.integrator.dt_min},
              {"cfl_safety", cfg.integrator.cfl_safety},
              {"gap_floor_frac", cfg.integrator.gap_floor_frac},
              {"output_times", cfg.integrator.output_times}}}};
}

inline SimConfig config_from_json(const json& j) {
    SimConfig cfg;
    cfg.n_particles = j.at("n_particles").get<int>();
    cfg.mu = j.at("mu").get<double>();
    cfg.gamma = j.at("gamma").get<double>();
    cfg.horizon = j.at("horizon").get<double>();
    cfg.pressure = j.value("pressure", true);
    cfg.force = force_from_json(j.at("force"));
    const json& init = j.at("init");
    cfg.init.delta = init.at("delta").get<double>();
    cfg.init.rhobar = init.at("rhobar").get<double>();
    cfg.init.rho0 = profile_from_json(init.at("rho0"));
    cfg.init.rhostar0 = profile_from_json(init.at("rhostar0"));
    cfg.init.u0 = profile_from_json(init.at("u0"));
    const json& ic = j.at("integrator");
    cfg.integrator.dt_init = ic.at("dt_init").get<double>();
    cfg.integrator.dt_min = ic.at("dt_min").get<double>();
    cfg.integrator.cfl_safety = ic.at("cfl_safety").get<double>();
    cfg.integrator.gap_floor_frac = ic.at("gap_floor_frac").get<double>();
    cfg.integrator.output_times = ic.at("output_times").get<std::vector<double>>();
    return cfg;
}

// ---- diagnostics ----

inline json to_json(const Certificates& c) {
    return {{"energy",
             {{"time", c.energy.time},
              {"kinetic", c.energy.kinetic},
              {"potential", c.energy.potential},
              {"dissipation", c.energy.dissipation},
              {"source_budget", c.energy.source_budget},
              {"margin", c.energy.margin},
              {"e0", c.energy.e0},
              {"tol", c.energy.tol},
              {"gamma1_extension", c.energy.gamma1_extension},
              {"pass", c.energy.pass}}},
            {"distances",
             {{"min_gap_over_eps", c.distances.min_gap_over_eps},
              {"max_gap_over_eps", c.distances.max_gap_over_eps},
              {"max_increment_over_eps2", c.distances.max_increment_over_eps2},
              {"max_abs_velocity", c.distances.max_abs_velocity},
              {"max_abs_dxg", c.distances.max_abs_dxg},
              {"tv_rho_max", c.distances.tv_rho_max},
              {"tv_rhostar_max", c.distances.tv_rhostar_max}}},
            {"velocity",
             {{"max_abs_velocity", c.velocity.max_abs_velocity},
              {"bound_b", c.velocity.bound_b},
              {"slack", c.velocity.slack},
              {"pass", c.velocity.pass}}},
            {"invariants",
             {{"gap_sum_drift", c.invariants.gap_sum_drift},
              {"mass_drift", c.invariants.mass_drift},
              {"rhostar_multiset_ok", c.invariants.rhostar_multiset_ok},
              {"dissipation_monotone", c.invariants.dissipation_monotone},
              {"pass", c.invariants.pass}}},
            {"all_pass", c.all_pass}};
}

// ---- trajectory ----

inline json to_json(const Trajectory& traj, const Certificates* certs = nullptr) {
    json frames = json::array();
    for (const MicroState& s : traj.frames)
        frames.push_back({{"t", s.time}, {"q", s.q}, {"u", s.u}});
    json aux = json::array();
    for (const FrameAux& a : traj.frame_aux)
        aux.push_back({{"dissipation", a.dissipation},
                       {"f_l2l1", a.f_l2l1},
                       {"dxg_l1linf", a.dxg_l1linf},
                       {"f_l1linf", a.f_l1linf}});
    std::vector<double> st, sdt, smin, smax;
    st.reserve(traj.step_log.size());
    for (const StepRecord& r : traj.step_log) {
        st.push_back(r.t);
        sdt.push_back(r.dt);
        smin.push_back(r.min_gap);
        smax.push_back(r.max_abs_u);
    }
    json out = {
        {"config", to_json(traj.config)},
        {"init_report",
         {{"eps", traj.init_report.eps},
          {"c0", traj.init_report.c0},
          {"C0", traj.init_report.C0},
          {"max_inc_d", traj.init_report.max_inc_d},
          {"max_inc_dstar", traj.init_report.max_inc_dstar}}},
        {"eps", traj.frames.empty() ? 0.0 : traj.frames.front().eps},
        {"dstar", traj.frames.empty() ? std::vector<double>{} : traj.frames.front().dstar},
        {"frames", frames},
        {"frame_aux", aux},
        {"step_log",
         {{"t", st}, {"dt", sdt}, {"min_gap", smin}, {"max_abs_u", smax}}},
        {"aggregates",
         {{"min_gap_over_eps", traj.aggregates.min_gap_over_eps},
          {"max_gap_over_eps", traj.aggregates.max_gap_over_eps},
          {"max_increment", traj.aggregates.max_increment},
          {"max_abs_velocity", traj.aggregates.max_abs_velocity},
          {"max_abs_dxg", traj.aggregates.max_abs_dxg},
          {"max_dt_accepted", traj.aggregates.max_dt_accepted},
          {"min_dt_accepted", traj.aggregates.min_dt_accepted},
          {"steps_accepted", traj.aggregates.steps_accepted},
          {"steps_rejected", traj.aggregates.steps_rejected}}}};
    if (!traj.cluster_heads.empty())
        out["clusters"] = {{"heads", traj.cluster_heads},
                           {"sizes", traj.cluster_sizes},
                           {"in_cluster_strain", "absent"}};
    if (certs) out["diagnostics"] = to_json(*certs);
    return out;
}

inline Trajectory trajectory_from_json(const json& j) {
    Trajectory traj;
    traj.config = config_from_json(j.at("config"));
    const json& ir = j.at("init_report");
    traj.init_report.eps = ir.at("eps").get<double>();
    traj.init_report.c0 = ir.at("c0").get<double>();
    traj.init_report.C0 = ir.at("C0").get<double>();
    traj.init_report.max_inc_d = ir.at("max_inc_d").get<double>();
    traj.init_report.max_inc_dstar = ir.at("max_inc_dstar").get<double>();
    const double eps = j.at("eps").get<double>();
    const auto dstar = j.at("dstar").get<std::vector<double>>();
    for (const json& f : j.at("frames")) {
        MicroState s;
        s.time = f.at("t").get<double>();
        s.q = f.at("q").get<std::vector<double>>();
        s.u = f.at("u").get<std::vector<double>>();
        s.eps = eps;
        s.dstar = dstar;
        traj.frames.push_back(std::move(s));
    }
    for (const json& a : j.at("frame_aux")) {
        FrameAux fx;
        fx.dissipation = a.at("dissipation").get<double>();
        fx.f_l2l1 = a.at("f_l2l1").get<double>();
        fx.dxg_l1linf = a.at("dxg_l1linf").get<double>();
        fx.f_l1linf = a.at("f_l1linf").get<double>();
        traj.frame_aux.push_back(fx);
    }
    const json& sl = j.at("step_log");
    const auto st = sl.at("t").get<std::vector<double>>();
    const auto sdt = sl.at("dt").get<std::vector<double>>();
    const auto smin = sl.at("min_gap").get<std::vector<double>>();
    const auto smax = sl.at("max_abs_u").get<std::vector<double>>();
    for (std::size_t i = 0; i < st.size(); ++i)
        traj.step_log.push_back({st[i], sdt[i], smin[i], smax[i]});
    const json& ag = j.at("aggregates");
    traj.aggregates.min_gap_over_eps = ag.at("min_gap_over_eps").get<double>();
    traj.aggregates.max_gap_over_eps = ag.at("max_gap_over_eps").get<double>();
    traj.aggregates.max_increment = ag.at("max_increment").get<double>();
    traj.aggregates.max_abs_velocity = ag.at("max_abs_velocity").get<double>();
    traj.aggregates.max_abs_dxg = ag.at("max_abs_dxg").get<double>();
    traj.aggregates.max_dt_accepted = ag.at("max_dt_accepted").get<double>();
    traj.aggregates.min_dt_accepted = ag.at("min_dt_accepted").get<double>();
    traj.aggregates.steps_accepted = ag.at("steps_accepted").get<long>();
    traj.aggregates.steps_rejected = ag.at("steps_rejected").get<long>();
    if (j.contains("clusters")) {
        traj.cluster_heads = j.at("clusters").at("heads").get<std::vector<int>>();
        traj.cluster_sizes = j.at("clusters").at("sizes").get<std::vector<int>>();
    }
    return traj;
}

// ---- PDE run ----

inline json to_json(const PdeRun& run) {
    json frames = json::array();
    for (const PdeState& s : run.frames)
        frames.push_back(
            {{"t", s.time}, {"rho", s.rho}, {"rhostar", s.rhostar}, {"u", s.u}});
    std::vector<double> mt, mv;
    mt.reserve(run.max_rho_series.size());
    for (const auto& [t, v] : run.max_rho_series) {
        mt.push_back(t);
        mv.push_back(v);
    }
    return {{"M", run.cells},
            {"T", run.horizon},
            {"params",
             {{"mu", run.params.mu},
              {"gamma", run.params.gamma},
              {"pressure", run.params.pressure},
              {"cfl_safety", run.params.cfl_safety},
              {"clamp_eta", run.params.clamp_eta},
              {"force", to_json(run.params.force)}}},
            {"frames", frames},
            {"max_rho_series", {{"t", mt}, {"max_rho", mv}}},
            {"clamp_activations", run.clamp_activations},
            {"steps", run.steps},
            {"mass0", run.mass0},
            {"mass_drift", run.mass_drift},
            {"max_rho_overall", run.max_rho_overall}};
}

inline PdeRun pde_run_from_json(const json& j) {
    PdeRun run;
    run.cells = j.at("M").get<int>();
    run.horizon = j.at("T").get<double>();
    const json& p = j.at("params");
    run.params.mu = p.at("mu").get<double>();
    run.params.gamma = p.at("gamma").get<double>();
    run.params.pressure = p.at("pressure").get<bool>();
    run.params.cfl_safety = p.at("cfl_safety").get<double>();
    run.params.clamp_eta = p.at("clamp_eta").get<double>();
    run.params.force = force_from_json(p.at("force"));
    for (const json& f : j.at("frames")) {
        PdeState s;
        s.time = f.at("t").get<double>();
        s.rho = f.at("rho").get<std::vector<double>>();
        s.rhostar = f.at("rhostar").get<std::vector<double>>();
        s.u = f.at("u").get<std::vector<double>>();
        s.dx = 1.0 / run.cells;
        run.frames.push_back(std::move(s));
    }
    const json& ms = j.at("max_rho_series");
    const auto mt = ms.at("t").get<std::vector<double>>();
    const auto mv = ms.at("max_rho").get<std::vector<double>>();
    for (std::size_t i = 0; i < mt.size(); ++i) run.max_rho_series.emplace_back(mt[i], mv[i]);
    run.clamp_activations = j.at("clamp_activations").get<long>();
    run.steps = j.at("steps").get<long>();
    run.mass0 = j.at("mass0").get<double>();
    run.mass_drift = j.at("mass_drift").get<double>();
    run.max_rho_overall = j.at("max_rho_overall").get<double>();
    return run;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return json::parse(in);
}

}  // namespace lub1d
