// Command-line driver: scenario runs, convergence studies, plot-data export,
// and config validation.
//
// Exit codes: 0 success, 2 config error, 3 solver abort, 4 certificate failure.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lub1d/harness.hpp"

namespace {

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const lub1d::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const lub1d::StateError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const lub1d::SolverAbort& e) {
        std::cerr << "solver abort: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "solver abort: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"One-dimensional suspension dynamics with lubrication and roughness"};
    app.require_subcommand(1);

    // ---- run ----
    auto* run = app.add_subcommand("run", "Run a scenario preset (micro sweep + macro solve)");
    std::string preset;
    lub1d::RunOptions opts;
    double horizon = -1.0, mu = -1.0;
    bool no_pressure = false;
    std::vector<double> gammas;
    run->add_option("preset", preset, "case1|case2a|case2b|case3|gamma-sweep")->required();
    run->add_option("--N", opts.n_list, "particle counts")->delimiter(',');
    run->add_option("--M", opts.cells, "macro grid cells");
    run->add_option("--T", horizon, "time horizon");
    run->add_option("--gamma", gammas, "pressure exponent(s)")->delimiter(',');
    run->add_option("--mu", mu, "viscosity coefficient");
    run->add_flag("--no-pressure", no_pressure, "disable repulsion/pressure end-to-end");
    run->add_flag("--clusters", opts.clusters, "use the clustered integrator");
    run->add_flag("--csv", opts.csv, "also write per-particle CSV flattening");
    run->add_option("--out", opts.out_dir, "output directory");
    run->add_option("--seed", opts.seed, "seed echoed into artifacts");

    // ---- study ----
    auto* study = app.add_subcommand("study", "Micro-vs-macro convergence study");
    std::string st_preset = "case1";
    std::vector<int> st_n = {25, 50, 100, 200};
    int st_mref = 800;
    double st_t = 0.2;
    std::string st_out = "out";
    study->add_option("--preset", st_preset, "scenario preset");
    study->add_option("--N", st_n, "ascending particle counts")->delimiter(',');
    study->add_option("--Mref", st_mref, "reference macro cells (>= 2 max N)");
    study->add_option("--T", st_t, "comparison time (also the horizon)");
    study->add_option("--out", st_out, "output directory");

    // ---- emit-plots ----
    auto* emit = app.add_subcommand("emit-plots", "Aligned micro/macro CSV per time");
    std::string ep_run = "out";
    int ep_n = 200, ep_m = 400;
    std::vector<double> ep_times;
    std::string ep_out;
    bool ep_fields = false;
    emit->add_option("--run", ep_run, "directory holding micro/macro artifacts");
    emit->add_option("--N", ep_n, "which micro run to load");
    emit->add_option("--M", ep_m, "which macro run to load");
    emit->add_option("--times", ep_times, "times to export")->delimiter(',');
    emit->add_option("--out", ep_out, "output directory (default <run>/plots)");
    emit->add_flag("--fields", ep_fields,
                   "also export the representation fields per time "
                   "(9-column CSV + exact piecewise JSON)");

    // ---- validate ----
    auto* val = app.add_subcommand("validate", "Validate a scenario config file");
    std::string cfg_path;
    val->add_option("config", cfg_path, "path to config JSON")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        if (horizon > 0.0) opts.horizon = horizon;
        if (mu > 0.0) opts.mu = mu;
        if (no_pressure) opts.pressure = false;
        if (preset == "gamma-sweep") {
            opts.gammas = gammas;
        } else if (gammas.size() == 1) {
            opts.gamma = gammas.front();
        } else if (gammas.size() > 1) {
            std::cerr << "config error: multiple --gamma values only for gamma-sweep\n";
            return 2;
        }
        return guarded([&] {
            lub1d::RunResult res = lub1d::run_scenario(preset, opts, std::cout);
            return res.exit_code;
        });
    }

    if (study->parsed()) {
        return guarded([&] {
            lub1d::Scenario sc = lub1d::make_scenario(st_preset);
            sc.config.horizon = st_t;
            sc.config.integrator.output_times = lub1d::uniform_times(st_t, 21);
            lub1d::ConvergenceTable table =
                lub1d::convergence_study(sc.config, st_n, st_mref, st_t);
            std::filesystem::create_directories(st_out);
            lub1d::json tj = lub1d::to_json(table);
            lub1d::write_text_file(st_out + "/study_table.json", tj.dump(2) + "\n");
            lub1d::write_text_file(st_out + "/study_table.csv", lub1d::table_to_csv(table));
            std::cout << lub1d::table_to_csv(table);
            std::cout << "[" << (table.rho_monotone ? "PASS" : "FAIL")
                      << "] err_rho_L1 decreasing (" << table.flagged_pairs
                      << " flagged pair(s))\n";
            return table.rho_monotone ? 0 : 4;
        });
    }

    if (emit->parsed()) {
        return guarded([&] {
            if (ep_times.empty()) return 0;  // nothing requested, nothing written
            const std::string out_dir = ep_out.empty() ? ep_run + "/plots" : ep_out;
            lub1d::Trajectory traj = lub1d::trajectory_from_json(
                lub1d::read_json_file(ep_run + "/micro_N" + std::to_string(ep_n) + ".json"));
            lub1d::PdeRun macro = lub1d::pde_run_from_json(
                lub1d::read_json_file(ep_run + "/macro_M" + std::to_string(ep_m) + ".json"));
            auto files = lub1d::emit_plot_data(traj, macro, ep_times, out_dir);
            if (ep_fields) {
                auto extra = lub1d::emit_field_data(traj, ep_times, out_dir);
                files.insert(files.end(), extra.begin(), extra.end());
            }
            for (const std::string& f : files) std::cout << f << "\n";
            return 0;
        });
    }

    if (val->parsed()) {
        return guarded([&] {
            lub1d::SimConfig cfg =
                lub1d::config_from_json(lub1d::read_json_file(cfg_path));
            lub1d::validate_config(cfg);
            std::cout << "valid\n";
            return 0;
        });
    }
    return 0;
}
