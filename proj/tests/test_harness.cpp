#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lub1d/harness.hpp"
#include "lub1d/initializer.hpp"

using namespace lub1d;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("lub1d_test_" + tag)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("exact piecewise error norms") {
    // Two piecewise-constant fields with interleaved breakpoints.
    PiecewiseConstant a{{0.0, 0.5, 1.0}, {1.0, 3.0}};
    PiecewiseConstant b{{0.0, 0.25, 1.0}, {2.0, 2.0}};
    // |a-b|: 1 on (0,0.5), 1 on (0.5,1) -> L1 = 1.
    CHECK(l1_distance(a, b) == Catch::Approx(1.0).margin(1e-15));

    PiecewiseLinear pa{{0.0, 1.0}, {0.0, 1.0}};
    PiecewiseLinear pb{{0.0, 1.0}, {0.0, 0.0}};
    // difference x: integral of x^2 = 1/3.
    CHECK(l2_distance(pa, pb) == Catch::Approx(std::sqrt(1.0 / 3.0)).margin(1e-15));
}

TEST_CASE("shipped scenario files validate and match the presets") {
    for (const std::string name : {"case1", "case2a", "case2b", "case3"}) {
        const json j = read_json_file(std::string(LUB1D_SOURCE_DIR) + "/scenarios/" + name +
                                      ".json");
        const SimConfig cfg = validate_config(config_from_json(j));
        const Scenario sc = make_scenario(name);
        CHECK(cfg.mu == sc.config.mu);
        CHECK(cfg.gamma == sc.config.gamma);
        CHECK(cfg.pressure == sc.config.pressure);
        CHECK(cfg.init.rho0 == sc.config.init.rho0);
        CHECK(cfg.init.rhostar0 == sc.config.init.rhostar0);
        CHECK(cfg.init.u0 == sc.config.init.u0);
    }
}

TEST_CASE("run_scenario writes artifacts and a convergence table") {
    TempDir dir("run");
    RunOptions opts;
    opts.n_list = {25, 50};
    opts.cells = 100;
    opts.horizon = 0.1;
    opts.out_dir = dir.path.string();
    std::ostringstream log;
    const RunResult res = run_scenario("case1", opts, log);
    CHECK(res.exit_code == 0);
    CHECK(fs::exists(dir.path / "micro_N25.json"));
    CHECK(fs::exists(dir.path / "micro_N50.json"));
    CHECK(fs::exists(dir.path / "macro_M100.json"));
    CHECK(fs::exists(dir.path / "table.csv"));
    CHECK(fs::exists(dir.path / "table.json"));
    REQUIRE(res.table.has_value());
    REQUIRE(res.table->rows.size() == 2);
    CHECK(res.table->rows[1].err_rho_l1 < res.table->rows[0].err_rho_l1);
    CHECK(log.str().find("PASS") != std::string::npos);

    SECTION("trajectory artifacts round-trip") {
        const Trajectory back =
            trajectory_from_json(read_json_file((dir.path / "micro_N25.json").string()));
        CHECK(back.config == res.trajectories[0].config);
        REQUIRE(back.frames.size() == res.trajectories[0].frames.size());
        for (std::size_t f = 0; f < back.frames.size(); ++f) {
            CHECK(back.frames[f].q == res.trajectories[0].frames[f].q);
            CHECK(back.frames[f].u == res.trajectories[0].frames[f].u);
        }
        CHECK(back.aggregates.steps_accepted == res.trajectories[0].aggregates.steps_accepted);
    }
}

TEST_CASE("identical options produce byte-identical artifacts") {
    TempDir a("det_a"), b("det_b");
    RunOptions opts;
    opts.n_list = {25};
    opts.cells = 64;
    opts.horizon = 0.05;
    opts.seed = 7;
    std::ostringstream log;
    opts.out_dir = a.path.string();
    run_scenario("case1", opts, log);
    opts.out_dir = b.path.string();
    run_scenario("case1", opts, log);
    for (const std::string name : {"micro_N25.json", "macro_M64.json", "table.json",
                                   "table.csv"})
        CHECK(slurp(a.path / name) == slurp(b.path / name));
}

TEST_CASE("convergence study") {
    Scenario sc = make_scenario("case1");
    sc.config.horizon = 0.1;
    const ConvergenceTable table = convergence_study(sc.config, {25, 50}, 128, 0.1);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[1].err_rho_l1 < table.rows[0].err_rho_l1);
    CHECK(table.u_monotone);
    // Constant critical density: both representations are 0.7 to roundoff.
    for (const ConvergenceRow& r : table.rows) CHECK(r.err_rhostar_l1 <= 1e-10);

    SECTION("input validation") {
        CHECK_THROWS_WITH(convergence_study(sc.config, {50, 25}, 128, 0.1),
                          Catch::Matchers::ContainsSubstring("ascending"));
        CHECK_THROWS_WITH(convergence_study(sc.config, {25, 50}, 64, 0.1),
                          Catch::Matchers::ContainsSubstring("M_ref"));
    }
}

TEST_CASE("equal-resolution initial frames are close") {
    // N = M: the micro cells and the macro cell averages both approximate
    // rho0; for a constant profile the L1 distance is pure roundoff.
    Scenario sc = make_scenario("case1");
    sc.config.n_particles = 50;
    auto [state, report] = build_initial_state(validate_config(sc.config));
    (void)report;
    const PdeState macro0 = pde_init(sc.config.init.rho0, sc.config.init.rhostar0,
                                     sc.config.init.u0, 50);
    const double err = l1_distance(density_field(state), macro_density_cells(macro0));
    const double bound = sc.config.init.rho0.lipschitz_bound() * 2.0 * state.eps /
                             sc.config.init.delta +
                         1e-9;
    CHECK(err <= bound);
}

TEST_CASE("plot data export") {
    TempDir dir("plots");
    RunOptions opts;
    opts.n_list = {25};
    opts.cells = 64;
    opts.horizon = 0.1;
    opts.out_dir = dir.path.string();
    std::ostringstream log;
    const RunResult res = run_scenario("case1", opts, log);
    REQUIRE(res.macro.has_value());

    SECTION("one file per requested time") {
        const auto files = emit_plot_data(res.trajectories[0], *res.macro,
                                          {0.0, 0.05, 0.1}, (dir.path / "plots").string());
        REQUIRE(files.size() == 3);
        for (const std::string& f : files) {
            CHECK(fs::exists(f));
            const std::string head = slurp(f).substr(0, 40);
            CHECK(head.rfind("x,rho_micro,rho_macro,rhostar,u", 0) == 0);
        }
    }
    SECTION("empty request writes nothing") {
        const auto files =
            emit_plot_data(res.trajectories[0], *res.macro, {}, (dir.path / "p2").string());
        CHECK(files.empty());
        CHECK_FALSE(fs::exists(dir.path / "p2"));
    }
    SECTION("times beyond the horizon are rejected") {
        CHECK_THROWS_WITH(emit_plot_data(res.trajectories[0], *res.macro, {0.2},
                                         (dir.path / "p3").string()),
                          Catch::Matchers::ContainsSubstring("time out of range"));
    }
    SECTION("representation fields export as CSV plus exact JSON") {
        const auto files =
            emit_field_data(res.trajectories[0], {0.05}, (dir.path / "flds").string(), 200);
        REQUIRE(files.size() == 2);
        const std::string head = slurp(files[0]).substr(0, 40);
        CHECK(head.rfind("t,x,rho,rhostar,u,v,w,G,chi", 0) == 0);
        const json exact = read_json_file(files[1]);
        CHECK(exact.at("rho").at("type") == "piecewise-constant");
        CHECK(exact.at("w").at("type") == "piecewise-linear");
        CHECK(exact.at("rho").at("values").size() == 25);  // one cell per gap
    }
}

TEST_CASE("gamma sweep verdict") {
    TempDir dir("sweep");
    RunOptions opts;
    opts.cells = 100;
    opts.horizon = 0.3;
    opts.gammas = {2.0, 5.0};
    opts.out_dir = dir.path.string();
    std::ostringstream log;
    const RunResult res = run_scenario("gamma-sweep", opts, log);
    CHECK(res.exit_code == 0);
    CHECK(res.sweep_monotone);
    REQUIRE(res.sweep_max_rho.size() == 2);
    CHECK(res.sweep_max_rho[1] < res.sweep_max_rho[0]);
    CHECK(fs::exists(dir.path / "gamma_sweep.json"));
}
