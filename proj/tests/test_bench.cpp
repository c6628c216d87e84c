#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mlb/bench.hpp"
#include "mlb/error.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace mlb;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string sub(const std::string& child) const { return (path / child).string(); }
};

MetricsReport fake_report(const std::string& scenario, const std::string& method,
                          long epochs, double scale) {
    // Synthetic but internally consistent numbers via compute_metrics.
    std::vector<double> truth = {1.0, 2.0, 3.0, 4.0};
    std::vector<double> pred = {1.0 + scale, 2.0 - scale, 3.0 + scale, 4.0};
    MetricsReport rep = make_report(pred, truth, truth, truth);
    rep.regime = scenario;
    rep.method = method;
    rep.epochs = epochs;
    rep.wall_time_s = 1.5 * scale;
    return rep;
}

} // namespace

TEST_CASE("fmt17 round-trips doubles exactly") {
    for (double x : {1.0 / 3.0, -26.59686697234567, 1e-300, 0.0, 123456789.123456789,
                     -84.0, 2.718281828459045}) {
        std::string s = fmt17(x);
        double back = std::stod(s);
        CHECK(back == x); // bitwise after parse
    }
}

TEST_CASE("manifest text round-trips every field bitwise") {
    ExperimentManifest m;
    m.method = "node";
    m.regime = "homoclinic";
    m.i_ext = 42.125;
    m.epochs = 12345;
    m.n_points = 777;
    m.t_end = 299.99999999999997;
    m.v0 = -26.59686697234567;
    m.n0 = 0.12937932335912345;
    m.seed = 18446744073709551615ull;
    m.lr = 3.0000000000000004e-3;
    m.activation = "silu";
    m.integrator = "rk4";
    m.rtol = 1.0000000000000002e-4;
    m.atol = 9.999999999999999e-7;
    m.out_dir = "some/dir";

    ExperimentManifest back = manifest_from_text(manifest_to_text(m));
    CHECK(back.method == m.method);
    CHECK(back.regime == m.regime);
    CHECK(back.i_ext == m.i_ext);
    CHECK(back.epochs == m.epochs);
    CHECK(back.n_points == m.n_points);
    CHECK(back.t_end == m.t_end);
    CHECK(back.v0 == m.v0);
    CHECK(back.n0 == m.n0);
    CHECK(back.seed == m.seed);
    CHECK(back.lr == m.lr);
    CHECK(back.activation == m.activation);
    CHECK(back.integrator == m.integrator);
    CHECK(back.rtol == m.rtol);
    CHECK(back.atol == m.atol);
    CHECK(back.out_dir == m.out_dir);
}

TEST_CASE("manifest parsing: defaults, comments, unknown keys") {
    ExperimentManifest d = manifest_from_text("# just a comment\n\n");
    CHECK(d.method == "pinn");
    CHECK(d.epochs == 2000);
    CHECK(d.i_ext == 90.0);

    ExperimentManifest p = manifest_from_text("epochs=42\n# note\nregime=snlc\n");
    CHECK(p.epochs == 42);
    CHECK(p.regime == "snlc");
    CHECK(p.method == "pinn"); // untouched default

    CHECK_THROWS_AS(manifest_from_text("mystery=1\n"), BadShape);
    CHECK_THROWS_AS(manifest_from_text("epochs\n"), BadShape);
}

TEST_CASE("manifest file save/load round trip") {
    TempDir tmp("mlb_test_manifest");
    ExperimentManifest m;
    m.i_ext = 50.5;
    m.out_dir = tmp.sub("exp");
    save_manifest(m, tmp.sub("manifest.txt"));
    ExperimentManifest back = load_manifest(tmp.sub("manifest.txt"));
    CHECK(back.i_ext == 50.5);
    CHECK(back.out_dir == tmp.sub("exp"));
    CHECK_THROWS_AS(load_manifest(tmp.sub("missing.txt")), Error);
}

TEST_CASE("generate_data produces the requested grid from the requested start") {
    Trajectory tr = generate_data(Regime::Hopf, 90.0, 61, 30.0, {-20.0, 0.0});
    REQUIRE(tr.grid.points.size() == 61);
    REQUIRE(tr.states.size() == 61);
    CHECK(tr.grid.points.front() == 0.0);
    CHECK(tr.grid.points.back() == 30.0);
    CHECK(tr.states.front().v == -20.0); // y0 bitwise
    CHECK(tr.states.front().n == 0.0);
    for (const State& s : tr.states) {
        CHECK(std::isfinite(s.v));
        CHECK(std::isfinite(s.n));
    }
}

TEST_CASE("trajectory CSV round-trips bitwise") {
    TempDir tmp("mlb_test_trajcsv");
    Trajectory tr = generate_data(Regime::SNLC, 42.0, 20, 10.0, {-20.0, 0.0});
    const std::string path = tmp.sub("data.csv");
    write_trajectory_csv(tr, path);

    std::string text = slurp(path);
    CHECK(text.rfind("t,V,N\n", 0) == 0);

    Trajectory back = read_trajectory_csv(path);
    REQUIRE(back.grid.points.size() == tr.grid.points.size());
    for (std::size_t i = 0; i < tr.grid.points.size(); ++i) {
        CHECK(back.grid.points[i] == tr.grid.points[i]);
        CHECK(back.states[i].v == tr.states[i].v);
        CHECK(back.states[i].n == tr.states[i].n);
    }
    CHECK_THROWS_AS(read_trajectory_csv(tmp.sub("nope.csv")), Error);
}

TEST_CASE("metrics CSV round-trips, with and without the time column") {
    TempDir tmp("mlb_test_metcsv");
    std::vector<MetricsReport> rows = {fake_report("hopf_i90", "pinn", 2000, 0.1),
                                       fake_report("snlc_i42", "node", 500, 0.3)};
    const std::string with_t = tmp.sub("with_time.csv");
    const std::string no_t = tmp.sub("no_time.csv");
    write_metrics_csv(rows, with_t, true);
    write_metrics_csv(rows, no_t, false);

    std::string header = slurp(no_t).substr(0, slurp(no_t).find('\n'));
    CHECK(header == "scenario,method,epochs,total_mse,mape_v,mape_n,mae_v,mae_n,"
                    "r2_v,r2_n,maxerr_v,maxerr_n,rmse_v,rmse_n,rmspe_v,rmspe_n");

    auto back = read_metrics_csv(with_t, true);
    REQUIRE(back.size() == 2);
    CHECK(back[0].regime == "hopf_i90");
    CHECK(back[0].method == "pinn");
    CHECK(back[0].epochs == 2000);
    CHECK(back[0].v.rmse == rows[0].v.rmse);
    CHECK(back[0].v.mse == doctest::Approx(rows[0].v.mse).epsilon(1e-15));
    CHECK(back[0].wall_time_s == rows[0].wall_time_s);
    CHECK(back[1].n.max_err == rows[1].n.max_err);

    auto back_nt = read_metrics_csv(no_t, false);
    CHECK(back_nt[1].wall_time_s == 0.0);

    // Undefined R^2 (constant truth series) serializes as a word, not a number.
    std::vector<double> truth = {2.0, 2.0, 2.0};
    std::vector<double> pred = {2.0, 2.5, 2.0};
    MetricsReport undef = make_report(pred, truth, pred, pred);
    undef.regime = "flat";
    undef.method = "pinn";
    const std::string upath = tmp.sub("undef.csv");
    write_metrics_csv({undef}, upath, false);
    CHECK(slurp(upath).find("undefined") != std::string::npos);
    auto uback = read_metrics_csv(upath, false);
    REQUIRE(uback.size() == 1);
    CHECK(!uback[0].v.r2_defined);
    CHECK(uback[0].n.r2_defined); // the N series was not constant
}

TEST_CASE("emit_report writes the table and the best-per-cell summary") {
    TempDir tmp("mlb_test_report");
    std::vector<MetricsReport> rows = {
        fake_report("hopf_i90", "pinn", 500, 0.4),
        fake_report("hopf_i90", "pinn", 2000, 0.1), // best pinn on hopf
        fake_report("hopf_i90", "node", 2000, 0.2),
        fake_report("snlc_i42", "pinn", 2000, 0.5),
    };
    const std::string path = tmp.sub("report.csv");
    emit_report(rows, path);
    auto all = read_metrics_csv(path, true);
    CHECK(all.size() == 4);
    auto best = read_metrics_csv(tmp.sub("report_best.csv"), true);
    REQUIRE(best.size() == 3); // hopf x pinn, hopf x node, snlc x pinn
    double best_hopf_pinn = 1e300;
    for (const auto& r : best)
        if (r.regime == "hopf_i90" && r.method == "pinn")
            best_hopf_pinn = r.total_mse;
    CHECK(best_hopf_pinn
          == doctest::Approx(fake_report("hopf_i90", "pinn", 2000, 0.1).total_mse)
                 .epsilon(1e-14));
    CHECK_THROWS_AS(emit_report({}, path), EmptyInput);
}

TEST_CASE("SVG output is byte-deterministic and self-contained") {
    TempDir tmp("mlb_test_svg");
    SvgSeries truth{"truth", "#1f77b4", {0.0, 1.0, 2.0, 3.0}, {0.0, 1.0, 4.0, 9.0}};
    SvgSeries pred{"prediction", "#d62728", {0.0, 1.0, 2.0, 3.0}, {0.1, 0.9, 4.2, 8.8}};
    const std::string a = tmp.sub("a.svg");
    const std::string b = tmp.sub("b.svg");
    write_svg_lines(a, "V vs t", "t (ms)", "V (mV)", {truth, pred});
    write_svg_lines(b, "V vs t", "t (ms)", "V (mV)", {truth, pred});
    std::string sa = slurp(a);
    CHECK(sa == slurp(b)); // byte-identical
    CHECK(sa.find("<svg") != std::string::npos);
    CHECK(sa.find("V vs t") != std::string::npos);
    CHECK(sa.find("truth") != std::string::npos);
    CHECK(sa.find("#d62728") != std::string::npos);
    CHECK(sa.find("</svg>") != std::string::npos);

    // Log-scale variant also deterministic, different bytes.
    const std::string c = tmp.sub("c.svg");
    write_svg_lines(c, "loss", "epoch", "mse", {truth}, true);
    CHECK(slurp(c) != sa);
}

TEST_CASE("bifurcation sweep separates quiescence from spiking") {
    // Two currents far apart: rest at I = 0 vs full limit cycle at I = 100.
    BifurcationCurve curve = bifurcation_sweep(Regime::Hopf, 0.0, 100.0, 2, 0.5,
                                               {-20.0, 0.0}, 1500, 300.0);
    REQUIRE(curve.i_values.size() == 2);
    CHECK(curve.i_values[0] == 0.0);
    CHECK(curve.i_values[1] == 100.0);
    REQUIRE(curve.ok[0] == 1);
    REQUIRE(curve.ok[1] == 1);
    CHECK(curve.amplitudes[0] < 5.0);  // subthreshold ring-down
    CHECK(curve.amplitudes[1] > 30.0); // oscillation

    TempDir tmp("mlb_test_bif");
    const std::string path = tmp.sub("sweep.csv");
    write_bifurcation_csv(curve, path);
    std::string text = slurp(path);
    CHECK(text.rfind("i_ext,amplitude,status\n", 0) == 0);
    CHECK(text.find(",ok\n") != std::string::npos);
    CHECK(text.find("100") != std::string::npos);
}

TEST_CASE("run_experiment produces the full artifact set and replays bitwise") {
    TempDir tmp("mlb_test_exp");
    ExperimentManifest m;
    m.method = "pinn";
    m.regime = "hopf";
    m.i_ext = 90.0;
    m.epochs = 8;
    m.n_points = 40;
    m.t_end = 40.0;
    m.seed = 0;
    m.out_dir = tmp.sub("run1");

    ExperimentResult res = run_experiment(m);
    CHECK(res.report.method == "pinn");
    CHECK(res.report.epochs == 8);
    CHECK(res.report.n_points == 40);
    CHECK(std::isfinite(res.report.total_mse));
    REQUIRE(res.prediction.states.size() == 40);
    REQUIRE(!res.history.empty());

    for (const char* name :
         {"manifest.txt", "data.csv", "history.csv", "pred.csv", "phase.csv",
          "metrics.csv", "checkpoint.bin", "timing.txt", "voltage.svg",
          "gating.svg", "phase.svg", "loss.svg"}) {
        CAPTURE(name);
        CHECK(fs::exists(fs::path(m.out_dir) / name));
    }

    // The saved manifest reparses to the same configuration.
    ExperimentManifest back = load_manifest((fs::path(m.out_dir) / "manifest.txt").string());
    CHECK(back.method == m.method);
    CHECK(back.epochs == m.epochs);
    CHECK(back.i_ext == m.i_ext);

    // The checkpoint stores the trained net and run metadata.
    CheckpointMeta meta;
    MlpNet net = load_checkpoint((fs::path(m.out_dir) / "checkpoint.bin").string(), &meta);
    CHECK(meta.method == "pinn");
    CHECK(meta.epochs == 8);
    CHECK(param_count(net) == 33538);

    // Replay into a second directory: every CSV byte-identical; only
    // timing.txt may differ.
    ExperimentManifest m2 = m;
    m2.out_dir = tmp.sub("run2");
    run_experiment(m2);
    for (const char* name :
         {"data.csv", "history.csv", "pred.csv", "phase.csv", "metrics.csv"}) {
        CAPTURE(name);
        CHECK(slurp((fs::path(m.out_dir) / name).string())
              == slurp((fs::path(m2.out_dir) / name).string()));
    }
    CHECK(slurp((fs::path(m.out_dir) / "voltage.svg").string())
          == slurp((fs::path(m2.out_dir) / "voltage.svg").string()));
}

TEST_CASE("run_experiment trains the neural-ODE path too") {
    TempDir tmp("mlb_test_exp_node");
    ExperimentManifest m;
    m.method = "node";
    m.regime = "hopf";
    m.i_ext = 90.0;
    m.epochs = 3;
    m.n_points = 25;
    m.t_end = 25.0;
    m.integrator = "rk4";
    m.out_dir = tmp.sub("run");
    ExperimentResult res = run_experiment(m);
    CHECK(res.report.method == "node");
    CHECK(param_count(res.net) == 33666);
    CHECK(std::isfinite(res.report.total_mse));
    CheckpointMeta meta;
    load_checkpoint((fs::path(m.out_dir) / "checkpoint.bin").string(), &meta);
    CHECK(meta.method == "node");
    // Unknown method names are rejected up front.
    ExperimentManifest bad = m;
    bad.method = "transformer";
    CHECK_THROWS_AS(run_experiment(bad), BadShape);
}
