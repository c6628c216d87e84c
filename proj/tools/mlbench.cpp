// Command-line front end: data generation, bifurcation sweeps, equilibrium
// analysis, single training runs, the full method x regime x epochs grid,
// and report aggregation.
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mlb/bench.hpp"
#include "mlb/error.hpp"

namespace fs = std::filesystem;
using namespace mlb;

namespace {

std::string output_root() {
    const char* env = std::getenv("MLBENCH_OUT");
    return env && *env ? env : "out";
}

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        std::size_t pos = csv.find(',', start);
        std::string item = csv.substr(
            start, pos == std::string::npos ? std::string::npos : pos - start);
        std::size_t b = item.find_first_not_of(" \t");
        std::size_t e = item.find_last_not_of(" \t");
        if (b != std::string::npos)
            out.push_back(item.substr(b, e - b + 1));
        if (pos == std::string::npos)
            break;
        start = pos + 1;
    }
    return out;
}

std::string scenario(const std::string& regime, double i_ext) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", i_ext);
    return regime + "_i" + buf;
}

void add_manifest_options(CLI::App* cmd, ExperimentManifest& m) {
    cmd->add_option("--method", m.method, "Training method")
        ->check(CLI::IsMember({"pinn", "node"}))
        ->capture_default_str();
    cmd->add_option("--regime", m.regime, "Bifurcation regime")
        ->check(CLI::IsMember({"hopf", "snlc", "homoclinic"}))
        ->capture_default_str();
    cmd->add_option("--i-ext", m.i_ext, "External current (uA/cm^2)")
        ->capture_default_str();
    cmd->add_option("--epochs", m.epochs, "Training epochs")
        ->capture_default_str();
    cmd->add_option("--points", m.n_points, "Data grid points")
        ->capture_default_str();
    cmd->add_option("--t-end", m.t_end, "Trajectory end time (ms)")
        ->capture_default_str();
    cmd->add_option("--v0", m.v0, "Initial membrane potential (mV)")
        ->capture_default_str();
    cmd->add_option("--n0", m.n0, "Initial gating value")
        ->capture_default_str();
    cmd->add_option("--seed", m.seed, "PRNG seed")->capture_default_str();
    cmd->add_option("--lr", m.lr, "Adam learning rate")->capture_default_str();
    cmd->add_option("--activation", m.activation,
                    "Field-net activation (node only)")
        ->check(CLI::IsMember({"tanh", "silu"}))
        ->capture_default_str();
    cmd->add_option("--integrator", m.integrator,
                    "Training-time solver (node only)")
        ->check(CLI::IsMember({"dopri5", "rk4"}))
        ->capture_default_str();
    cmd->add_option("--rtol", m.rtol, "Training solver rtol (scaled units)")
        ->capture_default_str();
    cmd->add_option("--atol", m.atol, "Training solver atol (scaled units)")
        ->capture_default_str();
    cmd->add_option("--out", m.out_dir, "Output directory for artifacts");
    cmd->set_config("--config", "",
                    "key=value config file; a saved manifest.txt works as-is");
}

void print_report_row(const MetricsReport& r) {
    std::printf("scenario=%s method=%s epochs=%ld\n", r.regime.c_str(),
                r.method.c_str(), r.epochs);
    std::printf("  total_mse=%.6g  wall=%.2fs\n", r.total_mse, r.wall_time_s);
    std::printf("  V: rmse=%.6g mae=%.6g max_err=%.6g r2=%s\n", r.v.rmse,
                r.v.mae, r.v.max_err,
                r.v.r2_defined ? fmt17(r.v.r2).c_str() : "undefined");
    std::printf("  N: rmse=%.6g mae=%.6g max_err=%.6g r2=%s\n", r.n.rmse,
                r.n.mae, r.n.max_err,
                r.n.r2_defined ? fmt17(r.n.r2).c_str() : "undefined");
}

double read_timing(const fs::path& dir) {
    std::ifstream f(dir / "timing.txt");
    std::string line;
    while (std::getline(f, line)) {
        auto eq = line.find('=');
        if (eq != std::string::npos &&
            line.substr(0, eq) == "wall_time_s")
            return std::stod(line.substr(eq + 1));
    }
    return 0.0;
}

std::vector<MetricsReport> collect_rows(const std::string& root) {
    std::vector<MetricsReport> rows;
    if (!fs::is_directory(root))
        throw Error("report: not a directory: " + root);
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory() && fs::exists(entry.path() / "metrics.csv"))
            dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end()); // deterministic aggregation order
    for (const fs::path& dir : dirs) {
        auto part = read_metrics_csv((dir / "metrics.csv").string(), false);
        double wall = read_timing(dir);
        for (MetricsReport& r : part) {
            r.wall_time_s = wall;
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Morris-Lecar benchmark: PINN and neural-ODE trainers, "
                 "bifurcation sweeps, equilibrium analysis, reports"};
    app.require_subcommand(1);

    // generate ------------------------------------------------------------
    std::string g_regime = "hopf", g_out;
    double g_iext = 90.0, g_tend = 300.0, g_v0 = -20.0, g_n0 = 0.0;
    int g_points = 3000;
    auto* gen = app.add_subcommand("generate", "Write a ground-truth CSV");
    gen->add_option("--regime", g_regime)
        ->check(CLI::IsMember({"hopf", "snlc", "homoclinic"}))
        ->capture_default_str();
    gen->add_option("--i-ext", g_iext)->capture_default_str();
    gen->add_option("--points", g_points)->capture_default_str();
    gen->add_option("--t-end", g_tend)->capture_default_str();
    gen->add_option("--v0", g_v0)->capture_default_str();
    gen->add_option("--n0", g_n0)->capture_default_str();
    gen->add_option("--out", g_out, "CSV path (default under MLBENCH_OUT)");

    // bifurcate -----------------------------------------------------------
    std::string b_regime = "hopf", b_out;
    double b_imin = 0.0, b_imax = 120.0, b_frac = 0.5, b_tend = 300.0,
           b_v0 = -20.0, b_n0 = 0.0;
    int b_currents = 41, b_points = 3000;
    auto* bif = app.add_subcommand("bifurcate",
                                   "Amplitude sweep over external current");
    bif->add_option("--regime", b_regime)
        ->check(CLI::IsMember({"hopf", "snlc", "homoclinic"}))
        ->capture_default_str();
    bif->add_option("--i-min", b_imin)->capture_default_str();
    bif->add_option("--i-max", b_imax)->capture_default_str();
    bif->add_option("--currents", b_currents)->capture_default_str();
    bif->add_option("--transient-fraction", b_frac)->capture_default_str();
    bif->add_option("--points", b_points)->capture_default_str();
    bif->add_option("--t-end", b_tend)->capture_default_str();
    bif->add_option("--v0", b_v0)->capture_default_str();
    bif->add_option("--n0", b_n0)->capture_default_str();
    bif->add_option("--out", b_out, "CSV path (SVG written next to it)");

    // equilibria ----------------------------------------------------------
    std::string e_regime = "hopf", e_out;
    double e_iext = 90.0;
    auto* eq = app.add_subcommand("equilibria",
                                  "Fixed points, Jacobians, stability");
    eq->add_option("--regime", e_regime)
        ->check(CLI::IsMember({"hopf", "snlc", "homoclinic"}))
        ->capture_default_str();
    eq->add_option("--i-ext", e_iext)->capture_default_str();
    eq->add_option("--out", e_out, "Optional CSV path");

    // train ---------------------------------------------------------------
    ExperimentManifest tm;
    tm.out_dir.clear(); // empty means: derive from MLBENCH_OUT + run name
    auto* train = app.add_subcommand("train", "One training run + artifacts");
    add_manifest_options(train, tm);

    // grid ----------------------------------------------------------------
    std::string gr_methods = "pinn,node", gr_regimes = "hopf,snlc,homoclinic",
                gr_epochs = "500,2000", gr_out;
    int gr_points = 500;
    unsigned long long gr_seed = 0;
    auto* grid = app.add_subcommand(
        "grid", "Full method x regime x epochs matrix + report");
    grid->add_option("--methods", gr_methods, "Comma-separated methods")
        ->capture_default_str();
    grid->add_option("--regimes", gr_regimes, "Comma-separated regimes")
        ->capture_default_str();
    grid->add_option("--epoch-list", gr_epochs, "Comma-separated epoch counts")
        ->capture_default_str();
    grid->add_option("--points", gr_points)->capture_default_str();
    grid->add_option("--seed", gr_seed)->capture_default_str();
    grid->add_option("--out", gr_out, "Grid root directory");

    // report --------------------------------------------------------------
    std::string r_root, r_out;
    auto* rep = app.add_subcommand(
        "report", "Aggregate run directories into report CSVs");
    rep->add_option("--root", r_root, "Directory containing run subdirectories");
    rep->add_option("--out", r_out, "Report CSV path (default <root>/report.csv)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            if (g_out.empty())
                g_out = (fs::path(output_root()) /
                         (scenario(g_regime, g_iext) + "_data.csv"))
                            .string();
            fs::create_directories(fs::path(g_out).parent_path());
            Trajectory traj = generate_data(regime_from_name(g_regime), g_iext,
                                            g_points, g_tend,
                                            State{g_v0, g_n0});
            write_trajectory_csv(traj, g_out);
            std::printf("wrote %s (%zu rows)\n", g_out.c_str(),
                        traj.states.size());
        } else if (bif->parsed()) {
            if (b_out.empty())
                b_out = (fs::path(output_root()) /
                         ("bifurcation_" + b_regime + ".csv"))
                            .string();
            fs::create_directories(fs::path(b_out).parent_path());
            BifurcationCurve curve = bifurcation_sweep(
                regime_from_name(b_regime), b_imin, b_imax, b_currents, b_frac,
                State{b_v0, b_n0}, b_points, b_tend);
            write_bifurcation_csv(curve, b_out);
            std::string svg = b_out;
            if (svg.size() > 4 && svg.compare(svg.size() - 4, 4, ".csv") == 0)
                svg.resize(svg.size() - 4);
            svg += ".svg";
            write_svg_lines(svg, "Bifurcation diagram: " + b_regime,
                            "I_ext (uA/cm^2)", "peak-to-peak V (mV)",
                            {{b_regime, "#1f77b4", curve.i_values,
                              curve.amplitudes}});
            int failures = 0;
            for (char okv : curve.ok)
                failures += okv ? 0 : 1;
            std::printf("wrote %s (%zu currents, %d failed)\n", b_out.c_str(),
                        curve.i_values.size(), failures);
        } else if (eq->parsed()) {
            MLParams p = regime_params(regime_from_name(e_regime));
            p.i_ext = e_iext;
            auto eqs = find_equilibria(p);
            std::printf("%s at I=%g: %zu equilibria\n", e_regime.c_str(),
                        e_iext, eqs.size());
            std::string csv = "v,n,j11,j12,j21,j22,trace,det,re1,im1,re2,im2,"
                              "stability\n";
            for (const Equilibrium& e : eqs) {
                const Mat2& j = e.jacobian;
                double trace = j[0] + j[3];
                double det = j[0] * j[3] - j[1] * j[2];
                std::printf("  V*=%.10g mV  N*=%.10g\n", e.state.v, e.state.n);
                std::printf("    J=[[%.6g, %.6g], [%.6g, %.6g]]\n", j[0], j[1],
                            j[2], j[3]);
                std::printf("    trace=%.6g det=%.6g eig=%.6g%+.6gi, "
                            "%.6g%+.6gi -> %s\n",
                            trace, det, e.lambda1.real(), e.lambda1.imag(),
                            e.lambda2.real(), e.lambda2.imag(),
                            stability_name(e.stability));
                csv += fmt17(e.state.v) + "," + fmt17(e.state.n);
                for (double jv : j)
                    csv += "," + fmt17(jv);
                csv += "," + fmt17(trace) + "," + fmt17(det);
                csv += "," + fmt17(e.lambda1.real()) + "," +
                       fmt17(e.lambda1.imag());
                csv += "," + fmt17(e.lambda2.real()) + "," +
                       fmt17(e.lambda2.imag());
                csv += std::string(",") + stability_name(e.stability) + "\n";
            }
            if (!e_out.empty()) {
                fs::create_directories(fs::path(e_out).parent_path());
                std::ofstream f(e_out, std::ios::binary);
                f << csv;
                std::printf("wrote %s\n", e_out.c_str());
            }
        } else if (train->parsed()) {
            if (tm.out_dir.empty())
                tm.out_dir =
                    (fs::path(output_root()) /
                     (tm.method + "_" + scenario(tm.regime, tm.i_ext) + "_" +
                      std::to_string(tm.epochs) + "ep_s" +
                      std::to_string(tm.seed)))
                        .string();
            ExperimentResult res = run_experiment(tm);
            print_report_row(res.report);
            std::printf("artifacts in %s\n", tm.out_dir.c_str());
        } else if (grid->parsed()) {
            if (gr_out.empty())
                gr_out = (fs::path(output_root()) / "grid").string();
            // Benchmark operating point for each regime: a current inside
            // (or at) its oscillatory window where the regimes differ most.
            auto rep_current = [](const std::string& regime) {
                if (regime == "hopf")
                    return 90.0;
                if (regime == "snlc")
                    return 42.0;
                return 50.0;
            };
            std::vector<MetricsReport> rows;
            for (const auto& method : split_list(gr_methods))
                for (const auto& regime : split_list(gr_regimes))
                    for (const auto& ep : split_list(gr_epochs)) {
                        ExperimentManifest m;
                        m.method = method;
                        m.regime = regime;
                        m.i_ext = rep_current(regime);
                        m.epochs = std::stol(ep);
                        m.n_points = gr_points;
                        m.seed = gr_seed;
                        m.out_dir =
                            (fs::path(gr_out) /
                             (method + "_" + scenario(regime, m.i_ext) + "_" +
                              ep + "ep"))
                                .string();
                        std::printf("[grid] %s %s %s epochs...\n",
                                    method.c_str(), regime.c_str(), ep.c_str());
                        std::fflush(stdout);
                        ExperimentResult res = run_experiment(m);
                        std::printf("[grid]   total_mse=%.6g wall=%.1fs\n",
                                    res.report.total_mse,
                                    res.report.wall_time_s);
                        std::fflush(stdout);
                        rows.push_back(res.report);
                    }
            emit_report(rows, (fs::path(gr_out) / "report.csv").string());
            std::printf("wrote %s\n",
                        (fs::path(gr_out) / "report.csv").string().c_str());
        } else if (rep->parsed()) {
            if (r_root.empty())
                r_root = output_root();
            if (r_out.empty())
                r_out = (fs::path(r_root) / "report.csv").string();
            std::vector<MetricsReport> rows = collect_rows(r_root);
            emit_report(rows, r_out);
            std::printf("wrote %s (%zu rows)\n", r_out.c_str(), rows.size());
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
