#pragma once

#include <string>
#include <vector>

#include "mlb/integrate.hpp"
#include "mlb/metrics.hpp"
#include "mlb/ml_model.hpp"
#include "mlb/node.hpp"
#include "mlb/pinn.hpp"

namespace mlb {

// Everything that determines a training run.  Serialized as key=value lines
// (one per field, doubles printed with 17 significant digits), so a saved
// manifest doubles as a config file for a byte-identical replay.
struct ExperimentManifest {
    std::string method = "pinn";       // pinn | node
    std::string regime = "hopf";       // hopf | snlc | homoclinic
    double i_ext = 90.0;               // uA/cm^2
    long epochs = 2000;
    int n_points = 500;
    double t_end = 300.0;              // ms
    double v0 = -20.0;                 // data-generation initial condition (mV)
    double n0 = 0.0;
    unsigned long long seed = 0;
    double lr = 1e-3;
    std::string activation = "tanh";   // node field net: tanh | silu
    std::string integrator = "dopri5"; // node training solver: dopri5 | rk4
    double rtol = 1e-4;                // node training tolerances, scaled units
    double atol = 1e-6;
    std::string out_dir = "out";
};

std::string manifest_to_text(const ExperimentManifest& m);
// Parses key=value lines over the defaults; unknown keys throw, missing keys
// keep their default.  '#' starts a comment; blank lines are ignored.
ExperimentManifest manifest_from_text(const std::string& text);
void save_manifest(const ExperimentManifest& m, const std::string& path);
ExperimentManifest load_manifest(const std::string& path);

// Ground truth: Morris-Lecar solved by dopri5 at rtol=1e-6/atol=1e-9,
// dense-sampled on the uniform inclusive grid [0, t_end] with n_points.
Trajectory generate_data(Regime regime, double i_ext, int n_points,
                         double t_end, const State& y0);

// CSV columns t,V,N with 17-significant-digit formatting.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);
Trajectory read_trajectory_csv(const std::string& path);

// Peak-to-peak V amplitude per external current; `ok` is 0 where the
// integration failed (amplitude then NaN, row flagged in the CSV).
struct BifurcationCurve {
    std::vector<double> i_values;   // uA/cm^2
    std::vector<double> amplitudes; // mV
    std::vector<char> ok;
};

// For each of n_currents uniformly spaced in [i_min, i_max]: integrate
// [0, t_end] from y0, drop the first transient_fraction of samples, record
// max(V) - min(V) of the remainder.  Integration failures flag the row
// instead of aborting the sweep.
BifurcationCurve bifurcation_sweep(Regime regime, double i_min, double i_max,
                                   int n_currents, double transient_fraction,
                                   const State& y0, int n_points = 3000,
                                   double t_end = 300.0);

void write_bifurcation_csv(const BifurcationCurve& curve,
                           const std::string& path);

struct ExperimentResult {
    MetricsReport report;    // wall_time_s filled from the training run
    Trajectory truth;
    Trajectory prediction;   // physical units, on the data grid
    LossHistory history;
    MlpNet net;
};

// Generates data, trains per manifest.method, evaluates on the data grid in
// physical units, and writes the artifact set into manifest.out_dir:
// manifest.txt, data.csv, history.csv, pred.csv, phase.csv, metrics.csv,
// checkpoint.bin, voltage.svg, gating.svg, phase.svg, loss.svg, timing.txt.
// Wall time lives only in timing.txt so every CSV replays byte-identically.
ExperimentResult run_experiment(const ExperimentManifest& manifest);

// The pinned report schema: scenario,method,epochs,total_mse,mape_v,mape_n,
// mae_v,mae_n,r2_v,r2_n,maxerr_v,maxerr_n,rmse_v,rmse_n,rmspe_v,rmspe_n
// (+ time_s when with_time).  Undefined R^2 serializes as "undefined".
void write_metrics_csv(const std::vector<MetricsReport>& rows,
                       const std::string& path, bool with_time);
std::vector<MetricsReport> read_metrics_csv(const std::string& path,
                                            bool with_time);

// Full table (with time_s) plus a best-per-scenario x method summary
// (minimum total_mse) next to it at <path minus .csv>_best.csv.
// Throws EmptyInput on an empty row set.
void emit_report(const std::vector<MetricsReport>& rows,
                 const std::string& path);

// One line chart, hand-rolled deterministic SVG (no timestamps or generator
// metadata, so replayed bytes match).
struct SvgSeries {
    std::string label;
    std::string color; // e.g. "#1f77b4"
    std::vector<double> xs;
    std::vector<double> ys;
};

void write_svg_lines(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<SvgSeries>& series,
                     bool log_y = false);

// %.17g rendering shared by every CSV writer.
std::string fmt17(double x);

} // namespace mlb
