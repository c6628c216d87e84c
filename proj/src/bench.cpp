#include "mlb/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "mlb/error.hpp"

namespace mlb {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary); // binary: no newline translation
    if (!f)
        throw Error("cannot open " + path + " for writing");
    f << text;
    if (!f)
        throw Error("write failed for " + path);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw BadShape("cannot parse number '" + s + "' in " + what);
    }
}

long parse_long(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        long v = std::stol(s, &used);
        if (used != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw BadShape("cannot parse integer '" + s + "' in " + what);
    }
}

// Seeds use the full 64-bit unsigned range, which overflows stol.
unsigned long long parse_ull(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        unsigned long long v = std::stoull(s, &used);
        if (used != s.size() || (!s.empty() && s[0] == '-'))
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw BadShape("cannot parse integer '" + s + "' in " + what);
    }
}

} // namespace

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// --- manifest -------------------------------------------------------------

std::string manifest_to_text(const ExperimentManifest& m) {
    std::ostringstream ss;
    ss << "method=" << m.method << "\n"
       << "regime=" << m.regime << "\n"
       << "i-ext=" << fmt17(m.i_ext) << "\n"
       << "epochs=" << m.epochs << "\n"
       << "points=" << m.n_points << "\n"
       << "t-end=" << fmt17(m.t_end) << "\n"
       << "v0=" << fmt17(m.v0) << "\n"
       << "n0=" << fmt17(m.n0) << "\n"
       << "seed=" << m.seed << "\n"
       << "lr=" << fmt17(m.lr) << "\n"
       << "activation=" << m.activation << "\n"
       << "integrator=" << m.integrator << "\n"
       << "rtol=" << fmt17(m.rtol) << "\n"
       << "atol=" << fmt17(m.atol) << "\n"
       << "out=" << m.out_dir << "\n";
    return ss.str();
}

ExperimentManifest manifest_from_text(const std::string& text) {
    ExperimentManifest m;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#')
            continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw BadShape("manifest: expected key=value, got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key == "method")
            m.method = val;
        else if (key == "regime")
            m.regime = val;
        else if (key == "i-ext")
            m.i_ext = parse_double(val, "manifest i-ext");
        else if (key == "epochs")
            m.epochs = parse_long(val, "manifest epochs");
        else if (key == "points")
            m.n_points = static_cast<int>(parse_long(val, "manifest points"));
        else if (key == "t-end")
            m.t_end = parse_double(val, "manifest t-end");
        else if (key == "v0")
            m.v0 = parse_double(val, "manifest v0");
        else if (key == "n0")
            m.n0 = parse_double(val, "manifest n0");
        else if (key == "seed")
            m.seed = parse_ull(val, "manifest seed");
        else if (key == "lr")
            m.lr = parse_double(val, "manifest lr");
        else if (key == "activation")
            m.activation = val;
        else if (key == "integrator")
            m.integrator = val;
        else if (key == "rtol")
            m.rtol = parse_double(val, "manifest rtol");
        else if (key == "atol")
            m.atol = parse_double(val, "manifest atol");
        else if (key == "out")
            m.out_dir = val;
        else
            throw BadShape("manifest: unknown key '" + key + "'");
    }
    return m;
}

void save_manifest(const ExperimentManifest& m, const std::string& path) {
    write_file(path, manifest_to_text(m));
}

ExperimentManifest load_manifest(const std::string& path) {
    return manifest_from_text(read_file(path));
}

// --- data generation ------------------------------------------------------

Trajectory generate_data(Regime regime, double i_ext, int n_points,
                         double t_end, const State& y0) {
    if (n_points < 2)
        throw BadShape("generate_data: need at least 2 points");
    if (!(t_end > 0.0))
        throw BadShape("generate_data: t_end must be positive");
    MLParams p = regime_params(regime);
    p.i_ext = i_ext;
    SolverConfig cfg;
    cfg.rtol = 1e-6;
    cfg.atol = 1e-9;
    TimeGrid grid = uniform_grid(0.0, t_end, n_points);
    return dopri5(ml_field(p), y0, 0.0, t_end, cfg, grid);
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ostringstream ss;
    ss << "t,V,N\n";
    for (std::size_t i = 0; i < traj.grid.points.size(); ++i)
        ss << fmt17(traj.grid.points[i]) << ',' << fmt17(traj.states[i].v)
           << ',' << fmt17(traj.states[i].n) << '\n';
    write_file(path, ss.str());
}

Trajectory read_trajectory_csv(const std::string& path) {
    std::istringstream ss(read_file(path));
    std::string line;
    if (!std::getline(ss, line) || trim(line) != "t,V,N")
        throw BadShape("trajectory CSV: bad header in " + path);
    Trajectory traj;
    while (std::getline(ss, line)) {
        line = trim(line);
        if (line.empty())
            continue;
        auto cells = split(line, ',');
        if (cells.size() != 3)
            throw BadShape("trajectory CSV: expected 3 columns in " + path);
        traj.grid.points.push_back(parse_double(cells[0], path));
        traj.states.push_back(State{parse_double(cells[1], path),
                                    parse_double(cells[2], path)});
    }
    if (traj.grid.points.empty())
        throw EmptyInput("trajectory CSV: no data rows in " + path);
    return traj;
}

// --- bifurcation sweep ----------------------------------------------------

BifurcationCurve bifurcation_sweep(Regime regime, double i_min, double i_max,
                                   int n_currents, double transient_fraction,
                                   const State& y0, int n_points,
                                   double t_end) {
    if (n_currents < 1)
        throw BadShape("bifurcation_sweep: need at least 1 current");
    if (i_max < i_min)
        throw BadShape("bifurcation_sweep: need i_min <= i_max");
    if (!(transient_fraction >= 0.0) || !(transient_fraction < 1.0))
        throw BadShape("bifurcation_sweep: transient_fraction must be in [0,1)");
    if (n_points < 2)
        throw BadShape("bifurcation_sweep: need at least 2 samples per current");

    BifurcationCurve curve;
    // A zero-width range collapses to a single current regardless of
    // n_currents.
    int n = i_max > i_min ? n_currents : 1;
    for (int k = 0; k < n; ++k) {
        double i_ext = n > 1 ? i_min + (i_max - i_min) * k / (n - 1) : i_min;
        curve.i_values.push_back(i_ext);
        try {
            Trajectory traj = generate_data(regime, i_ext, n_points, t_end, y0);
            std::size_t start = static_cast<std::size_t>(
                transient_fraction * static_cast<double>(n_points));
            double v_lo = traj.states[start].v;
            double v_hi = v_lo;
            for (std::size_t i = start; i < traj.states.size(); ++i) {
                v_lo = std::min(v_lo, traj.states[i].v);
                v_hi = std::max(v_hi, traj.states[i].v);
            }
            curve.amplitudes.push_back(v_hi - v_lo);
            curve.ok.push_back(1);
        } catch (const Error&) {
            curve.amplitudes.push_back(std::numeric_limits<double>::quiet_NaN());
            curve.ok.push_back(0);
        }
    }
    return curve;
}

void write_bifurcation_csv(const BifurcationCurve& curve,
                           const std::string& path) {
    std::ostringstream ss;
    ss << "i_ext,amplitude,status\n";
    for (std::size_t k = 0; k < curve.i_values.size(); ++k)
        ss << fmt17(curve.i_values[k]) << ',' << fmt17(curve.amplitudes[k])
           << ',' << (curve.ok[k] ? "ok" : "failed") << '\n';
    write_file(path, ss.str());
}

// --- metrics CSV ----------------------------------------------------------

namespace {

const char* kReportHeader =
    "scenario,method,epochs,total_mse,mape_v,mape_n,mae_v,mae_n,r2_v,r2_n,"
    "maxerr_v,maxerr_n,rmse_v,rmse_n,rmspe_v,rmspe_n";

std::string r2_cell(const VarMetrics& m) {
    return m.r2_defined ? fmt17(m.r2) : "undefined";
}

} // namespace

void write_metrics_csv(const std::vector<MetricsReport>& rows,
                       const std::string& path, bool with_time) {
    std::ostringstream ss;
    ss << kReportHeader << (with_time ? ",time_s\n" : "\n");
    for (const MetricsReport& r : rows) {
        ss << r.regime << ',' << r.method << ',' << r.epochs << ','
           << fmt17(r.total_mse) << ',' << fmt17(r.v.mape_percent) << ','
           << fmt17(r.n.mape_percent) << ',' << fmt17(r.v.mae) << ','
           << fmt17(r.n.mae) << ',' << r2_cell(r.v) << ',' << r2_cell(r.n)
           << ',' << fmt17(r.v.max_err) << ',' << fmt17(r.n.max_err) << ','
           << fmt17(r.v.rmse) << ',' << fmt17(r.n.rmse) << ','
           << fmt17(r.v.rmspe) << ',' << fmt17(r.n.rmspe);
        if (with_time)
            ss << ',' << fmt17(r.wall_time_s);
        ss << '\n';
    }
    write_file(path, ss.str());
}

std::vector<MetricsReport> read_metrics_csv(const std::string& path,
                                            bool with_time) {
    std::istringstream ss(read_file(path));
    std::string line;
    std::string expect = std::string(kReportHeader) + (with_time ? ",time_s" : "");
    if (!std::getline(ss, line) || trim(line) != expect)
        throw BadShape("metrics CSV: bad header in " + path);
    std::vector<MetricsReport> rows;
    const std::size_t n_cols = with_time ? 17 : 16;
    while (std::getline(ss, line)) {
        line = trim(line);
        if (line.empty())
            continue;
        auto c = split(line, ',');
        if (c.size() != n_cols)
            throw BadShape("metrics CSV: wrong column count in " + path);
        MetricsReport r;
        r.regime = c[0];
        r.method = c[1];
        r.epochs = parse_long(c[2], path);
        r.total_mse = parse_double(c[3], path);
        r.v.mape_percent = parse_double(c[4], path);
        r.n.mape_percent = parse_double(c[5], path);
        r.v.mae = parse_double(c[6], path);
        r.n.mae = parse_double(c[7], path);
        for (auto [cell, vm] : {std::pair{8, &r.v}, std::pair{9, &r.n}}) {
            if (c[cell] == "undefined") {
                vm->r2_defined = false;
                vm->r2 = std::numeric_limits<double>::quiet_NaN();
            } else {
                vm->r2 = parse_double(c[cell], path);
            }
        }
        r.v.max_err = parse_double(c[10], path);
        r.n.max_err = parse_double(c[11], path);
        r.v.rmse = parse_double(c[12], path);
        r.n.rmse = parse_double(c[13], path);
        r.v.rmspe = parse_double(c[14], path);
        r.n.rmspe = parse_double(c[15], path);
        r.v.mse = r.v.rmse * r.v.rmse;
        r.n.mse = r.n.rmse * r.n.rmse;
        if (with_time)
            r.wall_time_s = parse_double(c[16], path);
        rows.push_back(std::move(r));
    }
    return rows;
}

void emit_report(const std::vector<MetricsReport>& rows,
                 const std::string& path) {
    if (rows.empty())
        throw EmptyInput("emit_report: no rows");
    write_metrics_csv(rows, path, true);

    // Best (minimum total MSE) row per scenario x method, mirroring the
    // headline comparison table.
    std::map<std::string, const MetricsReport*> best;
    for (const MetricsReport& r : rows) {
        std::string key = r.regime + "|" + r.method;
        auto it = best.find(key);
        if (it == best.end() || r.total_mse < it->second->total_mse)
            best[key] = &r;
    }
    std::vector<MetricsReport> best_rows;
    for (const auto& [key, r] : best)
        best_rows.push_back(*r);

    std::string best_path = path;
    const std::string suffix = ".csv";
    if (best_path.size() >= suffix.size() &&
        best_path.compare(best_path.size() - suffix.size(), suffix.size(),
                          suffix) == 0)
        best_path.resize(best_path.size() - suffix.size());
    best_path += "_best.csv";
    write_metrics_csv(best_rows, best_path, true);
}

// --- SVG line charts ------------------------------------------------------

namespace {

std::string fmt_coord(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", x);
    return buf;
}

std::string fmt_tick(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", x);
    return buf;
}

} // namespace

void write_svg_lines(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<SvgSeries>& series, bool log_y) {
    if (series.empty())
        throw EmptyInput("write_svg_lines: no series");

    const double width = 640, height = 420;
    const double left = 72, right = 18, top = 42, bottom = 52;
    const double pw = width - left - right;
    const double ph = height - top - bottom;

    auto ty = [log_y](double y) {
        return log_y ? std::log10(std::max(y, 1e-300)) : y;
    };

    bool any = false;
    double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
    for (const SvgSeries& s : series) {
        for (std::size_t i = 0; i < s.xs.size() && i < s.ys.size(); ++i) {
            double x = s.xs[i], y = ty(s.ys[i]);
            if (!std::isfinite(x) || !std::isfinite(y))
                continue;
            if (!any) {
                x_lo = x_hi = x;
                y_lo = y_hi = y;
                any = true;
            }
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    }
    if (!any)
        throw EmptyInput("write_svg_lines: no finite points");
    if (x_hi - x_lo < 1e-300) {
        x_lo -= 0.5;
        x_hi += 0.5;
    }
    if (y_hi - y_lo < 1e-300) {
        y_lo -= 0.5;
        y_hi += 0.5;
    }
    double y_pad = 0.05 * (y_hi - y_lo);
    y_lo -= y_pad;
    y_hi += y_pad;

    auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * pw; };

    std::ostringstream ss;
    ss << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
       << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
       << height << "\">\n";
    ss << "<rect width=\"" << width << "\" height=\"" << height
       << "\" fill=\"white\"/>\n";
    ss << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"15\">" << title
       << "</text>\n";

    // Axes box and ticks.
    ss << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw
       << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    const int n_ticks = 5;
    for (int i = 0; i < n_ticks; ++i) {
        double fx = x_lo + (x_hi - x_lo) * i / (n_ticks - 1);
        double cx = px(fx);
        ss << "<line x1=\"" << fmt_coord(cx) << "\" y1=\"" << top + ph
           << "\" x2=\"" << fmt_coord(cx) << "\" y2=\"" << top + ph + 5
           << "\" stroke=\"black\"/>\n";
        ss << "<text x=\"" << fmt_coord(cx) << "\" y=\"" << top + ph + 20
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
              "font-size=\"11\">" << fmt_tick(fx) << "</text>\n";

        double fy = y_lo + (y_hi - y_lo) * i / (n_ticks - 1);
        double cy = top + ph - (fy - y_lo) / (y_hi - y_lo) * ph;
        ss << "<line x1=\"" << left - 5 << "\" y1=\"" << fmt_coord(cy)
           << "\" x2=\"" << left << "\" y2=\"" << fmt_coord(cy)
           << "\" stroke=\"black\"/>\n";
        double label = log_y ? std::pow(10.0, fy) : fy;
        ss << "<text x=\"" << left - 8 << "\" y=\"" << fmt_coord(cy + 4)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
              "font-size=\"11\">" << fmt_tick(label) << "</text>\n";
    }
    ss << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 12
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"12\">" << x_label << "</text>\n";
    ss << "<text x=\"18\" y=\"" << top + ph / 2
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"12\" transform=\"rotate(-90 18 " << top + ph / 2
       << ")\">" << y_label << "</text>\n";

    // Series polylines and legend.
    double legend_y = top + 14;
    for (const SvgSeries& s : series) {
        ss << "<polyline fill=\"none\" stroke=\"" << s.color
           << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.xs.size() && i < s.ys.size(); ++i) {
            double y = ty(s.ys[i]);
            if (!std::isfinite(s.xs[i]) || !std::isfinite(y))
                continue;
            ss << fmt_coord(px(s.xs[i])) << ','
               << fmt_coord(top + ph - (y - y_lo) / (y_hi - y_lo) * ph) << ' ';
        }
        ss << "\"/>\n";
        if (!s.label.empty()) {
            ss << "<line x1=\"" << left + pw - 150 << "\" y1=\"" << legend_y
               << "\" x2=\"" << left + pw - 126 << "\" y2=\"" << legend_y
               << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
            ss << "<text x=\"" << left + pw - 120 << "\" y=\"" << legend_y + 4
               << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label
               << "</text>\n";
            legend_y += 16;
        }
    }
    ss << "</svg>\n";
    write_file(path, ss.str());
}

// --- experiment runner ----------------------------------------------------

namespace {

std::vector<double> v_series(const Trajectory& traj) {
    std::vector<double> out;
    out.reserve(traj.states.size());
    for (const State& s : traj.states)
        out.push_back(s.v);
    return out;
}

std::vector<double> n_series(const Trajectory& traj) {
    std::vector<double> out;
    out.reserve(traj.states.size());
    for (const State& s : traj.states)
        out.push_back(s.n);
    return out;
}

std::string scenario_tag(const ExperimentManifest& m) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", m.i_ext);
    return m.regime + "_i" + buf;
}

} // namespace

ExperimentResult run_experiment(const ExperimentManifest& m) {
    Regime regime = regime_from_name(m.regime);
    if (m.method != "pinn" && m.method != "node")
        throw BadShape("run_experiment: unknown method '" + m.method + "'");

    std::filesystem::create_directories(m.out_dir);
    auto out = [&](const char* name) {
        return (std::filesystem::path(m.out_dir) / name).string();
    };
    save_manifest(m, out("manifest.txt"));

    ExperimentResult res;
    res.truth = generate_data(regime, m.i_ext, m.n_points, m.t_end,
                              State{m.v0, m.n0});
    write_trajectory_csv(res.truth, out("data.csv"));

    TrainResult train;
    if (m.method == "pinn") {
        PinnConfig cfg;
        cfg.regime = regime;
        cfg.i_ext = m.i_ext;
        cfg.epochs = m.epochs;
        cfg.data = res.truth;
        cfg.lr = m.lr;
        cfg.seed = m.seed;
        train = train_pinn(cfg);

        Mat t_col(m.n_points, 1);
        for (int i = 0; i < m.n_points; ++i)
            t_col(i, 0) = res.truth.grid.points[i];
        Mat pred = forward(train.net, t_col);
        res.prediction.grid = res.truth.grid;
        for (int i = 0; i < m.n_points; ++i)
            res.prediction.states.push_back(State{pred(i, 0), pred(i, 1)});
    } else {
        NodeConfig cfg;
        cfg.regime = regime;
        cfg.i_ext = m.i_ext;
        cfg.epochs = m.epochs;
        cfg.data = res.truth;
        cfg.lr = m.lr;
        cfg.seed = m.seed;
        cfg.activation = activation_from_name(m.activation);
        cfg.integrator = integrator_from_name(m.integrator);
        cfg.solver.rtol = m.rtol;
        cfg.solver.atol = m.atol;
        train = train_node(cfg);

        res.prediction = predict_node(train.net, node_scaler(cfg),
                                      res.truth.states.front(),
                                      res.truth.grid, cfg.integrator,
                                      cfg.solver);
    }

    res.report = make_report(v_series(res.prediction), v_series(res.truth),
                             n_series(res.prediction), n_series(res.truth));
    res.report.n_points = static_cast<std::size_t>(m.n_points);
    res.report.wall_time_s = train.wall_time_s;
    res.report.epochs = m.epochs;
    res.report.method = m.method;
    res.report.regime = scenario_tag(m);
    res.history = train.history;
    res.net = train.net;

    // Artifacts.  Wall time goes only into timing.txt so all CSV bytes
    // replay identically from the manifest.
    {
        std::ostringstream ss;
        ss << "epoch,total,data,physics\n";
        for (const LossRecord& r : res.history)
            ss << r.epoch << ',' << fmt17(r.total) << ',' << fmt17(r.data)
               << ',' << fmt17(r.physics) << '\n';
        write_file(out("history.csv"), ss.str());
    }
    {
        std::ostringstream ss;
        ss << "t,v_true,n_true,v_pred,n_pred\n";
        for (int i = 0; i < m.n_points; ++i)
            ss << fmt17(res.truth.grid.points[i]) << ','
               << fmt17(res.truth.states[i].v) << ','
               << fmt17(res.truth.states[i].n) << ','
               << fmt17(res.prediction.states[i].v) << ','
               << fmt17(res.prediction.states[i].n) << '\n';
        write_file(out("pred.csv"), ss.str());
    }
    {
        std::ostringstream ss;
        ss << "v_true,n_true,v_pred,n_pred\n";
        for (int i = 0; i < m.n_points; ++i)
            ss << fmt17(res.truth.states[i].v) << ','
               << fmt17(res.truth.states[i].n) << ','
               << fmt17(res.prediction.states[i].v) << ','
               << fmt17(res.prediction.states[i].n) << '\n';
        write_file(out("phase.csv"), ss.str());
    }
    write_metrics_csv({res.report}, out("metrics.csv"), false);
    save_checkpoint(res.net,
                    CheckpointMeta{m.method,
                                   static_cast<unsigned long long>(m.epochs)},
                    out("checkpoint.bin"));
    write_file(out("timing.txt"),
               "wall_time_s=" + fmt17(train.wall_time_s) + "\n");

    const std::string blue = "#1f77b4", orange = "#d62728";
    std::vector<double> t = res.truth.grid.points;
    write_svg_lines(out("voltage.svg"), "Membrane potential: " + scenario_tag(m),
                    "t (ms)", "V (mV)",
                    {{"truth", blue, t, v_series(res.truth)},
                     {m.method, orange, t, v_series(res.prediction)}});
    write_svg_lines(out("gating.svg"), "Gating variable: " + scenario_tag(m),
                    "t (ms)", "N",
                    {{"truth", blue, t, n_series(res.truth)},
                     {m.method, orange, t, n_series(res.prediction)}});
    write_svg_lines(out("phase.svg"), "Phase portrait: " + scenario_tag(m),
                    "V (mV)", "N",
                    {{"truth", blue, v_series(res.truth), n_series(res.truth)},
                     {m.method, orange, v_series(res.prediction),
                      n_series(res.prediction)}});
    {
        std::vector<double> epochs, totals;
        for (const LossRecord& r : res.history) {
            epochs.push_back(static_cast<double>(r.epoch));
            totals.push_back(r.total);
        }
        write_svg_lines(out("loss.svg"), "Training loss: " + scenario_tag(m),
                        "epoch", "loss",
                        {{m.method, blue, epochs, totals}}, true);
    }
    return res;
}

} // namespace mlb
