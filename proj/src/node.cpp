#include "mlb/node.hpp"

#include <chrono>
#include <cmath>
#include <initializer_list>
#include <sstream>
#include <utility>

#include "mlb/error.hpp"

namespace mlb {

namespace {

// Guard used by fit_scaler for every channel.
void check_span(double lo, double hi, const char* channel) {
    if (!(hi - lo >= 1e-12)) {
        std::ostringstream msg;
        msg << "fit_scaler: channel " << channel << " spans less than 1e-12 ("
            << lo << " to " << hi << ")";
        throw DegenerateChannel(msg.str());
    }
}

double to_unit(double x, double lo, double hi) { return (x - lo) / (hi - lo); }
double from_unit(double u, double lo, double hi) { return lo + u * (hi - lo); }

void check_field_net(const MlpNet& net) {
    if (net.layer_sizes.front() != 2 || net.layer_sizes.back() != 2)
        throw BadShape("neural-ODE field net must map 2 inputs to 2 outputs");
}

} // namespace

Scaler fit_scaler(const Trajectory& data) {
    if (data.states.empty() || data.grid.points.size() != data.states.size())
        throw BadShape("fit_scaler: trajectory grid/state sizes disagree");
    Scaler sc;
    sc.v_min = sc.v_max = data.states.front().v;
    sc.n_min = sc.n_max = data.states.front().n;
    for (const State& s : data.states) {
        sc.v_min = std::min(sc.v_min, s.v);
        sc.v_max = std::max(sc.v_max, s.v);
        sc.n_min = std::min(sc.n_min, s.n);
        sc.n_max = std::max(sc.n_max, s.n);
    }
    sc.t_min = data.grid.points.front();
    sc.t_max = data.grid.points.back();
    check_span(sc.v_min, sc.v_max, "V");
    check_span(sc.n_min, sc.n_max, "N");
    check_span(sc.t_min, sc.t_max, "t");
    return sc;
}

State normalize(const State& s, const Scaler& sc) {
    return State{to_unit(s.v, sc.v_min, sc.v_max),
                 to_unit(s.n, sc.n_min, sc.n_max)};
}

State denormalize(const State& s, const Scaler& sc) {
    return State{from_unit(s.v, sc.v_min, sc.v_max),
                 from_unit(s.n, sc.n_min, sc.n_max)};
}

double normalize_time(double t, const Scaler& sc) {
    return to_unit(t, sc.t_min, sc.t_max);
}

double denormalize_time(double t, const Scaler& sc) {
    return from_unit(t, sc.t_min, sc.t_max);
}

Trajectory normalize(const Trajectory& traj, const Scaler& sc) {
    Trajectory out;
    out.grid.points.reserve(traj.grid.points.size());
    out.states.reserve(traj.states.size());
    for (double t : traj.grid.points)
        out.grid.points.push_back(normalize_time(t, sc));
    for (const State& s : traj.states)
        out.states.push_back(normalize(s, sc));
    return out;
}

Trajectory denormalize(const Trajectory& traj, const Scaler& sc) {
    Trajectory out;
    out.grid.points.reserve(traj.grid.points.size());
    out.states.reserve(traj.states.size());
    for (double t : traj.grid.points)
        out.grid.points.push_back(denormalize_time(t, sc));
    for (const State& s : traj.states)
        out.states.push_back(denormalize(s, sc));
    return out;
}

const char* integrator_name(NodeIntegrator integrator) {
    return integrator == NodeIntegrator::Dopri5 ? "dopri5" : "rk4";
}

NodeIntegrator integrator_from_name(const std::string& name) {
    if (name == "dopri5")
        return NodeIntegrator::Dopri5;
    if (name == "rk4")
        return NodeIntegrator::Rk4Fixed;
    throw BadShape("unknown integrator: " + name);
}

Field net_field(const MlpNet& net) {
    check_field_net(net);
    // Capture by value: the Field may outlive the net it was built from.
    return [net](double, const State& y) {
        Mat x(1, 2);
        x(0, 0) = y.v;
        x(0, 1) = y.n;
        Mat out = forward(net, x);
        return State{out(0, 0), out(0, 1)};
    };
}

Trajectory node_forward(const MlpNet& net, const State& y0_scaled,
                        const TimeGrid& grid_scaled, NodeIntegrator integrator,
                        const SolverConfig& solver) {
    Field f = net_field(net);
    if (integrator == NodeIntegrator::Rk4Fixed)
        return rk4_fixed(f, y0_scaled, grid_scaled);
    return dopri5(f, y0_scaled, grid_scaled.points.front(),
                  grid_scaled.points.back(), solver, grid_scaled);
}

// --- tape-recorded solve --------------------------------------------------

namespace {

using ad::Tape;
using ad::Var;

// Current parameter values as a plain net, for the value-level probe pass of
// the adaptive integrator.
MlpNet snapshot(const Tape& tape, const TapeNet& tn) {
    MlpNet net;
    net.activation = tn.activation;
    net.layer_sizes.push_back(tape.value(tn.weights.front()).rows());
    for (std::size_t l = 0; l < tn.weights.size(); ++l) {
        const Mat& w = tape.value(tn.weights[l]);
        net.layer_sizes.push_back(w.cols());
        net.weights.push_back(w);
        net.biases.push_back(tape.value(tn.biases[l]));
    }
    return net;
}

Var state_constant(Tape& tape, const State& s) {
    Mat m(1, 2);
    m(0, 0) = s.v;
    m(0, 1) = s.n;
    return tape.constant(m);
}

// sum_i coeff_i * var_i folded left to right, matching the value-level
// solver's association so replayed values are bitwise identical.
Var lincomb(Tape& tape, std::initializer_list<std::pair<double, Var>> terms) {
    Var acc;
    for (const auto& [coeff, var] : terms) {
        Var scaled = tape.mul(var, tape.constant(coeff));
        acc = acc.valid() ? tape.add(acc, scaled) : scaled;
    }
    return acc;
}

std::vector<Var> tape_rk4(Tape& tape, const TapeNet& tn, const State& y0,
                          const TimeGrid& grid) {
    std::vector<Var> out;
    out.reserve(grid.points.size());
    Var y = state_constant(tape, y0);
    out.push_back(y);
    for (std::size_t i = 0; i + 1 < grid.points.size(); ++i) {
        double h = grid.points[i + 1] - grid.points[i];
        Var k1 = tape_forward(tn, y);
        Var k2 = tape_forward(tn, tape.add(y, tape.mul(k1, tape.constant(0.5 * h))));
        Var k3 = tape_forward(tn, tape.add(y, tape.mul(k2, tape.constant(0.5 * h))));
        Var k4 = tape_forward(tn, tape.add(y, tape.mul(k3, tape.constant(h))));
        Var s = lincomb(tape, {{1.0, k1}, {2.0, k2}, {2.0, k3}, {1.0, k4}});
        y = tape.add(y, tape.mul(s, tape.constant(h / 6.0)));
        out.push_back(y);
    }
    return out;
}

std::vector<Var> tape_dopri5(Tape& tape, const TapeNet& tn, const State& y0,
                             const TimeGrid& grid, const SolverConfig& solver) {
    using namespace dopri;
    double t0 = grid.points.front();
    double t1 = grid.points.back();

    // Probe: decide the accepted step sequence at the current parameter
    // values.  The replay below re-runs exactly these steps on the tape with
    // (t, h) held constant.
    MlpNet snap = snapshot(tape, tn);
    std::vector<DenseStep> steps =
        dopri5_steps(net_field(snap), y0, t0, t1, solver);

    std::vector<Var> out(grid.points.size());
    Var y0_var = state_constant(tape, y0);
    std::size_t gi = 0;
    // Grid points exactly at t0 take the initial condition directly.
    while (gi < grid.points.size() && grid.points[gi] == t0)
        out[gi++] = y0_var;

    Var y = y0_var;
    Var k1 = tape_forward(tn, y);
    for (std::size_t si = 0; si < steps.size(); ++si) {
        double h = steps[si].h;
        Var k2 = tape_forward(
            tn, tape.add(y, tape.mul(k1, tape.constant(h * a21))));
        Var k3 = tape_forward(
            tn, tape.add(y, tape.mul(lincomb(tape, {{a31, k1}, {a32, k2}}),
                                     tape.constant(h))));
        Var k4 = tape_forward(
            tn, tape.add(y, tape.mul(lincomb(tape, {{a41, k1}, {a42, k2}, {a43, k3}}),
                                     tape.constant(h))));
        Var k5 = tape_forward(
            tn, tape.add(y, tape.mul(lincomb(tape, {{a51, k1}, {a52, k2},
                                                    {a53, k3}, {a54, k4}}),
                                     tape.constant(h))));
        Var k6 = tape_forward(
            tn, tape.add(y, tape.mul(lincomb(tape, {{a61, k1}, {a62, k2}, {a63, k3},
                                                    {a64, k4}, {a65, k5}}),
                                     tape.constant(h))));
        Var y_new = tape.add(y, tape.mul(lincomb(tape, {{b1, k1}, {b3, k3}, {b4, k4},
                                                        {b5, k5}, {b6, k6}}),
                                         tape.constant(h)));
        Var k7 = tape_forward(tn, y_new);

        // Interpolate every grid point that falls inside this step, using the
        // same step-assignment rule as the value-level sampler.
        bool dense_built = false;
        Var c2v, c3v, c4v, c5v;
        while (gi < grid.points.size()) {
            double tg = grid.points[gi];
            if (si + 1 < steps.size() && steps[si].t_start + h < tg)
                break;
            if (!dense_built) {
                c2v = tape.sub(y_new, y);
                c3v = tape.sub(tape.mul(k1, tape.constant(h)), c2v);
                c4v = tape.sub(tape.sub(c2v, tape.mul(k7, tape.constant(h))), c3v);
                c5v = tape.mul(lincomb(tape, {{d1, k1}, {d3, k3}, {d4, k4},
                                              {d5, k5}, {d6, k6}, {d7, k7}}),
                               tape.constant(h));
                dense_built = true;
            }
            double theta = (tg - steps[si].t_start) / h;
            double theta1 = 1.0 - theta;
            Var inner = tape.add(c4v, tape.mul(c5v, tape.constant(theta1)));
            inner = tape.add(c3v, tape.mul(inner, tape.constant(theta)));
            inner = tape.add(c2v, tape.mul(inner, tape.constant(theta1)));
            out[gi++] = tape.add(y, tape.mul(inner, tape.constant(theta)));
        }
        y = y_new;
        k1 = k7; // first-same-as-last
    }
    if (gi != grid.points.size())
        throw BadShape("node solve: grid extends beyond the integration span");
    return out;
}

} // namespace

std::vector<Var> node_forward_tape(Tape& tape, const TapeNet& net,
                                   const State& y0_scaled,
                                   const TimeGrid& grid_scaled,
                                   NodeIntegrator integrator,
                                   const SolverConfig& solver) {
    if (net.weights.empty() || tape.value(net.weights.front()).rows() != 2 ||
        tape.value(net.weights.back()).cols() != 2)
        throw BadShape("neural-ODE field net must map 2 inputs to 2 outputs");
    if (grid_scaled.points.size() < 2)
        throw BadShape("node solve: need at least 2 grid points");
    if (integrator == NodeIntegrator::Rk4Fixed)
        return tape_rk4(tape, net, y0_scaled, grid_scaled);
    return tape_dopri5(tape, net, y0_scaled, grid_scaled, solver);
}

Trajectory predict_node(const MlpNet& net, const Scaler& sc, const State& y0,
                        const TimeGrid& grid, NodeIntegrator integrator,
                        const SolverConfig& solver) {
    TimeGrid scaled;
    scaled.points.reserve(grid.points.size());
    for (double t : grid.points)
        scaled.points.push_back(normalize_time(t, sc));
    Trajectory traj =
        node_forward(net, normalize(y0, sc), scaled, integrator, solver);
    Trajectory out;
    out.grid = grid; // keep the caller's physical grid bitwise
    out.states.reserve(traj.states.size());
    for (const State& s : traj.states)
        out.states.push_back(denormalize(s, sc));
    return out;
}

TrainResult train_node(const NodeConfig& cfg) {
    if (cfg.epochs <= 0)
        throw BadShape("train_node: epochs must be positive");
    if (!(cfg.lr >= 0.0))
        throw BadShape("train_node: negative learning rate");
    if (cfg.data.grid.points.size() < 2 ||
        cfg.data.states.size() != cfg.data.grid.points.size())
        throw BadShape("train_node: need a trajectory with at least 2 points");

    Scaler sc = fit_scaler(cfg.data);
    Trajectory scaled = normalize(cfg.data, sc);
    const State y0 = scaled.states.front();
    const int n = static_cast<int>(scaled.states.size());

    MlpNet net = cfg.fan_in_init
                     ? init_mlp_fan_in({2, 128, 128, 128, 2}, cfg.activation,
                                       cfg.seed)
                     : init_mlp({2, 128, 128, 128, 2}, cfg.activation, cfg.seed);
    AdamState adam = make_adam(net, cfg.lr);

    std::vector<Mat> targets;
    targets.reserve(n);
    for (const State& s : scaled.states) {
        Mat m(1, 2);
        m(0, 0) = s.v;
        m(0, 1) = s.n;
        targets.push_back(std::move(m));
    }

    TrainResult result;
    Tape tape;
    auto start = std::chrono::steady_clock::now();
    for (long epoch = 1; epoch <= cfg.epochs; ++epoch) {
        tape.reset();
        TapeNet tn = register_params(net, tape);
        std::vector<Var> traj = node_forward_tape(tape, tn, y0, scaled.grid,
                                                  cfg.integrator, cfg.solver);

        // MSE over all grid points and both channels, in scaled units.
        Var acc;
        for (int i = 0; i < n; ++i) {
            Var diff = tape.sub(traj[i], tape.constant(targets[i]));
            Var term = tape.sum(tape.square(diff));
            acc = acc.valid() ? tape.add(acc, term) : term;
        }
        Var loss = tape.mul(acc, tape.constant(1.0 / (2.0 * n)));

        double total = tape.value(loss)[0];
        if (!std::isfinite(total)) {
            std::ostringstream msg;
            msg << "train_node: non-finite loss at epoch " << epoch;
            throw NonFiniteLoss(msg.str());
        }
        if (epoch == 1 || epoch == cfg.epochs ||
            (cfg.log_every > 0 && epoch % cfg.log_every == 0)) {
            // Single-term objective: the data column mirrors the total and
            // the physics column is zero, keeping the history CSV schema
            // shared with the physics-regularized trainer.
            result.history.push_back(LossRecord{epoch, total, total, 0.0});
        }

        tape.backward(loss);
        std::vector<Mat> gw, gb;
        gw.reserve(tn.weights.size());
        gb.reserve(tn.biases.size());
        for (std::size_t l = 0; l < tn.weights.size(); ++l) {
            gw.push_back(tape.grad(tn.weights[l]));
            gb.push_back(tape.grad(tn.biases[l]));
        }
        adam_step(adam, net, gw, gb);
    }
    auto stop = std::chrono::steady_clock::now();
    result.wall_time_s = std::chrono::duration<double>(stop - start).count();
    result.net = std::move(net);
    return result;
}

Scaler node_scaler(const NodeConfig& cfg) { return fit_scaler(cfg.data); }

} // namespace mlb
