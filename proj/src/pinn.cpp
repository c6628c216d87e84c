#include "mlb/pinn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "mlb/autodiff.hpp"
#include "mlb/error.hpp"

namespace mlb {

namespace {

using ad::Tape;
using ad::Var;

Mat column(const std::vector<double>& v) {
    Mat m(static_cast<int>(v.size()), 1);
    for (std::size_t i = 0; i < v.size(); ++i)
        m[static_cast<int>(i)] = v[i];
    return m;
}

struct ResidualVars {
    Var out;   // [n x 2] network prediction
    Var f1;    // [n x 1] voltage-equation residual
    Var f2;    // [n x 1] gating-equation residual
};

// Network forward with a seeded time tangent, then the Eq.-residual algebra.
// Tangent propagation is stopped once dV/dt and dN/dt are extracted so the
// residual terms do not drag their own (unused) tangents along.
ResidualVars build_residuals(Tape& tape, const TapeNet& tn, const Mat& t_col,
                             const MLParams& p) {
    Var t_in = tape.input(t_col);
    tape.seed_input_tangent(t_in, Mat(t_col.rows(), 1, 1.0));
    Var out = tape_forward(tn, t_in);
    Var vhat = tape.slice(out, 0, 1);
    Var nhat = tape.slice(out, 1, 2);
    Var vdot = tape.tangent(vhat);
    Var ndot = tape.tangent(nhat);
    tape.stop_tangents();

    Var m = 0.5 * (1.0 + tanh((vhat - p.v1) / p.v2));
    Var ninf = 0.5 * (1.0 + tanh((vhat - p.v3) / p.v4));
    Var tau = 1.0 / cosh((vhat - p.v3) / (2.0 * p.v4));
    Var f1 = p.c_m * vdot + p.g_ca * m * (vhat - p.v_ca)
           + p.g_k * nhat * (vhat - p.v_k) + p.g_l * (vhat - p.v_l) - p.i_ext;
    Var f2 = ndot - p.phi * (ninf - nhat) / tau;
    return ResidualVars{out, f1, f2};
}

struct LossVars {
    Var total;
    Var data;
    Var physics;
};

// Shares one forward pass between the data and physics terms when the
// collocation grid is exactly the data grid.
LossVars build_loss(Tape& tape, const TapeNet& tn, const Trajectory& data,
                    const TimeGrid& collocation, const MLParams& p) {
    const int n = static_cast<int>(data.grid.points.size());
    Mat t_col(n, 1);
    Mat target(n, 2);
    for (int i = 0; i < n; ++i) {
        t_col(i, 0) = data.grid.points[i];
        target(i, 0) = data.states[i].v;
        target(i, 1) = data.states[i].n;
    }

    LossVars lv;
    if (collocation.points == data.grid.points) {
        ResidualVars rv = build_residuals(tape, tn, t_col, p);
        lv.data = mean(square(rv.out - tape.constant(target)));
        lv.physics = mean(square(rv.f1) + square(rv.f2));
    } else {
        ResidualVars rv = build_residuals(tape, tn, column(collocation.points), p);
        lv.physics = mean(square(rv.f1) + square(rv.f2));
        Var out_d = tape_forward(tn, tape.input(t_col));
        lv.data = mean(square(out_d - tape.constant(target)));
    }
    lv.total = lv.data + lv.physics;
    return lv;
}

} // namespace

std::pair<std::vector<double>, std::vector<double>>
residuals(const MlpNet& net, const TimeGrid& t_batch, const MLParams& p) {
    if (net.layer_sizes.front() != 1 || net.layer_sizes.back() != 2)
        throw BadShape("residuals: network must map 1 input to 2 outputs");
    Tape tape;
    TapeNet tn = register_params(net, tape);
    ResidualVars rv = build_residuals(tape, tn, column(t_batch.points), p);
    const Mat& v1 = tape.value(rv.f1);
    const Mat& v2 = tape.value(rv.f2);
    std::vector<double> f1(v1.data(), v1.data() + v1.size());
    std::vector<double> f2(v2.data(), v2.data() + v2.size());
    return {f1, f2};
}

PinnLossValue pinn_loss(const MlpNet& net, const Trajectory& data,
                        const TimeGrid& collocation, const MLParams& p) {
    Tape tape;
    TapeNet tn = register_params(net, tape);
    LossVars lv = build_loss(tape, tn, data, collocation, p);
    return PinnLossValue{tape.value(lv.total)[0], tape.value(lv.data)[0],
                         tape.value(lv.physics)[0]};
}

TrainResult train_pinn(const PinnConfig& cfg) {
    if (cfg.epochs <= 0)
        throw BadShape("train_pinn: epochs must be positive");
    if (!(cfg.lr >= 0.0))
        throw BadShape("train_pinn: negative learning rate");
    if (cfg.data.grid.points.size() < 2)
        throw BadShape("train_pinn: need at least 2 data points");

    MLParams p = regime_params(cfg.regime);
    p.i_ext = cfg.i_ext;

    TimeGrid collocation = cfg.collocation.points.empty() ? cfg.data.grid
                                                          : cfg.collocation;
    double t_lo = cfg.data.grid.points.front();
    double t_hi = cfg.data.grid.points.back();
    if (collocation.points.front() < t_lo || collocation.points.back() > t_hi)
        throw BadShape("train_pinn: collocation outside the data time span");

    const int n = static_cast<int>(cfg.data.grid.points.size());
    MlpNet net;
    if (cfg.data_aware_init) {
        double v_mean = 0.0, n_mean = 0.0;
        for (const State& s : cfg.data.states) {
            v_mean += s.v;
            n_mean += s.n;
        }
        v_mean /= n;
        n_mean /= n;
        net = init_mlp_for_regression({1, 128, 128, 128, 2}, Activation::Tanh,
                                      cfg.seed, t_lo, t_hi, {v_mean, n_mean});
        Mat t_col(n, 1);
        Mat target(n, 2);
        for (int i = 0; i < n; ++i) {
            t_col(i, 0) = cfg.data.grid.points[i];
            target(i, 0) = cfg.data.states[i].v;
            target(i, 1) = cfg.data.states[i].n;
        }
        lsq_output_head(net, t_col, target, cfg.head_lambda_rel);
    } else {
        net = init_mlp({1, 128, 128, 128, 2}, Activation::Tanh, cfg.seed);
    }

    AdamState adam = make_adam(net, cfg.lr);
    std::mt19937_64 resample_rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);

    TrainResult result;
    Tape tape;
    auto start = std::chrono::steady_clock::now();
    for (long epoch = 1; epoch <= cfg.epochs; ++epoch) {
        if (cfg.resample_collocation) {
            collocation.points.clear();
            collocation.points.reserve(cfg.data.grid.points.size());
            for (std::size_t i = 0; i < cfg.data.grid.points.size(); ++i) {
                double u = static_cast<double>(resample_rng() >> 11) * 0x1.0p-53;
                collocation.points.push_back(t_lo + (t_hi - t_lo) * u);
            }
            std::sort(collocation.points.begin(), collocation.points.end());
        }

        tape.reset();
        TapeNet tn = register_params(net, tape);
        LossVars lv = build_loss(tape, tn, cfg.data, collocation, p);
        double total = tape.value(lv.total)[0];
        if (!std::isfinite(total)) {
            std::ostringstream msg;
            msg << "train_pinn: non-finite loss at epoch " << epoch;
            throw NonFiniteLoss(msg.str());
        }
        if (epoch == 1 || epoch == cfg.epochs ||
            (cfg.log_every > 0 && epoch % cfg.log_every == 0)) {
            result.history.push_back(LossRecord{epoch, total,
                                               tape.value(lv.data)[0],
                                               tape.value(lv.physics)[0]});
        }

        tape.backward(lv.total);
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

} // namespace mlb
