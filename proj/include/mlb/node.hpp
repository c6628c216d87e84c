#pragma once

#include <string>
#include <vector>

#include "mlb/autodiff.hpp"
#include "mlb/integrate.hpp"
#include "mlb/mlp.hpp"
#include "mlb/training.hpp"

namespace mlb {

// Per-channel min-max ranges fitted on the training trajectory (physical
// units).  Normalization maps each channel's [min, max] linearly to [0, 1].
struct Scaler {
    double v_min = 0.0, v_max = 1.0;
    double n_min = 0.0, n_max = 1.0;
    double t_min = 0.0, t_max = 1.0;
};

// Channel ranges of a trajectory.  Throws DegenerateChannel if any channel
// spans less than 1e-12 in its own units.
Scaler fit_scaler(const Trajectory& data);

State normalize(const State& s, const Scaler& sc);
State denormalize(const State& s, const Scaler& sc);
double normalize_time(double t, const Scaler& sc);
double denormalize_time(double t, const Scaler& sc);
Trajectory normalize(const Trajectory& traj, const Scaler& sc);
Trajectory denormalize(const Trajectory& traj, const Scaler& sc);

enum class NodeIntegrator { Dopri5, Rk4Fixed };

const char* integrator_name(NodeIntegrator integrator);
NodeIntegrator integrator_from_name(const std::string& name);

// Default solver tolerances for training in scaled units (the scaled time
// span is [0, 1], so h_init = 0 resolves to 1e-3 there).
inline SolverConfig node_default_solver() {
    return SolverConfig{1e-4, 1e-6, 0.0, 0.0, 100000};
}

struct NodeConfig {
    Regime regime = Regime::Hopf; // recorded in reports; dynamics come from data
    double i_ext = 0.0;           // uA/cm^2, recorded in reports
    long epochs = 1;
    Trajectory data;              // physical units; grid doubles as eval grid
    double lr = 1e-3;
    unsigned long long seed = 0;
    Activation activation = Activation::Tanh;
    NodeIntegrator integrator = NodeIntegrator::Dopri5;
    SolverConfig solver = node_default_solver();
    long log_every = 100;
    // Draw weights AND biases from U(+-1/sqrt(fan_in)) instead of zero-bias
    // Glorot.  The nonzero biases stagger the units' operating points, which
    // measurably helps the field net escape the near-linear regime within
    // small epoch budgets.
    bool fan_in_init = true;
};

// The network as an autonomous vector field: f(t, y) = net([y.v, y.n]),
// time ignored.  Throws BadShape unless the net maps width 2 to width 2.
Field net_field(const MlpNet& net);

// Value-level forward solve in scaled coordinates: integrates
// dy/dt = net(y) from y0_scaled over grid_scaled.
Trajectory node_forward(const MlpNet& net, const State& y0_scaled,
                        const TimeGrid& grid_scaled, NodeIntegrator integrator,
                        const SolverConfig& solver);

// Tape-recorded counterpart of node_forward: every solver stage is a tape
// node, so backward() differentiates through the integrator
// (discretize-then-optimize).  For Dopri5 a value-level probe pass first
// decides the accepted step sequence; the replay then treats those step
// sizes as constants of the computation.  The replay mirrors the value
// solver's arithmetic exactly, so the returned per-grid-point 1x2 values
// are bitwise identical to node_forward on the same parameters.
// The probe reads the current parameter values out of `tape`, so call this
// after register_params and before any update.
std::vector<ad::Var> node_forward_tape(ad::Tape& tape, const TapeNet& net,
                                       const State& y0_scaled,
                                       const TimeGrid& grid_scaled,
                                       NodeIntegrator integrator,
                                       const SolverConfig& solver);

// Physical-unit prediction: normalize y0 and the grid with sc, solve the
// learned field in scaled coordinates, denormalize the result onto `grid`.
Trajectory predict_node(const MlpNet& net, const Scaler& sc, const State& y0,
                        const TimeGrid& grid, NodeIntegrator integrator,
                        const SolverConfig& solver);

// Trains the [2,128,128,128,2] field net against cfg.data: per epoch the
// data is normalized with the fitted Scaler, integrated from the scaled
// initial condition, and scored by MSE over all grid points and both
// channels (scaled units); one full-batch Adam update per epoch.
// Deterministic given cfg.seed.  Throws NonFiniteLoss with the epoch index.
TrainResult train_node(const NodeConfig& cfg);

// Scaler fitted on cfg.data (the one train_node uses internally); exposed so
// evaluation code can denormalize predictions consistently.
Scaler node_scaler(const NodeConfig& cfg);

} // namespace mlb
