#pragma once

#include <utility>
#include <vector>

#include "mlb/integrate.hpp"
#include "mlb/ml_model.hpp"
#include "mlb/training.hpp"

namespace mlb {

// Physics-informed training setup.  The network maps time (ms, raw physical
// units -- deliberately unnormalized) to (V_hat, N_hat); the loss is
// data MSE (mean over 2n squared errors) + residual MSE, unweighted.
struct PinnConfig {
    Regime regime = Regime::Hopf;
    double i_ext = 0.0;
    long epochs = 1;
    Trajectory data;            // ground-truth samples in physical units
    TimeGrid collocation;       // empty => the data grid itself (default)
    double lr = 1e-3;
    unsigned long long seed = 0;
    long log_every = 100;
    // Redraw collocation points uniformly at random each epoch instead of
    // holding the data grid (deterministic given seed).
    bool resample_collocation = false;
    // Start from the data-aware initialization (init_mlp_for_regression +
    // least-squares output head) instead of plain Glorot; required to reach
    // useful fits inside desk-scale epoch budgets.
    bool data_aware_init = true;
    // Ridge strength of the output-head fit, relative to the Gram diagonal
    // (see lsq_output_head).  Heavier damping trades initial data loss for a
    // head Adam can refine smoothly: 3.0 converged best of the settings
    // tried, 1.0 still works, and much lighter damping (1e-4 of the
    // diagonal) produces a head training cannot recover from.
    double head_lambda_rel = 3.0;
};

// Morris-Lecar residuals of the network prediction at each time:
//   f1 = c_m*dV/dt + g_ca*m_inf(V)(V - v_ca) + g_k*N(V - v_k) + g_l(V - v_l) - i_ext
//   f2 = dN/dt - phi*(n_inf(V) - N)/tau_n(V)
// with dV/dt, dN/dt from a seeded time tangent on the tape.
std::pair<std::vector<double>, std::vector<double>>
residuals(const MlpNet& net, const TimeGrid& t_batch, const MLParams& p);

struct PinnLossValue {
    double total;
    double data;
    double physics;
};

PinnLossValue pinn_loss(const MlpNet& net, const Trajectory& data,
                        const TimeGrid& collocation, const MLParams& p);

// Full-batch Adam for cfg.epochs.  History records total/data/physics at
// epoch 1, every log_every epochs, and the final epoch.  Deterministic given
// the seed.  Throws NonFiniteLoss (reporting the epoch) if the loss leaves
// the finite range.
TrainResult train_pinn(const PinnConfig& cfg);

} // namespace mlb
