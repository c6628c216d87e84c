#pragma once

#include <string>
#include <vector>

#include "mlb/autodiff.hpp"
#include "mlb/mat.hpp"

namespace mlb {

enum class Activation { Tanh, Silu };

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);

// Fully connected network: affine -> activation repeated over the hidden
// layers, final affine linear.  Weights are [n_in x n_out] so a row batch
// propagates as x*W + b.
struct MlpNet {
    std::vector<int> layer_sizes;
    std::vector<Mat> weights;
    std::vector<Mat> biases;
    Activation activation = Activation::Tanh;
    unsigned long long seed = 0;
};

// Glorot-uniform weights (bound sqrt(6/(fan_in+fan_out))), zero biases.
// The uniform draw is hand-rolled from mt19937_64 ((x >> 11) * 2^-53) so the
// same seed gives bitwise-identical parameters on every platform.
MlpNet init_mlp(const std::vector<int>& layer_sizes, Activation activation,
                unsigned long long seed);

// Fan-in-scaled uniform initialization: weights AND biases drawn from
// U(-1/sqrt(n_in), 1/sqrt(n_in)) per layer.  The nonzero biases give units
// distinct operating points from the start, which matters inside small epoch
// budgets; same hand-rolled PRNG determinism as init_mlp.
MlpNet init_mlp_fan_in(const std::vector<int>& layer_sizes, Activation activation,
                       unsigned long long seed);

// init_mlp plus two deterministic adjustments for fitting a 1-D regression
// target over a wide input window [in_lo, in_hi] within a small epoch
// budget: first-layer units get slopes of magnitude up to sweep/(in_hi-in_lo)
// with transition centers spread uniformly over the window (plain Glorot
// leaves every tanh unit saturated across a [0, 300] ms input), and the
// output bias starts at the target mean (Adam at lr=1e-3 moves the output
// only ~1e-3 per parameter per step, so starting at zero spends most of the
// budget marching toward the data).  Same-seed determinism is preserved.
MlpNet init_mlp_for_regression(const std::vector<int>& layer_sizes,
                               Activation activation, unsigned long long seed,
                               double in_lo, double in_hi,
                               const std::vector<double>& out_mean,
                               double sweep = 6.0);

// Row-batch forward pass in plain arithmetic (no tape).
Mat forward(const MlpNet& net, const Mat& input);

// Replaces the output layer with a ridge least-squares fit of targets on the
// last hidden activations of `inputs`, leaving earlier layers untouched.  The
// ridge strength is lambda_rel times the mean diagonal of the Gram matrix
// H^T H, so damping tracks the activation scale.  Deterministic; used by the
// data-aware initialization so training starts from a smooth interpolant
// instead of spending the epoch budget marching the output toward the data
// scale.
void lsq_output_head(MlpNet& net, const Mat& inputs, const Mat& targets,
                     double lambda_rel = 1.0);

// params = sum of n_in*n_out + n_out per layer.
long param_count(const MlpNet& net);
// MACs = sum of n_in*n_out per layer (biases and activations excluded),
// the multiply-accumulate convention behind the FLOPs-per-inference figures.
long mac_count(const MlpNet& net);

// Network parameters registered on a tape as differentiable inputs.
struct TapeNet {
    std::vector<ad::Var> weights;
    std::vector<ad::Var> biases;
    Activation activation;
};

TapeNet register_params(const MlpNet& net, ad::Tape& tape);

// Forward pass recorded on the tape (same arithmetic as forward()).
ad::Var tape_forward(const TapeNet& tn, ad::Var input);

// Standard Adam with bias correction; beta1=0.9, beta2=0.999, eps=1e-8.
struct AdamState {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long t = 0;
    std::vector<Mat> m_w, v_w, m_b, v_b;
};

AdamState make_adam(const MlpNet& net, double lr);

// One optimizer step over all layers:
//   m <- b1*m + (1-b1)*g;  v <- b2*v + (1-b2)*g^2
//   theta <- theta - lr * (m/(1-b1^t)) / (sqrt(v/(1-b2^t)) + eps)
void adam_step(AdamState& state, MlpNet& net,
               const std::vector<Mat>& grad_w, const std::vector<Mat>& grad_b);

// Versioned little-endian binary checkpoint; layout in
// docs/checkpoint_format.md.
struct CheckpointMeta {
    std::string method;   // "pinn" | "node" | free-form tag
    unsigned long long epochs = 0;
};

void save_checkpoint(const MlpNet& net, const CheckpointMeta& meta,
                     const std::string& path);
MlpNet load_checkpoint(const std::string& path, CheckpointMeta* meta = nullptr);

} // namespace mlb
