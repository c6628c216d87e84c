#pragma once

#include <functional>
#include <vector>

#include "mlb/mat.hpp"

namespace mlb::ad {

// Handle into a Tape.  Invalid handles have idx < 0.
class Tape;
struct Var {
    Tape* tape = nullptr;
    int idx = -1;
    bool valid() const { return tape != nullptr && idx >= 0; }
};

enum class Op {
    Input,
    Constant,
    Add,
    Sub,
    Mul,
    Div,
    MatMul,
    Affine,
    Tanh,
    Silu,
    Sigmoid, // internal: Silu tangent rule
    Sinh,    // internal: Cosh tangent rule
    Cosh,
    Square,
    Mean,
    Sum,
    Concat,
    Slice,
};

// Reverse-mode computation record over dense row-major matrices, evaluated
// eagerly.  Elementwise binary ops accept equal shapes or a 1x1 scalar on
// either side; Affine adds a 1x128-style row bias; no other broadcasting.
//
// Forward-mode tangents: after seed_input_tangent, every op whose operands
// carry a tangent also records the tangent of its result *as ordinary tape
// nodes* (forward-over-reverse), so a loss assembled from tangent values
// (e.g. a physics residual containing dV/dt) backpropagates correctly into
// the parameters.  stop_tangents() ends propagation once the needed
// derivative has been extracted.
class Tape {
  public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    // Leaf registration.  Inputs participate in backward; constants do not.
    Var input(Mat value);
    Var constant(Mat value);
    Var constant(double value) { return constant(Mat::scalar(value)); }

    // Elementwise arithmetic (equal shapes or scalar operand).
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);
    Var div(Var a, Var b); // throws DivisionByZero on an exactly-zero divisor entry

    Var matmul(Var a, Var b);
    // x*w + row-broadcast bias.
    Var affine(Var x, Var w, Var b);

    Var tanh(Var x);
    Var silu(Var x);
    Var sigmoid(Var x);
    Var sinh(Var x);
    Var cosh(Var x);
    Var square(Var x);

    // Reductions over all entries, producing a 1x1 scalar.
    Var mean(Var x);
    Var sum(Var x);

    // Column-wise concatenation / column range [c0, c1).
    Var concat(Var a, Var b);
    Var slice(Var x, int c0, int c1);

    // Marks `direction` as the tangent of an input node and enables tangent
    // propagation for subsequently recorded ops.  Throws UnknownInput if v
    // is not an input of this tape.
    void seed_input_tangent(Var v, const Mat& direction);

    // Stops tangent propagation for ops recorded afterwards (already-built
    // tangent nodes remain on the tape and stay differentiable).
    void stop_tangents() { tangent_mode_ = false; }

    // Tangent of v as a first-class Var; invalid handle if v carries none.
    Var tangent(Var v) const;

    // Reverse sweep from a scalar loss.  Throws NoOutput / NonScalarOutput.
    void backward(Var loss);

    const Mat& value(Var v) const;
    // Adjoint accumulated by the last backward(); zeros if v never received one.
    Mat grad(Var v) const;

    // Clears all nodes (keeping allocation capacity) for the next iteration.
    void reset();

    std::size_t size() const { return nodes_.size(); }

  private:
    struct NodeRec {
        Op op;
        int a = -1;
        int b = -1;
        int c = -1;        // Affine bias operand
        int tangent = -1;  // node holding d(value)/d(seed), -1 if none
        int c0 = 0, c1 = 0; // Slice column range
        bool requires_grad = false;
        bool has_adjoint = false;
        Mat value;
        Mat adjoint;
        Mat aux; // Silu: cached sigmoid(x)
    };

    int push(NodeRec&& rec);
    Var handle(int idx) { return Var{this, idx}; }
    const NodeRec& at(Var v) const;
    void check_same_tape(Var v) const;
    // Builds the forward-mode tangent of the freshly recorded node `idx`
    // from its operands' tangents, unless tangent propagation is off or we
    // are already inside a tangent construction.
    void maybe_build_tangent(int idx);
    Var build_tangent(const NodeRec& rec, int idx);
    void accumulate(int parent, const Mat& contribution);

    std::vector<NodeRec> nodes_;
    bool tangent_mode_ = false;
    bool building_jvp_ = false;
};

// Operator sugar for residual algebra.  Scalars become constant nodes on the
// tape of the Var operand.
inline Var operator+(Var a, Var b) { return a.tape->add(a, b); }
inline Var operator-(Var a, Var b) { return a.tape->sub(a, b); }
inline Var operator*(Var a, Var b) { return a.tape->mul(a, b); }
inline Var operator/(Var a, Var b) { return a.tape->div(a, b); }
inline Var operator+(Var a, double b) { return a.tape->add(a, a.tape->constant(b)); }
inline Var operator+(double a, Var b) { return b.tape->add(b.tape->constant(a), b); }
inline Var operator-(Var a, double b) { return a.tape->sub(a, a.tape->constant(b)); }
inline Var operator-(double a, Var b) { return b.tape->sub(b.tape->constant(a), b); }
inline Var operator*(Var a, double b) { return a.tape->mul(a, a.tape->constant(b)); }
inline Var operator*(double a, Var b) { return b.tape->mul(b.tape->constant(a), b); }
inline Var operator/(Var a, double b) { return a.tape->div(a, a.tape->constant(b)); }
inline Var operator/(double a, Var b) { return b.tape->div(b.tape->constant(a), b); }
inline Var operator-(Var a) { return a.tape->mul(a, a.tape->constant(-1.0)); }
inline Var tanh(Var x) { return x.tape->tanh(x); }
inline Var silu(Var x) { return x.tape->silu(x); }
inline Var cosh(Var x) { return x.tape->cosh(x); }
inline Var square(Var x) { return x.tape->square(x); }
inline Var mean(Var x) { return x.tape->mean(x); }
inline Var sum(Var x) { return x.tape->sum(x); }

// Central-difference audit of reverse-mode gradients: probes n_probe random
// parameter coordinates (seeded PRNG), recomputes the loss at +/- h, and
// returns the worst relative error against `analytic_grads`, using
// max(|analytic|, |numeric|, 1e-12) as the denominator.  `loss_value` must
// evaluate the loss at the parameters' current contents.
double grad_check(const std::function<double()>& loss_value,
                  const std::vector<Mat*>& params,
                  const std::vector<Mat>& analytic_grads,
                  double h, int n_probe, unsigned long long seed);

} // namespace mlb::ad
