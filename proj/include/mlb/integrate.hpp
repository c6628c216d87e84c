#pragma once

#include <functional>
#include <vector>

#include "mlb/ml_model.hpp"

namespace mlb {

// Strictly increasing sample times (ms).
struct TimeGrid {
    std::vector<double> points;
};

// n points uniformly spaced on [t0, t1], both endpoints included.
TimeGrid uniform_grid(double t0, double t1, int n);

// States aligned with a time grid.  All entries finite; integration failures
// throw instead of silently storing NaN.
struct Trajectory {
    TimeGrid grid;
    std::vector<State> states;
};

struct SolverConfig {
    double rtol = 1e-6;
    double atol = 1e-9;
    double h_init = 0.0;   // ms; <= 0 selects span/1000
    double h_max = 0.0;    // ms; <= 0 selects the full span
    long max_steps = 1000000;
};

using Field = std::function<State(double t, const State& y)>;

// One accepted Dormand-Prince step with its order-4 interpolant
// coefficients.  With theta = (t - t_start)/h and theta1 = 1 - theta the
// interpolant reads c1 + theta*(c2 + theta1*(c3 + theta*(c4 + theta1*c5))).
struct DenseStep {
    double t_start;
    double h;
    State y_end;
    State c1, c2, c3, c4, c5;
};

// Interpolant value at t, which must lie within [t_start, t_start + h]
// (throws OutOfStepRange otherwise).  Equals the stored endpoint states at
// the step boundaries to within roundoff.
State dense_eval(const DenseStep& step, double t);

// Classical fixed-step RK4 with one step per grid interval.
// trajectory[0] is y0 bitwise.  Throws NonFiniteState (with the offending
// time in the message) if any stage produces NaN/Inf.
Trajectory rk4_fixed(const Field& field, const State& y0, const TimeGrid& grid);

// Adaptive Dormand-Prince 5(4) driver over [t0, t1]: returns the accepted
// steps with dense-output coefficients.  Error control is per-step max-norm
// err = max_i |y5_i - y4_i| / (atol + rtol*max(|y_i|, |y_new_i|)), accepted
// when err <= 1, next step scaled by clamp(0.9*err^(-1/5), 0.2, 5.0).
std::vector<DenseStep> dopri5_steps(const Field& field, const State& y0,
                                    double t0, double t1,
                                    const SolverConfig& cfg);

// dopri5_steps followed by dense sampling onto output_grid (which must lie
// within [t0, t1]).  If the grid starts exactly at t0 the first state is y0
// bitwise.
Trajectory dopri5(const Field& field, const State& y0, double t0, double t1,
                  const SolverConfig& cfg, const TimeGrid& output_grid);

// Vector field of the Morris-Lecar model as an integrable callable.
Field ml_field(const MLParams& p);

// Dormand-Prince 5(4) tableau (shared with the tape-based solver used for
// neural-ODE training).  b5 are the 5th-order weights (also row 7 of a),
// b4 the embedded 4th-order weights, d the dense-output coefficients.
namespace dopri {
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0,
                        c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                        a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                        a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                        a65 = -5103.0 / 18656.0;
inline constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0,
                        b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                        b6 = 11.0 / 84.0;
inline constexpr double e1 = 5179.0 / 57600.0, e3 = 7571.0 / 16695.0,
                        e4 = 393.0 / 640.0, e5 = -92097.0 / 339200.0,
                        e6 = 187.0 / 2100.0, e7 = 1.0 / 40.0;
inline constexpr double d1 = -12715105075.0 / 11282082432.0,
                        d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0,
                        d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0,
                        d7 = 69997945.0 / 29380423.0;
} // namespace dopri

} // namespace mlb
