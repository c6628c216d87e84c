#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mlb/error.hpp"
#include "mlb/integrate.hpp"

#include <cmath>
#include <limits>

using namespace mlb;

namespace {

// dv/dt = v, dn/dt = -n: decoupled growth/decay with exact solution
// (v0*e^t, n0*e^-t).
const Field kGrowthDecay = [](double, const State& y) {
    return State{y.v, -y.n};
};

// Harmonic oscillator dv/dt = n, dn/dt = -v: circles v^2 + n^2 = const.
const Field kCircle = [](double, const State& y) {
    return State{y.n, -y.v};
};

} // namespace

TEST_CASE("uniform_grid spans exactly and validates input") {
    TimeGrid g = uniform_grid(0.0, 300.0, 501);
    REQUIRE(g.points.size() == 501);
    CHECK(g.points.front() == 0.0);
    CHECK(g.points.back() == 300.0);
    CHECK(g.points[1] == doctest::Approx(0.6).epsilon(1e-15));
    for (std::size_t i = 1; i < g.points.size(); ++i)
        CHECK(g.points[i] > g.points[i - 1]);
    CHECK_THROWS_AS(uniform_grid(0.0, 1.0, 1), BadShape);
    CHECK_THROWS_AS(uniform_grid(1.0, 1.0, 10), BadShape);
    CHECK_THROWS_AS(uniform_grid(2.0, 1.0, 10), BadShape);
}

TEST_CASE("rk4 single step on dv/dt = -v reproduces the truncated series") {
    // [DERIVED] one classical RK4 step of dy/dt = -y at h = 0.1 equals the
    // 4th-order Taylor polynomial 1 - h + h^2/2 - h^3/6 + h^4/24 = 0.9048375.
    Field decay = [](double, const State& y) { return State{-y.v, 0.0}; };
    TimeGrid g;
    g.points = {0.0, 0.1};
    Trajectory tr = rk4_fixed(decay, {1.0, 0.0}, g);
    REQUIRE(tr.states.size() == 2);
    CHECK(tr.states[0].v == 1.0); // y0 bitwise
    CHECK(tr.states[1].v == doctest::Approx(0.9048375).epsilon(1e-15));
}

TEST_CASE("rk4 global error scales as h^4") {
    // Halving h must cut the endpoint error by ~16x (ratio within [12, 20]
    // leaves room for the next Taylor term at this step size).
    auto endpoint_error = [&](int n) {
        Trajectory tr = rk4_fixed(kGrowthDecay, {1.0, 1.0}, uniform_grid(0.0, 2.0, n));
        return std::abs(tr.states.back().v - std::exp(2.0));
    };
    double coarse = endpoint_error(21);  // h = 0.1
    double fine = endpoint_error(41);    // h = 0.05
    double ratio = coarse / fine;
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("rk4 throws NonFiniteState when a stage blows up") {
    Field bad = [](double t, const State& y) {
        return t < 0.5 ? State{y.v, 0.0}
                       : State{std::numeric_limits<double>::quiet_NaN(), 0.0};
    };
    CHECK_THROWS_AS(rk4_fixed(bad, {1.0, 0.0}, uniform_grid(0.0, 1.0, 11)),
                    NonFiniteState);
}

TEST_CASE("dopri5 integrates e-growth to tolerance") {
    SolverConfig cfg;
    cfg.rtol = 1e-9;
    cfg.atol = 1e-12;
    Trajectory tr = dopri5(kGrowthDecay, {1.0, 1.0}, 0.0, 1.0, cfg,
                           uniform_grid(0.0, 1.0, 11));
    const double e = 2.718281828459045235; // [DERIVED]
    CHECK(std::abs(tr.states.back().v - e) < 1e-7);
    CHECK(std::abs(tr.states.back().n - 1.0 / e) < 1e-7);
    // Interior samples come from the dense interpolant; hold them to a
    // looser but still tight bound.
    for (std::size_t i = 0; i < tr.grid.points.size(); ++i) {
        double t = tr.grid.points[i];
        CHECK(std::abs(tr.states[i].v - std::exp(t)) < 1e-6);
        CHECK(std::abs(tr.states[i].n - std::exp(-t)) < 1e-6);
    }
}

TEST_CASE("dopri5 keeps the first state bitwise when the grid starts at t0") {
    SolverConfig cfg;
    // A y0 with no short binary representation: any arithmetic would
    // perturb the last bits.
    State y0{-26.123456789123456, 0.13579246801357924};
    Trajectory tr = dopri5(kCircle, y0, 0.0, 3.0, cfg, uniform_grid(0.0, 3.0, 7));
    CHECK(tr.states[0].v == y0.v);
    CHECK(tr.states[0].n == y0.n);
}

TEST_CASE("dopri5 conserves the oscillator radius over many periods") {
    SolverConfig cfg;
    cfg.rtol = 1e-9;
    cfg.atol = 1e-12;
    const double two_pi = 6.283185307179586477;
    Trajectory tr = dopri5(kCircle, {1.0, 0.0}, 0.0, 10.0 * two_pi, cfg,
                           uniform_grid(0.0, 10.0 * two_pi, 101));
    for (const State& s : tr.states)
        CHECK(std::abs(std::hypot(s.v, s.n) - 1.0) < 1e-6);
    // After ten full periods the state returns to the start.
    CHECK(tr.states.back().v == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(tr.states.back().n) < 1e-6);
}

TEST_CASE("dense steps tile the span and interpolate to the error scale") {
    SolverConfig cfg;
    cfg.rtol = 1e-6;
    cfg.atol = 1e-9;
    auto steps = dopri5_steps(kGrowthDecay, {1.0, 1.0}, 0.0, 2.0, cfg);
    REQUIRE(!steps.empty());
    CHECK(steps.front().t_start == 0.0);
    double prev_end = 0.0;
    for (const DenseStep& s : steps) {
        CHECK(s.t_start == doctest::Approx(prev_end).epsilon(1e-14));
        CHECK(s.h > 0.0);
        prev_end = s.t_start + s.h;
        // The interpolant agrees with the stored states at both step edges.
        State a = dense_eval(s, s.t_start);
        CHECK(a.v == doctest::Approx(s.c1.v).epsilon(1e-14));
        State b = dense_eval(s, s.t_start + s.h);
        CHECK(b.v == doctest::Approx(s.y_end.v).epsilon(1e-12));
        CHECK(b.n == doctest::Approx(s.y_end.n).epsilon(1e-12));
        // Mid-step value against the exact solution.
        double tm = s.t_start + 0.5 * s.h;
        State m = dense_eval(s, tm);
        CHECK(std::abs(m.v - std::exp(tm)) < 1e-5);
        CHECK(std::abs(m.n - std::exp(-tm)) < 1e-5);
    }
    CHECK(prev_end == doctest::Approx(2.0).epsilon(1e-14));
    CHECK_THROWS_AS(dense_eval(steps[0], steps[0].t_start + 2.0 * steps[0].h),
                    OutOfStepRange);
    CHECK_THROWS_AS(dense_eval(steps[0], steps[0].t_start - 1e-6), OutOfStepRange);
}

TEST_CASE("dopri5 input validation and failure taxonomy") {
    SolverConfig cfg;
    CHECK_THROWS_AS(dopri5_steps(kCircle, {1.0, 0.0}, 1.0, 1.0, cfg), BadShape);
    SolverConfig bad_tol;
    bad_tol.rtol = 0.0;
    CHECK_THROWS_AS(dopri5_steps(kCircle, {1.0, 0.0}, 0.0, 1.0, bad_tol), BadShape);
    SolverConfig capped;
    capped.max_steps = 3;
    CHECK_THROWS_AS(dopri5_steps(kCircle, {1.0, 0.0}, 0.0, 100.0, capped),
                    MaxStepsExceeded);
    Field nan_field = [](double, const State&) {
        return State{std::numeric_limits<double>::quiet_NaN(), 0.0};
    };
    CHECK_THROWS_AS(dopri5_steps(nan_field, {1.0, 0.0}, 0.0, 1.0, cfg),
                    NonFiniteState);
    // Output grid must stay inside the integration span.
    TimeGrid outside;
    outside.points = {0.0, 1.5};
    CHECK_THROWS_AS(dopri5(kCircle, {1.0, 0.0}, 0.0, 1.0, cfg, outside), BadShape);
}

TEST_CASE("adaptive and fixed-step solvers agree on a spiking trajectory") {
    // Cross-solver consistency on the actual neuron model: adaptive
    // Dormand-Prince at tight tolerance vs fixed RK4 on a fine grid, both
    // from the same off-attractor start.
    MLParams p = regime_params(Regime::Hopf);
    p.i_ext = 90.0;
    Field f = ml_field(p);
    State y0{-26.0, 0.13};
    const double t_end = 50.0;
    TimeGrid fine = uniform_grid(0.0, t_end, 20001); // h = 2.5e-3 ms
    Trajectory fixed = rk4_fixed(f, y0, fine);
    SolverConfig cfg;
    cfg.rtol = 1e-9;
    cfg.atol = 1e-12;
    Trajectory adaptive = dopri5(f, y0, 0.0, t_end, cfg, fine);
    double max_dv = 0.0, max_dn = 0.0;
    for (std::size_t i = 0; i < fine.points.size(); ++i) {
        max_dv = std::max(max_dv, std::abs(fixed.states[i].v - adaptive.states[i].v));
        max_dn = std::max(max_dn, std::abs(fixed.states[i].n - adaptive.states[i].n));
    }
    CHECK(max_dv < 0.01); // mV
    CHECK(max_dn < 1e-4);
}

TEST_CASE("integration is deterministic across reruns") {
    MLParams p = regime_params(Regime::Homoclinic);
    p.i_ext = 50.0;
    SolverConfig cfg;
    TimeGrid grid = uniform_grid(0.0, 100.0, 301);
    Trajectory a = dopri5(ml_field(p), {-20.0, 0.0}, 0.0, 100.0, cfg, grid);
    Trajectory b = dopri5(ml_field(p), {-20.0, 0.0}, 0.0, 100.0, cfg, grid);
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        CHECK(a.states[i].v == b.states[i].v); // bitwise
        CHECK(a.states[i].n == b.states[i].n);
    }
}
