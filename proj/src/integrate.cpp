#include "mlb/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mlb/error.hpp"

namespace mlb {

namespace {

bool finite(const State& s) {
    return std::isfinite(s.v) && std::isfinite(s.n);
}

void check_grid(const TimeGrid& grid, std::size_t min_points) {
    if (grid.points.size() < min_points)
        throw BadShape("time grid: too few points");
    for (std::size_t i = 0; i + 1 < grid.points.size(); ++i)
        if (!(grid.points[i] < grid.points[i + 1]))
            throw BadShape("time grid: not strictly increasing");
    for (double t : grid.points)
        if (!std::isfinite(t))
            throw BadShape("time grid: non-finite entry");
}

[[noreturn]] void throw_nonfinite(double t) {
    std::ostringstream msg;
    msg << "integration produced a non-finite state at t = " << t << " ms";
    throw NonFiniteState(msg.str());
}

State axpy(const State& y, double h, const State& k) {
    return State{y.v + h * k.v, y.n + h * k.n};
}

} // namespace

TimeGrid uniform_grid(double t0, double t1, int n) {
    if (n < 2)
        throw BadShape("uniform_grid: need at least 2 points");
    if (!(t0 < t1))
        throw BadShape("uniform_grid: need t0 < t1");
    TimeGrid grid;
    grid.points.resize(n);
    double h = (t1 - t0) / (n - 1);
    for (int i = 0; i < n; ++i)
        grid.points[i] = t0 + i * h;
    grid.points.back() = t1; // exact endpoint regardless of rounding
    return grid;
}

Trajectory rk4_fixed(const Field& field, const State& y0, const TimeGrid& grid) {
    check_grid(grid, 2);
    Trajectory traj;
    traj.grid = grid;
    traj.states.reserve(grid.points.size());
    traj.states.push_back(y0);
    State y = y0;
    for (std::size_t i = 0; i + 1 < grid.points.size(); ++i) {
        double t = grid.points[i];
        double h = grid.points[i + 1] - t;
        State k1 = field(t, y);
        State k2 = field(t + 0.5 * h, axpy(y, 0.5 * h, k1));
        State k3 = field(t + 0.5 * h, axpy(y, 0.5 * h, k2));
        State k4 = field(t + h, axpy(y, h, k3));
        y.v += h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
        y.n += h / 6.0 * (k1.n + 2.0 * k2.n + 2.0 * k3.n + k4.n);
        if (!finite(k1) || !finite(k2) || !finite(k3) || !finite(k4) || !finite(y))
            throw_nonfinite(t);
        traj.states.push_back(y);
    }
    return traj;
}

State dense_eval(const DenseStep& step, double t) {
    double lo = std::min(step.t_start, step.t_start + step.h);
    double hi = std::max(step.t_start, step.t_start + step.h);
    if (t < lo || t > hi)
        throw OutOfStepRange("dense_eval: time outside the recorded step");
    double theta = (t - step.t_start) / step.h;
    double theta1 = 1.0 - theta;
    auto horner = [&](double c1, double c2, double c3, double c4, double c5) {
        return c1 + theta * (c2 + theta1 * (c3 + theta * (c4 + theta1 * c5)));
    };
    return State{horner(step.c1.v, step.c2.v, step.c3.v, step.c4.v, step.c5.v),
                 horner(step.c1.n, step.c2.n, step.c3.n, step.c4.n, step.c5.n)};
}

std::vector<DenseStep> dopri5_steps(const Field& field, const State& y0,
                                    double t0, double t1,
                                    const SolverConfig& cfg) {
    using namespace dopri;
    if (!(t0 < t1))
        throw BadShape("dopri5: need t0 < t1");
    if (!(cfg.rtol > 0.0) || !(cfg.atol > 0.0))
        throw BadShape("dopri5: tolerances must be positive");
    if (cfg.max_steps <= 0)
        throw BadShape("dopri5: max_steps must be positive");

    double span = t1 - t0;
    double h = cfg.h_init > 0.0 ? cfg.h_init : span / 1000.0;
    double h_max = cfg.h_max > 0.0 ? cfg.h_max : span;
    h = std::min(h, h_max);

    std::vector<DenseStep> steps;
    double t = t0;
    State y = y0;
    State k1 = field(t, y);
    if (!finite(k1))
        throw_nonfinite(t);

    long n_attempts = 0;
    while (t < t1) {
        if (++n_attempts > cfg.max_steps)
            throw MaxStepsExceeded("dopri5: exceeded max_steps attempts");
        if (h < 1e-14 * span)
            throw StepUnderflow("dopri5: step size underflow");
        bool last = false;
        if (t + h >= t1) {
            h = t1 - t;
            last = true;
        }

        State k2 = field(t + c2 * h, axpy(y, h * a21, k1));
        State k3 = field(t + c3 * h,
                         State{y.v + h * (a31 * k1.v + a32 * k2.v),
                               y.n + h * (a31 * k1.n + a32 * k2.n)});
        State k4 = field(t + c4 * h,
                         State{y.v + h * (a41 * k1.v + a42 * k2.v + a43 * k3.v),
                               y.n + h * (a41 * k1.n + a42 * k2.n + a43 * k3.n)});
        State k5 = field(t + c5 * h,
                         State{y.v + h * (a51 * k1.v + a52 * k2.v + a53 * k3.v + a54 * k4.v),
                               y.n + h * (a51 * k1.n + a52 * k2.n + a53 * k3.n + a54 * k4.n)});
        State k6 = field(t + h,
                         State{y.v + h * (a61 * k1.v + a62 * k2.v + a63 * k3.v + a64 * k4.v + a65 * k5.v),
                               y.n + h * (a61 * k1.n + a62 * k2.n + a63 * k3.n + a64 * k4.n + a65 * k5.n)});
        State y_new{y.v + h * (b1 * k1.v + b3 * k3.v + b4 * k4.v + b5 * k5.v + b6 * k6.v),
                    y.n + h * (b1 * k1.n + b3 * k3.n + b4 * k4.n + b5 * k5.n + b6 * k6.n)};
        State k7 = field(t + h, y_new);
        if (!finite(k2) || !finite(k3) || !finite(k4) || !finite(k5) ||
            !finite(k6) || !finite(k7) || !finite(y_new))
            throw_nonfinite(t);

        State y4{y.v + h * (e1 * k1.v + e3 * k3.v + e4 * k4.v + e5 * k5.v + e6 * k6.v + e7 * k7.v),
                 y.n + h * (e1 * k1.n + e3 * k3.n + e4 * k4.n + e5 * k5.n + e6 * k6.n + e7 * k7.n)};
        auto comp_err = [&](double y5c, double y4c, double yc, double ync) {
            double scale = cfg.atol + cfg.rtol * std::max(std::abs(yc), std::abs(ync));
            return std::abs(y5c - y4c) / scale;
        };
        double err = std::max(comp_err(y_new.v, y4.v, y.v, y_new.v),
                              comp_err(y_new.n, y4.n, y.n, y_new.n));

        double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        factor = std::clamp(factor, 0.2, 5.0);

        if (err <= 1.0) {
            DenseStep step;
            step.t_start = t;
            step.h = h;
            step.y_end = y_new;
            step.c1 = y;
            step.c2 = State{y_new.v - y.v, y_new.n - y.n};
            step.c3 = State{h * k1.v - step.c2.v, h * k1.n - step.c2.n};
            step.c4 = State{step.c2.v - h * k7.v - step.c3.v,
                            step.c2.n - h * k7.n - step.c3.n};
            step.c5 = State{h * (d1 * k1.v + d3 * k3.v + d4 * k4.v + d5 * k5.v + d6 * k6.v + d7 * k7.v),
                            h * (d1 * k1.n + d3 * k3.n + d4 * k4.n + d5 * k5.n + d6 * k6.n + d7 * k7.n)};
            steps.push_back(step);
            t = last ? t1 : t + h;
            y = y_new;
            k1 = k7; // first-same-as-last
        }
        h = std::min(h * factor, h_max);
    }
    return steps;
}

Trajectory dopri5(const Field& field, const State& y0, double t0, double t1,
                  const SolverConfig& cfg, const TimeGrid& output_grid) {
    check_grid(output_grid, 1);
    if (output_grid.points.front() < t0 || output_grid.points.back() > t1)
        throw BadShape("dopri5: output grid extends beyond the integration span");

    std::vector<DenseStep> steps = dopri5_steps(field, y0, t0, t1, cfg);

    Trajectory traj;
    traj.grid = output_grid;
    traj.states.reserve(output_grid.points.size());
    std::size_t si = 0;
    for (double tg : output_grid.points) {
        if (tg == t0) {
            traj.states.push_back(y0);
            continue;
        }
        while (si + 1 < steps.size() && steps[si].t_start + steps[si].h < tg)
            ++si;
        traj.states.push_back(dense_eval(steps[si], tg));
    }
    return traj;
}

Field ml_field(const MLParams& p) {
    return [p](double, const State& y) { return vector_field(y, p); };
}

} // namespace mlb
