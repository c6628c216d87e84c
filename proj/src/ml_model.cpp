#include "mlb/ml_model.hpp"

#include <cmath>

#include "mlb/error.hpp"

namespace mlb {

namespace {

// d m_inf/dv = sech^2((v - v1)/v2) / (2*v2), and the n_inf analogue.
double m_inf_prime(double v, const MLParams& p) {
    double s = 1.0 / std::cosh((v - p.v1) / p.v2);
    return s * s / (2.0 * p.v2);
}

double n_inf_prime(double v, const MLParams& p) {
    double s = 1.0 / std::cosh((v - p.v3) / p.v4);
    return s * s / (2.0 * p.v4);
}

// Net ionic current that must balance i_ext at an equilibrium with
// n = n_inf(v):  f(v) = g_ca*m_inf(v)*(v-v_ca) + g_k*n_inf(v)*(v-v_k)
//                       + g_l*(v-v_l).
double current_balance(double v, const MLParams& p) {
    return p.g_ca * m_inf(v, p) * (v - p.v_ca)
         + p.g_k * n_inf(v, p) * (v - p.v_k)
         + p.g_l * (v - p.v_l);
}

double current_balance_prime(double v, const MLParams& p) {
    return p.g_ca * (m_inf_prime(v, p) * (v - p.v_ca) + m_inf(v, p))
         + p.g_k * (n_inf_prime(v, p) * (v - p.v_k) + n_inf(v, p))
         + p.g_l;
}

Equilibrium make_equilibrium(double v_star, const MLParams& p) {
    Equilibrium eq;
    eq.state = State{v_star, n_inf(v_star, p)};
    eq.jacobian = jacobian(eq.state, p);
    Classification c = classify_equilibrium(eq.jacobian);
    eq.lambda1 = c.lambda1;
    eq.lambda2 = c.lambda2;
    eq.stability = c.stability;
    return eq;
}

} // namespace

double m_inf(double v, const MLParams& p) {
    return 0.5 * (1.0 + std::tanh((v - p.v1) / p.v2));
}

double n_inf(double v, const MLParams& p) {
    return 0.5 * (1.0 + std::tanh((v - p.v3) / p.v4));
}

double tau_n(double v, const MLParams& p) {
    return 1.0 / std::cosh((v - p.v3) / (2.0 * p.v4));
}

State vector_field(const State& s, const MLParams& p) {
    double dv = (-p.g_ca * m_inf(s.v, p) * (s.v - p.v_ca)
                 - p.g_k * s.n * (s.v - p.v_k)
                 - p.g_l * (s.v - p.v_l)
                 + p.i_ext) / p.c_m;
    double dn = p.phi * (n_inf(s.v, p) - s.n) / tau_n(s.v, p);
    return State{dv, dn};
}

Mat2 jacobian(const State& s, const MLParams& p) {
    double j11 = (-p.g_ca * m_inf_prime(s.v, p) * (s.v - p.v_ca)
                  - p.g_ca * m_inf(s.v, p)
                  - p.g_k * s.n
                  - p.g_l) / p.c_m;
    double j12 = -p.g_k * (s.v - p.v_k) / p.c_m;
    // dn/dt = phi*(n_inf(v) - n)*cosh(z), z = (v - v3)/(2*v4).  The second
    // term of j21 vanishes at equilibria where n = n_inf(v).
    double z = (s.v - p.v3) / (2.0 * p.v4);
    double j21 = p.phi * (n_inf_prime(s.v, p) * std::cosh(z)
                          + (n_inf(s.v, p) - s.n) * std::sinh(z) / (2.0 * p.v4));
    double j22 = -p.phi / tau_n(s.v, p);
    return Mat2{j11, j12, j21, j22};
}

Classification classify_equilibrium(const Mat2& j) {
    const double tol = 1e-12;
    double tr = j[0] + j[3];
    double det = j[0] * j[3] - j[1] * j[2];
    double disc = tr * tr - 4.0 * det;

    Classification c;
    if (disc >= 0.0) {
        double root = std::sqrt(disc);
        c.lambda1 = std::complex<double>(0.5 * (tr - root), 0.0);
        c.lambda2 = std::complex<double>(0.5 * (tr + root), 0.0);
    } else {
        double omega = 0.5 * std::sqrt(-disc);
        c.lambda1 = std::complex<double>(0.5 * tr, -omega);
        c.lambda2 = std::complex<double>(0.5 * tr, omega);
    }

    // A negative determinant means real eigenvalues of opposite sign -- a
    // hyperbolic saddle whatever the trace, so that test comes first.  With
    // det > 0 a vanishing trace puts the pair on the imaginary axis (a
    // center), and det ~ 0 collapses one eigenvalue; both are non-hyperbolic.
    if (det < -tol) {
        c.stability = Stability::Saddle;
    } else if (std::abs(det) <= tol || std::abs(tr) <= tol) {
        c.stability = Stability::Degenerate;
    } else if (disc >= 0.0) {
        c.stability = tr < 0.0 ? Stability::StableNode : Stability::UnstableNode;
    } else {
        c.stability = tr < 0.0 ? Stability::StableFocus : Stability::UnstableFocus;
    }
    return c;
}

std::vector<Equilibrium> find_equilibria(const MLParams& p, double v_lo,
                                         double v_hi, int grid_n) {
    if (!(v_lo < v_hi))
        throw EmptyBracket("find_equilibria: empty bracket");
    if (grid_n < 2)
        throw EmptyBracket("find_equilibria: need at least 2 grid points");

    auto g = [&](double v) { return current_balance(v, p) - p.i_ext; };

    std::vector<Equilibrium> out;
    double h = (v_hi - v_lo) / (grid_n - 1);
    double v_prev = v_lo;
    double g_prev = g(v_prev);
    for (int i = 1; i < grid_n; ++i) {
        double v_next = v_lo + i * h;
        double g_next = g(v_next);
        if (g_prev == 0.0) {
            out.push_back(make_equilibrium(v_prev, p));
        } else if (g_prev * g_next < 0.0) {
            // Bisection down to 1e-10 mV, then one Newton polish.
            double a = v_prev, b = v_next;
            double ga = g_prev;
            while (b - a > 1e-10) {
                double mid = 0.5 * (a + b);
                double gm = g(mid);
                if (gm == 0.0) {
                    a = b = mid;
                    break;
                }
                if (ga * gm < 0.0) {
                    b = mid;
                } else {
                    a = mid;
                    ga = gm;
                }
            }
            double v_star = 0.5 * (a + b);
            double slope = current_balance_prime(v_star, p);
            if (slope != 0.0)
                v_star -= g(v_star) / slope;
            out.push_back(make_equilibrium(v_star, p));
        }
        v_prev = v_next;
        g_prev = g_next;
    }
    if (g_prev == 0.0)
        out.push_back(make_equilibrium(v_prev, p));

    if (out.empty())
        throw EmptyBracket("find_equilibria: no sign change of f(V) - i_ext in bracket");
    return out;
}

MLParams regime_params(Regime regime) {
    // Shared column entries; phi/g_ca/v3/v4 vary per regime.
    MLParams p;
    p.c_m = 20.0;
    p.g_k = 8.0;
    p.g_l = 2.0;
    p.v_ca = 120.0;
    p.v_k = -84.0;
    p.v_l = -60.0;
    p.v1 = -1.2;
    p.v2 = 18.0;
    p.i_ext = 0.0;
    switch (regime) {
        case Regime::Hopf:
            p.phi = 0.04;
            p.g_ca = 4.4;
            p.v3 = 2.0;
            p.v4 = 30.0;
            break;
        case Regime::SNLC:
            p.phi = 0.067;
            p.g_ca = 4.0;
            p.v3 = 12.0;
            p.v4 = 17.4;
            break;
        case Regime::Homoclinic:
            p.phi = 0.23;
            p.g_ca = 4.0;
            p.v3 = 12.0;
            p.v4 = 17.4;
            break;
    }
    return p;
}

const char* regime_name(Regime regime) {
    switch (regime) {
        case Regime::Hopf: return "hopf";
        case Regime::SNLC: return "snlc";
        case Regime::Homoclinic: return "homoclinic";
    }
    return "?";
}

Regime regime_from_name(const std::string& name) {
    if (name == "hopf")
        return Regime::Hopf;
    if (name == "snlc")
        return Regime::SNLC;
    if (name == "homoclinic")
        return Regime::Homoclinic;
    throw BadShape("unknown regime: " + name);
}

const char* stability_name(Stability s) {
    switch (s) {
        case Stability::StableNode: return "stable node";
        case Stability::StableFocus: return "stable focus";
        case Stability::UnstableNode: return "unstable node";
        case Stability::UnstableFocus: return "unstable focus";
        case Stability::Saddle: return "saddle";
        case Stability::Degenerate: return "center/degenerate";
    }
    return "?";
}

} // namespace mlb
