#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

namespace mlb {

// The 13 biophysical constants of one Morris-Lecar regime plus the applied
// current.  Units follow the conventional formulation: potentials in mV,
// conductances in mS/cm^2, capacitance in uF/cm^2, currents in uA/cm^2,
// time in ms.
struct MLParams {
    double c_m;   // membrane capacitance (uF/cm^2)
    double g_ca;  // calcium conductance (mS/cm^2)
    double g_k;   // potassium conductance (mS/cm^2)
    double g_l;   // leak conductance (mS/cm^2)
    double v_ca;  // calcium reversal potential (mV)
    double v_k;   // potassium reversal potential (mV)
    double v_l;   // leak reversal potential (mV)
    double v1;    // m_inf half-activation (mV)
    double v2;    // m_inf slope scale (mV)
    double v3;    // n_inf half-activation (mV)
    double v4;    // n_inf slope scale (mV)
    double phi;   // gating rate scale (1/ms)
    double i_ext; // applied current (uA/cm^2)
};

// Membrane potential (mV) and potassium gating variable (dimensionless).
// n is deliberately not clamped to [0,1]: model predictions may exit the
// unit interval and the analysis must see that.
struct State {
    double v;
    double n;
};

enum class Regime { Hopf, SNLC, Homoclinic };

enum class Stability {
    StableNode,
    StableFocus,
    UnstableNode,
    UnstableFocus,
    Saddle,
    Degenerate, // trace or determinant within 1e-12 of zero (includes centers)
};

// Row-major 2x2 real matrix: {j11, j12, j21, j22}, entries in 1/ms.
using Mat2 = std::array<double, 4>;

struct Classification {
    Stability stability;
    std::complex<double> lambda1;
    std::complex<double> lambda2;
};

struct Equilibrium {
    State state;
    Mat2 jacobian;
    std::complex<double> lambda1;
    std::complex<double> lambda2;
    Stability stability;
};

// Steady-state calcium activation: 0.5*(1 + tanh((v - v1)/v2)), in (0,1).
double m_inf(double v, const MLParams& p);

// Steady-state potassium activation: 0.5*(1 + tanh((v - v3)/v4)), in (0,1).
double n_inf(double v, const MLParams& p);

// Gating time-constant factor: 1/cosh((v - v3)/(2*v4)), in (0,1].
double tau_n(double v, const MLParams& p);

// Right-hand side of the Morris-Lecar system:
//   dv/dt = (-g_ca*m_inf(v)*(v-v_ca) - g_k*n*(v-v_k) - g_l*(v-v_l) + i_ext)/c_m
//   dn/dt = phi*(n_inf(v) - n)/tau_n(v)
State vector_field(const State& s, const MLParams& p);

// Exact Jacobian of vector_field at s.  At an equilibrium (n = n_inf(v)) the
// entries reduce to the textbook form; off equilibrium the (2,1) entry keeps
// the (n_inf - n) * d(1/tau_n)/dv term so the matrix always matches finite
// differences of vector_field.
Mat2 jacobian(const State& s, const MLParams& p);

// Eigenvalues via the closed-form 2x2 quadratic on trace/determinant.
// Saddle when Det < -1e-12 (hyperbolic whatever the trace); Degenerate when
// |Det| <= 1e-12 or |Tr| <= 1e-12 with Det > 0 (centers and collapsed
// eigenvalues); otherwise stable iff Tr < 0, node vs focus by the sign of
// Tr^2 - 4*Det.
Classification classify_equilibrium(const Mat2& j);

// Finds all equilibria with v in [v_lo, v_hi] by scanning the scalar current
// balance f(V) - i_ext on a uniform grid_n-point grid for sign changes, then
// bisecting each bracket to |dV| < 1e-10 mV and applying one Newton polish.
// N* = n_inf(V*).  Roots are returned sorted by V*.  Throws EmptyBracket if
// no sign change is found (the caller may widen the bracket); the default
// bracket [-100, 150] mV is guaranteed to contain at least one root for all
// three regimes at any i_ext in [0, 120].
std::vector<Equilibrium> find_equilibria(const MLParams& p,
                                         double v_lo = -100.0,
                                         double v_hi = 150.0,
                                         int grid_n = 2000);

// The Table 2 parameter column for a regime, with i_ext left at 0.
MLParams regime_params(Regime regime);

const char* regime_name(Regime regime);
Regime regime_from_name(const std::string& name);
const char* stability_name(Stability s);

} // namespace mlb
