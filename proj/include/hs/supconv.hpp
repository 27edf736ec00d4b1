#pragma once

#include <functional>
#include <map>
#include <string>

#include "hs/elliptic.hpp"
#include "hs/grid.hpp"
#include "hs/positive_set.hpp"
#include "hs/report.hpp"

namespace hs {

// Variable sup-convolution radius phi(x, t) > 0 with analytic derivatives
// where the construction provides them, plus measured bounds.
struct RadiusField {
    std::function<double(const Vec&, double)> value;
    std::function<Vec(const Vec&, double)> grad;    // spatial; optional
    std::function<double(const Vec&, double)> lap;  // spatial; optional
    std::function<double(const Vec&, double)> dt;   // optional
    double grad_bound = 0.0;
    double dt_min = 0.0, dt_max = 0.0;
    DiagnosticsReport verification;
};

RadiusField constant_radius(double r);

// v(x) = max of interpolated u over the ball B_phi(x), sampled on an offset
// stencil of pitch <= h/2 (radii quantized to h/4, axis tips included).
// Throws if any ball leaves the grid box; the time slice is u.time.
GridField sup_convolve(const GridField& u, const RadiusField& phi);

// ---- admissible radius family --------------------------------------------

struct PhiEtaParams {
    double eps = 1.0 / 256;
    double kappa = 0.125;
    double gamma1 = 0.9;
    double gamma2 = 0.3;
    double A1 = 0.0;        // 0 = default 2 * dim
    double a2_cap = 64.0;   // measured constant must stay below
    double fail_frac = 1e-3;
    double tol = 1e-9;
};

// Radius family phi_eta on the slab {|front height - x_d| < 2 eps^gamma1}
// inside B_1, times (-T, T): equals 1 near the sphere and at early times,
// rises to ~1+eta deep inside at later times, with phi * Lap phi >=
// A1 |grad phi|^2 everywhere. The attached report verifies the bound pair,
// the differential inequality, both plateau regions, and the gradient and
// time-derivative caps; any of them failing at more than fail_frac of the
// sampled nodes throws.
RadiusField build_radius_phi_eta(double eta, const PhiEtaParams& p, const FrontGraph& slab,
                                 double T);

// ---- radial admissible profile --------------------------------------------

// Phi with Delta(Phi^(1-A0)) = 0 on the annulus sin(theta)/10 < |x| < 1,
// Phi = A_theta inside, Phi = sin(theta)/2 outside, A_theta raised until
// Phi(-e_d/5) >= 3. When no A_theta can reach 3 at the requested exponent
// (superharmonic minimum principle caps the achievable value), the profile
// exponent is lowered to the largest feasible value and reported.
struct PhiProfile {
    int d = 2;
    double theta = 0.0;
    double A0_requested = 0.0;
    double A0_effective = 0.0;
    double A_theta = 0.0;
    double coef_a = 0.0, coef_b = 0.0;  // psi = a + b ln r (d=2) or a + b r^(2-d)
    double r_inner = 0.0;
    DiagnosticsReport report;

    double psi(double rho) const;
    double value(double rho) const;
    double value(const Vec& x) const { return value(norm(x)); }
    double dvalue(double rho) const;  // d Phi / d rho
};

PhiProfile solve_phi_profile(double A0, double theta, int d);

// ---- barrier assembly ------------------------------------------------------

struct BarrierExponents {
    double kappa = 0, gamma1 = 0, iota = 0, gamma2 = 0;
    double alpha1 = 0, alpha2 = 0, gamma3 = 0;
};

// Exponent schedule derived from the growth exponent beta and the source
// Hoelder exponent; read-only by design.
BarrierExponents barrier_exponents(double beta, double gamma_bar);

struct BarrierParams {
    double eps = 1.0 / 32;
    double theta = 1.0;        // cone half-angle of u's monotonicity
    double beta = 1.5;
    double gamma_bar = 1.0;
    double sigma_factor = 0.5; // sup-convolution scale sigma = factor * eps
    double eta = -1.0;         // < 0: take the coupling relation value if usable
    double j = 0.9;            // comparison shift u(x - j eps e_d)
    double c_star = 0.05;
    double A1 = 0.0;           // 0 = default 2 * dim
    double f_sup = 0.0;        // sup |f|; w2 load is 1 + f_sup
    bool f_constant = true;    // constant source: the eps^(alpha+1) gain drops out
    double alpha = 0.1;        // used only when f_constant is false
    double lateral_guard = 0.1;
    EllipticConfig elliptic;
};

struct BarrierBundle {
    GridField v, w1, w2, vbar;
    BarrierExponents exps;
    std::map<std::string, double> params;  // exact coefficients used
    DiagnosticsReport ordering;            // vbar <= u(. - j eps e_d) on the strip
    DiagnosticsReport identity;            // stored vbar == recombination, bitwise
};

// Builds v = sup-convolution of u with radius sigma * phi_eta on the slab
// around `front`, solves the harmonic correction w1 (boundary data v on the
// slab bottom) and the source correction w2 (load 1 + f_sup, zero data),
// and combines vbar = (1+eps^(alpha+1)) v - eps^alpha2 w2 + c* eps^alpha1 w1.
BarrierBundle assemble_barrier(const GridField& u, const FrontGraph& front,
                               const BarrierParams& p);

}  // namespace hs
