#pragma once

#include <utility>
#include <vector>

#include "hs/evolution.hpp"
#include "hs/grid.hpp"
#include "hs/report.hpp"
#include "hs/streamline.hpp"

namespace hs {

// Shrinking-cone / cusp-formation fixture driven by a Hoelder (non-Lipschitz)
// drift of magnitude C0 |x_2|^{gamma0 - 1} along x_1.
struct CuspSpec {
    double C0 = 8.0;
    double gamma0 = 1.5;  // drift Hoelder exponent, in (1, 2)
    double gamma1 = 3.0;  // target cone exponent, > gamma0 (phase 2: > 2)
    double sigma() const { return 2.0 / gamma1; }
    double theta_at(double t) const;  // half-angle ladder from pi/(2 g0) to pi/(2 g1)
    double gamma_at(double t) const;  // pi / (2 theta_t)
    void validate_phase1() const;
    void validate_phase2() const;  // additionally sigma in (gamma0 - 1, 1)
};

// Closed-form front-condition margin on the shrinking cone, sampled over
// (r, t) in (0,1] x [0,1]. Pass iff the margin is non-negative everywhere at
// spec.C0; also bisects and reports the minimal admissible C0.
// Errors when no C0 <= 1e6 clears the margin.
DiagnosticsReport cusp_phase1_check(const CuspSpec& spec, int samples = 64);

// Cusp-stage front condition for t in {1.25, 1.5, 1.75}: harmonic solve in
// {x_1 > g(|x_2|, t)} within B_2 (outer data = the straight-cone profile,
// value normalized at (1/2, 0)), foot-point gradients on the wall, and the
// exact velocity/drift terms. Pass iff velocity >= drift + gradient at every
// sample. n is the inverse mesh width of the solve.
DiagnosticsReport cusp_phase2_check(const CuspSpec& spec, int samples = 24, int n = 128,
                                    GridField* phi_out = nullptr);

// Drift field whose sign convention matches the evolution law
// V = |grad u| - b.nu: it points toward the cone vertex so the lateral edges
// recede while material stretches along the axis.
DriftField cusp_drift(const CuspSpec& spec, double h_floor = 0.0);

// The containment experiment split into its run and its verdict, so the
// run can be archived: seed sector inside the initial cone, small fixed
// core, outer shell at rest.
EvolutionRun cusp_flow_run(const CuspSpec& spec, int n = 96, double t_end = 0.5, int frames = 8);
DiagnosticsReport cusp_containment_check(const CuspSpec& spec, const EvolutionRun& run);

// Simulated containment: seed a set strictly inside the t=0 cone (small
// Dirichlet core), evolve with the cusp drift, and check every stored frame
// stays inside the shrinking cone within 2h. Uses spec.C0 for the drift.
DiagnosticsReport cusp_containment_run(const CuspSpec& spec, int n = 96, double t_end = 0.5,
                                       int frames = 8);

// Compactly supported radial source bump: value delta^n on B_delta, smooth
// polynomial decay to zero across [delta, 2 delta].
double bump_profile(double r, double delta, int n);

// Radial solution table for -Lap phi1 = bump with phi1(1) = 0 (equivalently
// the log-potential of the bump up to that normalization): phi1' = -M(r)/r,
// M(r) = int_0^r s f(s) ds. err is a Richardson estimate of the quadrature
// error in phi1.
struct RadialPotential {
    double delta = 0.0;
    int n = 0;
    double m_inf = 0.0;     // total integral int s f(s) ds
    double err = 0.0;
    std::vector<double> r, val, mass;  // dense tables on [0, 2 delta]
    double value(double radius) const;
    double slope(double radius) const;  // d phi1 / dr = -M(r)/r
};
RadialPotential radial_bump_potential(double delta, int n);

struct PotentialBumpSpec {
    double delta = 1.0 / 1024;  // bump scale (direct construction)
    int n = 0;                  // bump amplitude exponent
    double theta = 0.26179938779914941;  // pi/12, cone half-angle of the checks
    double eps = -1.0;          // probe scale; <= 0 resolves to sqrt(delta)
    double alpha = 0.9;         // growth-defect exponent (second variant)
    double kappa = 0.95;        // plateau exponent (second variant)
    double resolved_eps() const;
    double e2_delta() const;    // eps^{(alpha + kappa + 1) / 2}
    void validate_e2() const;
};

// Bump source f plus potential phi = phi1 + 2 + delta^{n+1} x_1 / (2C) whose
// measured constant C makes both potential bounds hold:
//   sup_{B_2delta} |grad phi1| >= delta^{n+1} / C,
//   0 < phi1 <= C delta^{n+2} |ln delta|.
// The field is cone-monotone at probe scale eps = sqrt(delta) yet has
// grad_{x1} phi < 0 somewhere in B_2delta.
struct E3Field {
    GridField f, phi;
    double C = 0.0, C1 = 0.0, C2 = 0.0;
    double quad_err = 0.0;
    DiagnosticsReport construction;
};
E3Field make_e3_field(const PotentialBumpSpec& spec, const Grid& grid);
Grid e3_default_grid(const PotentialBumpSpec& spec);

// Small-amplitude variant phi = phi1 + delta (x_1 + 1) / (2C) + eps^kappa
// with delta = eps^{(alpha+kappa+1)/2}. Construction verifies, and throws
// listing the failing inequality otherwise:
//   eps^kappa <= phi <= 2 eps^kappa on the box,
//   the (eps, eps^alpha) cone check passes,
//   grad_{x1} phi changes sign.
struct E2Field {
    GridField phi;
    double C = 0.0, delta = 0.0, eps = 0.0;
    DiagnosticsReport construction;
};
E2Field make_e2_field(const PotentialBumpSpec& spec, const Grid& grid);
Grid e2_default_grid(const PotentialBumpSpec& spec);

}  // namespace hs
