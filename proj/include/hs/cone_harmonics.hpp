#pragma once

#include <vector>

#include "hs/cone.hpp"
#include "hs/grid.hpp"

namespace hs {

// Plane closed forms linking the growth exponent beta of a cone-harmonic
// profile to the cone half-angles it tolerates.
struct ThetaPair {
    double theta_beta;        // pi / (2 beta)
    double theta_beta_prime;  // max(pi - pi/(2(2-beta)), 0)
};
ThetaPair theta_beta_closed_2d(double beta);

// First Dirichlet eigenvalue of the spherical cap of half-angle theta on
// S^{d-1}; d = 2 is the interval (closed form checkable), d = 3 uses a
// shooting solve of (sin t u')' + lambda sin t u = 0.
double cap_eigenvalue(double theta, int d, double tol = 1e-10);

// Homogeneity exponent of the positive harmonic on the solid cone:
// beta = (-(d-2) + sqrt((d-2)^2 + 4 lambda1)) / 2.
double beta_theta(double theta, int d, double tol = 1e-10);

// Samples the cone-harmonic profile on the grid: r^beta * profile(angle)
// inside the cone of half-angle theta around mu, zero outside. In the plane
// the profile is cos(beta * angle) exactly.
GridField cone_harmonic_field(double theta, const Grid& grid, const Vec& mu,
                              const Vec& vertex = {0, 0, 0});

struct ConeTableRow {
    double theta, lambda1, beta, theta_inverse_err;
};
std::vector<ConeTableRow> cone_table(const std::vector<double>& thetas, int d);

}  // namespace hs
