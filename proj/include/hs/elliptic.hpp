#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "hs/grid.hpp"
#include "hs/positive_set.hpp"
#include "hs/report.hpp"

namespace hs {

struct EllipticConfig {
    double tol = 1e-8;        // residual <= tol * scale, scale = max(|f|, |bc|)
    long max_sweeps = 100000;
    double omega = 0.0;       // SOR relaxation; 0 = auto from grid size
    double theta_min = 0.05;  // cut arms clamped away from degenerate length
    int check_every = 8;
};

struct EllipticStats {
    long sweeps = 0;
    double residual = 0.0;
    double scale = 1.0;
    bool converged = false;
};

// Per-arm closure override: fraction in (0,1] of the arm from the unknown
// node at which a Dirichlet front point sits; <= 0 or NaN falls back to the
// cut/bc rules below.
using ArmTheta = std::function<double(std::size_t unknown_idx, int axis, int dir,
                                      std::size_t neighbor_idx)>;

// -Lap u = f on the `unknown` nodes. Stencil closure outside the mask:
//   * where `arm_theta` yields a positive fraction, a sub-grid Dirichlet
//     point at that fraction of the arm, value front_value(x);
//   * else where `cut` changes sign along an arm, the same at the
//     interpolated crossing (Shortley-Weller arm);
//   * otherwise a node Dirichlet value bc(x) at the neighbor position.
// `cut` is level-set style: negative on the unknown side.
struct PoissonProblem {
    const Grid* grid = nullptr;
    std::vector<std::uint8_t> unknown;
    std::vector<double> f;
    std::function<double(const Vec&)> bc;           // default 0
    std::function<double(const Vec&)> front_value;  // default 0
    const std::vector<double>* cut = nullptr;
    ArmTheta arm_theta;
    bool periodic_x = false;
};

// Compiled stencil, reusable across repeated solves on the same layout.
struct EllipticSystem {
    const Grid* grid = nullptr;
    std::vector<std::size_t> nodes;       // grid index per row
    std::vector<int> row_of;              // grid index -> row or -1
    std::vector<double> diag;
    std::vector<double> rhs;              // f + folded boundary terms
    std::vector<std::array<int, 6>> nb;   // row indices, -1 = none
    std::vector<std::array<double, 6>> coef;
    double scale = 1.0;
    double h = 1.0;

    std::size_t rows() const { return nodes.size(); }
};

EllipticSystem compile_system(const PoissonProblem& p, const EllipticConfig& cfg = {});

// SOR with warm start from the current contents of u. Returns stats; throws
// if the sweep cap is reached before the tolerance.
EllipticStats solve_dirichlet(const PoissonProblem& p, GridField& u, const EllipticConfig& cfg = {});
EllipticStats solve_compiled(const EllipticSystem& sys, GridField& u, const EllipticConfig& cfg = {});

// Projected SOR for the one-obstacle complementarity problem
//   u >= lower,  -Lap u >= f,  (u - lower) * (-Lap u - f) = 0.
EllipticStats solve_obstacle_lcp(const EllipticSystem& sys, GridField& u, double lower = 0.0,
                                 const EllipticConfig& cfg = {});

// Max |A u - f| over rows (equation units, i.e. f units).
double compiled_residual(const EllipticSystem& sys, const GridField& u);

// ---- superharmonic estimates -------------------------------------------

struct SuperharmonicConfig {
    double c_cap = 16.0;          // pass iff measured constants stay below
    double residual_cap = 1e-3;   // relative FD residual of -Lap w = f on B_2r
    std::optional<Vec> mu;        // directional variant: monotone direction
    double mono_tol = 1e-8;
};

// Measures the smallest constants in
//   sup_{B_r} w <= C (w(center) + r^2 sup_{B_2r} |f|)
//   sup_{B_r} |grad w| <= C (w(center)/r + r sup_{B_2r} |f|)
// after verifying -Lap w = f holds on B_2r.
DiagnosticsReport check_superharmonic_bounds(const GridField& w,
                                             const std::function<double(const Vec&)>& f,
                                             const Vec& center, double r,
                                             const SuperharmonicConfig& cfg = {});

// ---- strip comparison -----------------------------------------------------

struct StripSpec {
    std::function<double(double)> g;  // top graph x_d = g(x')
    double c_g = 0.0;                 // declared Lipschitz constant of g
    double L = 4.0;                   // lateral half-width
    double depth = 1.0;
    double h = 1.0 / 64;
    bool periodic_x = false;
};

struct StripResult {
    DiagnosticsReport report;
    GridField w1, w2;
    PositiveSet domain;
};

// Solves w1 (harmonic, 1 on the bottom graph, 0 elsewhere) and w2
// (-Lap w2 = f_const, 0 boundary) on the strip and reports
// R = sup w2/w1 over the lateral-interior region |x'| <= L-1.
StripResult strip_comparison(const StripSpec& spec, double f_const = 1.0,
                             double ratio_cap = 1e3, const EllipticConfig& cfg = {});

// Rescaled thin-strip ratio: solves a host solution omega on {x_d < g} with
// unit outer data, then w1/w2 on the depth-delta strip, and reports
// sup delta^(beta-2) * w2 * omega(probe) / (|f| * w1).
DiagnosticsReport strip_delta_ratio(const StripSpec& spec, double delta, double beta,
                                    double f_const, double ratio_cap = 1e3,
                                    const EllipticConfig& cfg = {});

}  // namespace hs
