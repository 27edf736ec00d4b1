#pragma once

#include <array>
#include <vector>

#include "hs/cone.hpp"
#include "hs/evolution.hpp"
#include "hs/grid.hpp"
#include "hs/positive_set.hpp"
#include "hs/report.hpp"
#include "hs/streamline.hpp"

namespace hs {

// Axis-aligned coordinate window restricting where probe centers live.
struct Window {
    Vec lo{0, 0, 0}, hi{0, 0, 0};

    bool contains(const Vec& x, int dim) const {
        for (int a = 0; a < dim; ++a)
            if (x[a] < lo[a] - 1e-12 || x[a] > hi[a] + 1e-12) return false;
        return true;
    }
    static Window ball_box(const Vec& center, double radius, int dim) {
        Window w;
        for (int a = 0; a < dim; ++a) {
            w.lo[a] = center[a] - radius;
            w.hi[a] = center[a] + radius;
        }
        return w;
    }
};

struct MonotoneQuery {
    Cone cone;
    double eps = 0.0;   // base scale, must be >= 4h
    double a = 0.0;     // defect: require (1 + a eps) w(x) <= ball min
    Window window;
    int ladder = 8;     // eps' = eps * 2^k rungs, clipped to the grid box
    double tol_rel = 1e-8;
};

// For every window node x and each resolvable rung eps', verifies
// (1 + a eps) w(x) <= min over the sampled ball B_{eps' sin theta}(x + eps' mu).
// Probes whose ball leaves the grid are skipped (counted); errors if nothing
// could be checked.
DiagnosticsReport check_eps_a_monotone(const GridField& field, const MonotoneQuery& q);

// Directional finite differences w(x + step p) - w(x) >= -tol for the cone
// axis, edge generators, and seeded interior directions. step < 0 uses 2h.
DiagnosticsReport check_full_monotone(const GridField& field, const Cone& cone,
                                      const Window& window, double step = -1.0,
                                      double tol_rel = 1e-8);

// Raw growth curve: for each distance s, the minimum field value at offset
// s mu from the refined front points. Non-positive or empty minima are
// dropped. Distances must be >= 4h.
std::vector<std::array<double, 2>> growth_curve(const GridField& field, const PositiveSet& pset,
                                                const Vec& mu,
                                                const std::vector<double>& distances);

// Fits log G(s) ~ log s on the growth curve. Errors with fewer than 4
// usable distances.
DiagnosticsReport fit_growth_exponent(const GridField& field, const PositiveSet& pset,
                                      const Vec& mu, const std::vector<double>& distances);

// C_hat = max over nodes with front distance in [d_lo, d_hi] of
// w / (|grad w| d); zero gradients in the band count as violations.
DiagnosticsReport check_gradient_distance(const GridField& field, const PositiveSet& pset,
                                          double d_lo, double d_hi, double c_cap = 16.0);

// Directional-derivative inequality at the nodes of B_eps(center):
//   grad_mu w >= eps^alpha (1 - C eps^kappa1) w - C eps^(1+gamma_bar-kappa1) f_sup.
// Requires (eps, eps^alpha)-monotonicity along mu on B_{eps^(1-kappa1)} first.
// alpha < 0 applies the "eps^inf = 0" convention for the monotone factor.
DiagnosticsReport check_interior_monotonicity(const GridField& field, double f_sup,
                                              const Vec& mu, double eps, double alpha,
                                              double kappa1, double gamma_bar = 1.0,
                                              double C = 1.0, const Vec& center = {0, 0, 0});

// Hull of the front graphs over the ladder t_k = t0 + k c_theta r^2 (heights
// interpolated between stored frames); lip_space is recomputed on the hull.
FrontGraph fit_front_lipschitz(const EvolutionRun& run, double r, int axis, int dir,
                               double c_theta = 1.0);

// Report wrapper: hull Lipschitz constants against cot(theta) and C_time/r.
DiagnosticsReport fit_front_lipschitz_report(const EvolutionRun& run, double r, int axis,
                                             int dir, double theta, double C_time,
                                             double c_theta = 1.0);

struct ConeImprovementConfig {
    double alpha = 1.0;   // defect exponent: a_k = eps_k^alpha
    double C = 1.0;       // half-angle correction constant
    double gamma3 = 0.05; // half-angle correction exponent
    double R0 = 0.5;      // initial window radius
    Vec center{0, 0, 0};
    int ladder = 4;       // rungs of the inner (eps, a) checker
};

// Scale ladder eps_k = j^k eps0 (stops at the 4h floor): each rung re-runs
// the cone checker on every stored frame over the shrunken window B_{R0 j^k}
// with half-angle theta0 - C sum_{n<k} (j^n eps0)^gamma3. Reports the last
// passing rung, the failure scale if it stalls, and the final full-monotone
// verdict.
DiagnosticsReport measure_cone_improvement(const EvolutionRun& run, double eps0, double j,
                                           const Cone& cone0,
                                           const ConeImprovementConfig& cfg = {});

// Largest dyadic r <= r_max with grad_{-e_d} w >= c_floor * w on the depth-r
// strip below the front graph. Precondition: the graph Lipschitz constant
// stays below the cone bound for this growth exponent.
DiagnosticsReport check_lipschitz_implies_cone(const GridField& field, const FrontGraph& front,
                                               double beta, double c_floor = 0.25,
                                               double r_max = 0.5);

// Checks e^(C0 t) u(X(t; x), t) is non-decreasing along sampled streamlines
// of dX/dt = -b(X); reports the violating pair fraction.
DiagnosticsReport check_hcondition(const EvolutionRun& run, const DriftField& drift, double C0,
                                   int max_samples = 256, double tol_rel = 1e-6);

// M_hat = max over front probes of delta^2 / (u(x1, t0) (T(x2) - t0)) with
// x1 inside and x2 outside at distance 0.75 delta from the front.
DiagnosticsReport carleson_check(const EvolutionRun& run, double delta, int axis, int dir,
                                 double m_cap = 64.0, double c_d = 4.0);

}  // namespace hs
