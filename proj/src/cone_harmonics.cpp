#include "hs/cone_harmonics.hpp"

#include <cmath>
#include <stdexcept>

namespace hs {

ThetaPair theta_beta_closed_2d(double beta) {
    if (!(beta >= 1.0 && beta < 2.0)) throw std::invalid_argument("theta_beta_closed_2d: beta in [1,2)");
    ThetaPair tp;
    tp.theta_beta = M_PI / (2 * beta);
    tp.theta_beta_prime = std::max(M_PI - M_PI / (2 * (2 - beta)), 0.0);
    return tp;
}

namespace {

// Integrates u'' + (d-2) cot(t) u' + lambda u = 0 from a series start at
// t0 with u(0)=1, u'(0)=0, and returns u(theta). For d=2 the coefficient
// vanishes and the solution is cos(sqrt(lambda) t).
double shoot(double lambda, double theta, int d, int steps) {
    double t = 1e-3 * theta;
    double u, v;
    if (d == 2) {
        u = std::cos(std::sqrt(lambda) * t);
        v = -std::sqrt(lambda) * std::sin(std::sqrt(lambda) * t);
    } else {
        double a1 = -lambda / 4.0;
        double a2 = a1 * (2.0 / 3.0 - lambda) / 16.0;
        u = 1 + a1 * t * t + a2 * t * t * t * t;
        v = 2 * a1 * t + 4 * a2 * t * t * t;
    }
    auto rhs = [&](double tt, double uu, double vv, double& du, double& dv) {
        du = vv;
        double coeff = d == 2 ? 0.0 : std::cos(tt) / std::sin(tt);
        dv = -(d - 2) * coeff * vv - lambda * uu;
    };
    double hstep = (theta - t) / steps;
    for (int i = 0; i < steps; ++i) {
        double k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
        rhs(t, u, v, k1u, k1v);
        rhs(t + hstep / 2, u + hstep / 2 * k1u, v + hstep / 2 * k1v, k2u, k2v);
        rhs(t + hstep / 2, u + hstep / 2 * k2u, v + hstep / 2 * k2v, k3u, k3v);
        rhs(t + hstep, u + hstep * k3u, v + hstep * k3v, k4u, k4v);
        u += hstep / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
        v += hstep / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
        t += hstep;
    }
    return u;
}

}  // namespace

double cap_eigenvalue(double theta, int d, double tol) {
    if (!(theta > 0 && theta <= M_PI / 2 + 1e-12))
        throw std::invalid_argument("cap_eigenvalue: theta in (0, pi/2]");
    if (d != 2 && d != 3) throw std::invalid_argument("cap_eigenvalue: d must be 2 or 3");
    const int steps = 4000;
    double lo = 1e-6;
    if (shoot(lo, theta, d, steps) <= 0) throw std::runtime_error("cap_eigenvalue: bad lower bracket");
    // Grow the bracket gently from below: consecutive eigenvalues are
    // several times apart, so a 1.5x step cannot hop over the whole
    // negative interval past the first zero.
    double hi = 2e-6;
    int guard = 0;
    while (shoot(hi, theta, d, steps) > 0) {
        lo = hi;
        hi *= 1.5;
        if (++guard > 80) throw std::runtime_error("cap_eigenvalue: no sign change");
    }
    while (hi - lo > tol * std::max(1.0, hi)) {
        double mid = 0.5 * (lo + hi);
        (shoot(mid, theta, d, steps) > 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double beta_theta(double theta, int d, double tol) {
    double lam = cap_eigenvalue(theta, d, tol);
    double dm2 = d - 2;
    return (-dm2 + std::sqrt(dm2 * dm2 + 4 * lam)) / 2.0;
}

GridField cone_harmonic_field(double theta, const Grid& grid, const Vec& mu_in, const Vec& vertex) {
    Vec mu = normalized(mu_in);
    double beta = grid.dim == 2 ? M_PI / (2 * theta) : beta_theta(theta, 3, 1e-10);

    // Angular profile; for d=3 tabulate the shooting eigenfunction.
    std::vector<double> table;
    int tn = 2048;
    if (grid.dim == 3) {
        double lam = cap_eigenvalue(theta, 3, 1e-10);
        table.resize(tn + 1);
        // Re-integrate once and store u(angle) on a uniform table.
        double t = 1e-3 * theta;
        double a1 = -lam / 4.0, a2 = a1 * (2.0 / 3.0 - lam) / 16.0;
        double u = 1 + a1 * t * t + a2 * t * t * t * t;
        double v = 2 * a1 * t + 4 * a2 * t * t * t;
        int steps = 8192;
        double hstep = (theta - t) / steps;
        int fill = 0;
        auto rhs = [&](double tt, double uu, double vv, double& du, double& dv) {
            du = vv;
            dv = -std::cos(tt) / std::sin(tt) * vv - lam * uu;
        };
        for (int i = 0; i <= steps; ++i) {
            while (fill <= tn && double(fill) / tn * theta <= t + 1e-15) {
                table[fill] = u;
                ++fill;
            }
            if (i == steps) break;
            double k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
            rhs(t, u, v, k1u, k1v);
            rhs(t + hstep / 2, u + hstep / 2 * k1u, v + hstep / 2 * k1v, k2u, k2v);
            rhs(t + hstep / 2, u + hstep / 2 * k2u, v + hstep / 2 * k2v, k3u, k3v);
            rhs(t + hstep, u + hstep * k3u, v + hstep * k3v, k4u, k4v);
            u += hstep / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
            v += hstep / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
            t += hstep;
        }
        for (; fill <= tn; ++fill) table[fill] = 0.0;
        table[tn] = 0.0;
    }

    GridField f(grid);
    f.non_negative = true;
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        Vec p = grid.position(idx) - vertex;
        double r = norm(p);
        if (r == 0) { f.values[idx] = 0.0; continue; }
        double ca = std::clamp(dot(p, mu) / r, -1.0, 1.0);
        double ang = std::acos(ca);
        if (ang >= theta) { f.values[idx] = 0.0; continue; }
        double prof;
        if (grid.dim == 2) {
            prof = std::cos(beta * ang);
        } else {
            double s = ang / theta * tn;
            int i0 = std::min(int(s), tn - 1);
            prof = table[i0] + (s - i0) * (table[i0 + 1] - table[i0]);
        }
        f.values[idx] = std::pow(r, beta) * std::max(prof, 0.0);
    }
    return f;
}

std::vector<ConeTableRow> cone_table(const std::vector<double>& thetas, int d) {
    std::vector<ConeTableRow> rows;
    for (double th : thetas) {
        ConeTableRow r;
        r.theta = th;
        r.lambda1 = cap_eigenvalue(th, d);
        double dm2 = d - 2;
        r.beta = (-dm2 + std::sqrt(dm2 * dm2 + 4 * r.lambda1)) / 2.0;
        if (d == 2) {
            r.theta_inverse_err = std::abs(M_PI / (2 * r.beta) - th);
        } else {
            // Invert numerically: recompute beta at the claimed theta.
            r.theta_inverse_err = std::abs(beta_theta(th, d) - r.beta);
        }
        rows.push_back(r);
    }
    return rows;
}

}  // namespace hs
