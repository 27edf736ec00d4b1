#include "hs/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hs {

namespace {

double auto_omega(const Grid& g) {
    int n = std::max({g.extents[0], g.extents[1], g.extents[2]});
    double s = std::sin(M_PI / double(n));
    return 2.0 / (1.0 + s);
}

}  // namespace

EllipticSystem compile_system(const PoissonProblem& p, const EllipticConfig& cfg) {
    const Grid& g = *p.grid;
    EllipticSystem sys;
    sys.grid = p.grid;
    sys.h = g.h;
    sys.row_of.assign(g.size(), -1);
    for (std::size_t idx = 0; idx < g.size(); ++idx)
        if (p.unknown[idx]) {
            sys.row_of[idx] = int(sys.nodes.size());
            sys.nodes.push_back(idx);
        }
    std::size_t n = sys.nodes.size();
    if (n == 0) throw std::runtime_error("compile_system: empty unknown set");
    sys.diag.assign(n, 0.0);
    sys.rhs.assign(n, 0.0);
    sys.nb.assign(n, {-1, -1, -1, -1, -1, -1});
    sys.coef.assign(n, {0, 0, 0, 0, 0, 0});

    const double h = g.h;
    double bc_mag = 0.0, f_mag = 0.0;
    for (std::size_t row = 0; row < n; ++row) {
        std::size_t idx = sys.nodes[row];
        int ci, cj, ck;
        g.coords(idx, ci, cj, ck);
        int c[3] = {ci, cj, ck};
        double f_here = p.f.empty() ? 0.0 : p.f[idx];
        f_mag = std::max(f_mag, std::abs(f_here));
        sys.rhs[row] = f_here;
        double cut_here = p.cut ? (*p.cut)[idx] : -1.0;

        for (int a = 0; a < g.dim; ++a) {
            // Arm lengths and closures in the two directions of axis a.
            double arm[2];
            double bval[2];
            bool fixed[2];
            int nbrow[2];
            for (int s = 0; s < 2; ++s) {
                int step = s ? 1 : -1;
                int q[3] = {c[0], c[1], c[2]};
                q[a] += step;
                bool wrapped = false;
                if (p.periodic_x && a == 0) {
                    if (q[0] < 0) { q[0] = g.extents[0] - 1; wrapped = true; }
                    else if (q[0] >= g.extents[0]) { q[0] = 0; wrapped = true; }
                }
                if (!g.in_bounds(q[0], q[1], q[2])) {
                    // Box closure at distance h.
                    Vec pos = g.position(c[0], c[1], c[2]);
                    pos[a] += step * h;
                    arm[s] = 1.0;
                    bval[s] = p.bc ? p.bc(pos) : 0.0;
                    fixed[s] = true;
                    nbrow[s] = -1;
                    continue;
                }
                std::size_t qidx = g.index(q[0], q[1], q[2]);
                if (p.unknown[qidx]) {
                    arm[s] = 1.0;
                    bval[s] = 0.0;
                    fixed[s] = false;
                    nbrow[s] = sys.row_of[qidx];
                    (void)wrapped;
                    continue;
                }
                fixed[s] = true;
                nbrow[s] = -1;
                double th_override = p.arm_theta ? p.arm_theta(idx, a, step, qidx)
                                                 : std::numeric_limits<double>::quiet_NaN();
                double cut_q = p.cut ? (*p.cut)[qidx] : 1.0;
                if (th_override > 0.0) {
                    double th = std::clamp(th_override, cfg.theta_min, 1.0);
                    Vec pos = g.position(c[0], c[1], c[2]);
                    pos[a] += step * th * h;
                    arm[s] = th;
                    bval[s] = p.front_value ? p.front_value(pos) : 0.0;
                } else if (p.cut && cut_here < 0.0 && cut_q >= 0.0) {
                    double th = -cut_here / (cut_q - cut_here);
                    th = std::clamp(th, cfg.theta_min, 1.0);
                    Vec pos = g.position(c[0], c[1], c[2]);
                    pos[a] += step * th * h;
                    arm[s] = th;
                    bval[s] = p.front_value ? p.front_value(pos) : 0.0;
                } else {
                    arm[s] = 1.0;
                    bval[s] = p.bc ? p.bc(g.position(q[0], q[1], q[2])) : 0.0;
                }
            }
            // Shortley-Weller second difference with arms a- = arm[0]*h, a+ = arm[1]*h.
            double am = arm[0] * h, ap = arm[1] * h;
            double cm = 2.0 / (am * (am + ap));
            double cp = 2.0 / (ap * (am + ap));
            sys.diag[row] += cm + cp;
            if (fixed[0]) { sys.rhs[row] += cm * bval[0]; bc_mag = std::max(bc_mag, std::abs(bval[0])); }
            else { sys.nb[row][2 * a] = nbrow[0]; sys.coef[row][2 * a] = cm; }
            if (fixed[1]) { sys.rhs[row] += cp * bval[1]; bc_mag = std::max(bc_mag, std::abs(bval[1])); }
            else { sys.nb[row][2 * a + 1] = nbrow[1]; sys.coef[row][2 * a + 1] = cp; }
        }
    }
    sys.scale = std::max({f_mag, bc_mag, 1e-300});
    return sys;
}

double compiled_residual(const EllipticSystem& sys, const GridField& u) {
    double worst = 0.0;
    for (std::size_t row = 0; row < sys.rows(); ++row) {
        double acc = sys.rhs[row] - sys.diag[row] * u.values[sys.nodes[row]];
        for (int s = 0; s < 6; ++s) {
            int nb = sys.nb[row][s];
            if (nb >= 0) acc += sys.coef[row][s] * u.values[sys.nodes[nb]];
        }
        worst = std::max(worst, std::abs(acc));
    }
    return worst;
}

namespace {

template <bool Projected>
EllipticStats run_sor(const EllipticSystem& sys, GridField& u, double lower,
                      const EllipticConfig& cfg) {
    if (!u.grid.same_layout(*sys.grid)) throw std::invalid_argument("solve: grid mismatch");
    double omega = cfg.omega > 0 ? cfg.omega : auto_omega(*sys.grid);
    std::size_t n = sys.rows();
    std::vector<double> x(n);
    for (std::size_t row = 0; row < n; ++row) x[row] = u.values[sys.nodes[row]];
    if (Projected)
        for (double& v : x) v = std::max(v, lower);

    EllipticStats st;
    st.scale = sys.scale;
    double target = cfg.tol * sys.scale;
    long sweep = 0;
    while (sweep < cfg.max_sweeps) {
        for (std::size_t row = 0; row < n; ++row) {
            double acc = sys.rhs[row];
            const auto& nbs = sys.nb[row];
            const auto& cfs = sys.coef[row];
            for (int s = 0; s < 6; ++s)
                if (nbs[s] >= 0) acc += cfs[s] * x[nbs[s]];
            double gs = acc / sys.diag[row];
            double nv = x[row] + omega * (gs - x[row]);
            if (Projected) nv = std::max(nv, lower);
            x[row] = nv;
        }
        ++sweep;
        if (sweep % cfg.check_every == 0 || sweep == cfg.max_sweeps) {
            double worst = 0.0;
            for (std::size_t row = 0; row < n; ++row) {
                double acc = sys.rhs[row] - sys.diag[row] * x[row];
                for (int s = 0; s < 6; ++s)
                    if (sys.nb[row][s] >= 0) acc += sys.coef[row][s] * x[sys.nb[row][s]];
                if (Projected) {
                    // acc = f - A u. Feasibility needs A u >= f; where the
                    // iterate is off the obstacle the equation must hold.
                    double viol;
                    if (acc > 0) {
                        viol = acc;
                    } else {
                        double gap = (x[row] - lower) * sys.diag[row];
                        viol = std::min(-acc, std::max(gap, 0.0));
                    }
                    worst = std::max(worst, viol);
                } else {
                    worst = std::max(worst, std::abs(acc));
                }
            }
            st.residual = worst;
            if (worst <= target) {
                st.converged = true;
                break;
            }
        }
    }
    st.sweeps = sweep;
    for (std::size_t row = 0; row < n; ++row) u.values[sys.nodes[row]] = x[row];
    if (!st.converged) throw std::runtime_error("elliptic solve: sweep cap reached, residual " +
                                                std::to_string(st.residual));
    return st;
}

}  // namespace

EllipticStats solve_compiled(const EllipticSystem& sys, GridField& u, const EllipticConfig& cfg) {
    return run_sor<false>(sys, u, 0.0, cfg);
}

EllipticStats solve_dirichlet(const PoissonProblem& p, GridField& u, const EllipticConfig& cfg) {
    EllipticSystem sys = compile_system(p, cfg);
    return solve_compiled(sys, u, cfg);
}

EllipticStats solve_obstacle_lcp(const EllipticSystem& sys, GridField& u, double lower,
                                 const EllipticConfig& cfg) {
    return run_sor<true>(sys, u, lower, cfg);
}

}  // namespace hs
