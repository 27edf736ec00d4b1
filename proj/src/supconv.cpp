#include "hs/supconv.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hs {

namespace {

void require_ball_inside(const Grid& g, const Vec& x, double rad) {
    for (int a = 0; a < g.dim; ++a) {
        double lo = g.origin[a], hi = g.origin[a] + g.h * (g.extents[a] - 1);
        if (x[a] - rad < lo - 1e-9 * g.h || x[a] + rad > hi + 1e-9 * g.h) {
            std::ostringstream os;
            os << "sup_convolve: ball of radius " << rad << " at (" << x[0] << ", " << x[1]
               << ", " << x[2] << ") leaves the grid box";
            throw std::runtime_error(os.str());
        }
    }
}

// With `strict` the ball must stay inside the box; otherwise samples are
// clipped to the box faces (the interpolant clamps), which is exact for
// fields constant along the clipped directions.
GridField sup_convolve_masked(const GridField& u, const RadiusField& phi,
                              const std::vector<std::uint8_t>* mask, bool strict) {
    u.validate();
    const Grid& g = u.grid;
    GridField v = u;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        if (mask && !(*mask)[idx]) continue;
        Vec x = g.position(idx);
        double rad = phi.value(x, u.time);
        if (!(rad >= 0.0)) throw std::runtime_error("sup_convolve: negative or NaN radius");
        if (strict) require_ball_inside(g, x, rad);
        v.values[idx] = ball_max(u, x, rad);
    }
    return v;
}

// ---- phi_eta internals -----------------------------------------------------

// psi = 1 - chi(t) B(l) q(x_d), l = distance to the unit sphere; the radius is
// phi = psi^(1/(1-A1)). B ramps 0 -> 1 over the shell l in [a, 2a], q is a
// cosh carrier along the slab axis, chi ramps 0 -> 1 in time near -T.
struct PhiEtaCore {
    int dim = 2, axis = 1;
    double a = 0.0, k = 0.0, m = 0.0, cq = 0.0;
    double pexp = 0.0, A1 = 0.0, eta = 0.0;
    double t0 = 0.0, t1 = 0.0;  // time ramp

    double chi(double t) const {
        if (t <= t0) return 0.0;
        if (t >= t1) return 1.0;
        double s = (t - t0) / (t1 - t0);
        return s * s * (3.0 - 2.0 * s);
    }
    double chip(double t) const {
        if (t <= t0 || t >= t1) return 0.0;
        double s = (t - t0) / (t1 - t0);
        return 6.0 * s * (1.0 - s) / (t1 - t0);
    }
    double B(double l) const {
        if (l <= a) return 0.0;
        if (l >= 2.0 * a) return 1.0;
        double s = (l - a) / a;
        return s <= 0.5 ? 2.0 * s * s : 1.0 - 2.0 * (1.0 - s) * (1.0 - s);
    }
    double Bp(double l) const {
        if (l <= a || l >= 2.0 * a) return 0.0;
        double s = (l - a) / a;
        return s <= 0.5 ? 4.0 * s / a : 4.0 * (1.0 - s) / a;
    }
    double Bpp(double l) const {
        if (l <= a || l >= 2.0 * a) return 0.0;
        double s = (l - a) / a;
        return s <= 0.5 ? 4.0 / (a * a) : -4.0 / (a * a);
    }

    struct Eval {
        double phi, lap, dt;
        Vec grad;
    };

    Eval eval(const Vec& x, double t) const {
        double rr = norm(x);
        double l = 1.0 - rr;
        double b = B(l), bp = Bp(l), bpp = Bpp(l);
        double q = cq * std::cosh(k * (x[axis] - m));
        double qp = cq * k * std::sinh(k * (x[axis] - m));
        double qpp = k * k * q;
        Vec gl{0, 0, 0};
        double lapl = 0.0;
        if (rr > 1e-14) {
            for (int a2 = 0; a2 < dim; ++a2) gl[a2] = -x[a2] / rr;
            lapl = -double(dim - 1) / rr;
        }
        double G = b * q;
        Vec gG{0, 0, 0};
        for (int a2 = 0; a2 < dim; ++a2) gG[a2] = bp * q * gl[a2];
        gG[axis] += b * qp;
        double lapG = (bpp + bp * lapl) * q + 2.0 * bp * qp * gl[axis] + b * qpp;

        double c = chi(t);
        double psi = 1.0 - c * G;
        if (!(psi > 0.0)) throw std::runtime_error("phi_eta: radius profile left its range");
        Vec gpsi{0, 0, 0};
        for (int a2 = 0; a2 < dim; ++a2) gpsi[a2] = -c * gG[a2];
        double lappsi = -c * lapG;
        double dtpsi = -chip(t) * G;

        double w = pexp * std::pow(psi, pexp - 1.0);
        Eval e;
        e.phi = std::pow(psi, pexp);
        for (int a2 = 0; a2 < dim; ++a2) e.grad[a2] = w * gpsi[a2];
        e.grad[2] = dim == 3 ? e.grad[2] : 0.0;
        e.lap = w * lappsi + pexp * (pexp - 1.0) * std::pow(psi, pexp - 2.0) * dot(gpsi, gpsi);
        e.dt = w * dtpsi;
        return e;
    }
};

std::string fmt_point(const Vec& x, double t) {
    std::ostringstream os;
    os << "(" << x[0] << ", " << x[1] << ", " << x[2] << "), t=" << t;
    return os.str();
}

}  // namespace

RadiusField constant_radius(double r) {
    if (!(r >= 0.0)) throw std::invalid_argument("constant_radius: r must be >= 0");
    RadiusField f;
    f.value = [r](const Vec&, double) { return r; };
    f.grad = [](const Vec&, double) { return Vec{0, 0, 0}; };
    f.lap = [](const Vec&, double) { return 0.0; };
    f.dt = [](const Vec&, double) { return 0.0; };
    f.verification.name = "constant_radius";
    f.verification.pass = true;
    f.verification.config["radius"] = r;
    return f;
}

GridField sup_convolve(const GridField& u, const RadiusField& phi) {
    return sup_convolve_masked(u, phi, nullptr, true);
}

RadiusField build_radius_phi_eta(double eta, const PhiEtaParams& p, const FrontGraph& slab,
                                 double T) {
    const Grid& g = slab.grid;
    int d = g.dim;
    double A1 = p.A1 > 0.0 ? p.A1 : 2.0 * d;
    if (!(A1 > 1.0)) throw std::invalid_argument("phi_eta: A1 must exceed 1");
    if (!(eta >= 0.0)) throw std::invalid_argument("phi_eta: eta must be >= 0");
    if (!(p.gamma1 - p.gamma2 > 4.0 * p.kappa - 1e-12))
        throw std::invalid_argument("phi_eta: needs gamma1 - gamma2 > 4 kappa");

    PhiEtaCore core;
    core.dim = d;
    core.axis = slab.axis;
    core.a = 0.5 * std::pow(p.eps, p.kappa);
    if (2.0 * core.a > 0.9)
        throw std::invalid_argument("phi_eta: ramp shell too thick (eps^kappa too large)");
    core.k = 4.0 / core.a;
    core.A1 = A1;
    core.eta = eta;
    core.pexp = 1.0 / (1.0 - A1);

    double r = std::pow(p.eps, p.gamma1);
    double hmin = std::numeric_limits<double>::max(), hmax = -hmin;
    for (std::size_t c = 0; c < slab.column_count(); ++c)
        if (slab.has(c)) {
            hmin = std::min(hmin, slab.height[c]);
            hmax = std::max(hmax, slab.height[c]);
        }
    if (hmin > hmax) throw std::invalid_argument("phi_eta: slab graph has no columns");
    core.m = 0.5 * (hmin + hmax);
    double span = 0.5 * (hmax - hmin) + 2.0 * r;
    double gmax = 1.0 - std::pow(1.0 + eta, 1.0 - A1);
    core.cq = gmax / std::cosh(core.k * span);

    double W = std::pow(p.eps, 4.0 * p.kappa);
    if (!(T > 2.5 * W)) throw std::invalid_argument("phi_eta: time window too short for the ramp");
    core.t0 = -T + W;
    core.t1 = -T + 2.0 * W;

    // Node verification over the slab and a time ladder spanning the ramp.
    std::vector<double> times = {-T * (1.0 - 1e-12), core.t0,        core.t0 + 0.25 * W,
                                 core.t0 + 0.5 * W,  core.t0 + 0.75 * W, core.t1,
                                 core.t1 + W,        -T / 2.0,       0.0,
                                 T / 2.0,            T * (1.0 - 1e-12)};
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    long n_nodes = 0, viol_range = 0, viol_diff = 0, viol_plateau = 0;
    double min_deep = std::numeric_limits<double>::max();
    bool deep_seen = false;
    double max_grad = 0.0, dt_lo = 0.0, dt_hi = 0.0;
    double worst_margin = std::numeric_limits<double>::max();
    Vec worst_x{0, 0, 0};
    double worst_t = 0.0;
    double dz = std::min(g.h, r / 4.0);
    double range_tol = 1e-9 * (1.0 + eta);

    for (std::size_t c = 0; c < slab.column_count(); ++c) {
        if (!slab.has(c)) continue;
        Vec fp = slab.front_point(c);
        for (double z = fp[core.axis] - 2.0 * r; z <= fp[core.axis] + 2.0 * r + 1e-12 * dz;
             z += dz) {
            Vec x = fp;
            x[core.axis] = z;
            if (norm(x) >= 1.0 - 1e-12) continue;
            for (std::size_t ti = 0; ti < times.size(); ++ti) {
                double t = times[ti];
                if (!(t > -T && t < T)) continue;
                PhiEtaCore::Eval e = core.eval(x, t);
                ++n_nodes;
                if (e.phi < 1.0 - range_tol || e.phi > 1.0 + eta + range_tol) ++viol_range;
                double gg = dot(e.grad, e.grad);
                double margin = e.phi * e.lap - A1 * gg;
                double scale = std::max(1.0, A1 * gg + std::abs(e.phi * e.lap));
                if (margin < -p.tol * scale) ++viol_diff;
                if (margin < worst_margin) {
                    worst_margin = margin;
                    worst_x = x;
                    worst_t = t;
                }
                if (n_nodes % 97 == 0) {
                    // Cross-check the analytic Laplacian and time derivative
                    // against centered differences of the value formula.
                    double step = std::min(core.a, r) / 64.0;
                    double lap_fd = 0.0;
                    for (int a2 = 0; a2 < d; ++a2) {
                        Vec xp = x, xm = x;
                        xp[a2] += step;
                        xm[a2] -= step;
                        lap_fd += core.eval(xp, t).phi - 2.0 * e.phi + core.eval(xm, t).phi;
                    }
                    lap_fd /= step * step;
                    if (std::abs(lap_fd - e.lap) > 2e-2 * (1.0 + std::abs(e.lap))) ++viol_diff;
                    double tstep = W / 256.0;
                    if (t - tstep > -T && t + tstep < T) {
                        double dt_fd = (core.eval(x, t + tstep).phi - core.eval(x, t - tstep).phi) /
                                       (2.0 * tstep);
                        if (std::abs(dt_fd - e.dt) > 2e-2 * (1.0 + std::abs(e.dt))) ++viol_diff;
                    }
                }
                double l = 1.0 - norm(x);
                bool near_sphere = l <= core.a + 1e-12;
                bool early = t <= core.t0 + 1e-15;
                if ((near_sphere || early) && std::abs(e.phi - 1.0) > 1e-12) ++viol_plateau;
                if (l >= 2.0 * core.a - 1e-12 && t >= core.t1 - 1e-15) {
                    deep_seen = true;
                    min_deep = std::min(min_deep, e.phi);
                }
                max_grad = std::max(max_grad, std::sqrt(gg));
                dt_lo = std::min(dt_lo, e.dt);
                dt_hi = std::max(dt_hi, e.dt);
            }
        }
    }
    if (n_nodes == 0) throw std::runtime_error("phi_eta: slab verification sampled no nodes");

    double eg2 = std::pow(p.eps, p.gamma2);
    double a2_four = 0.0;
    if (eta > 1e-15 && deep_seen) a2_four = (1.0 + eta - min_deep) / (eta * eg2);
    double cap_scale = std::pow(p.eps, p.gamma2 - p.gamma1);
    double a2_caps = std::max(max_grad, std::max(std::abs(dt_lo), std::abs(dt_hi))) / cap_scale;
    double A2 = std::max(1.0, std::max(a2_four, a2_caps));

    auto frac = [&](long v) { return double(v) / double(n_nodes); };
    if (frac(viol_range) > p.fail_frac || frac(viol_diff) > p.fail_frac ||
        frac(viol_plateau) > p.fail_frac) {
        std::ostringstream os;
        os << "phi_eta verification failed: range " << frac(viol_range) << ", differential "
           << frac(viol_diff) << ", plateau " << frac(viol_plateau)
           << " violation fractions; worst differential margin " << worst_margin << " at "
           << fmt_point(worst_x, worst_t);
        throw std::runtime_error(os.str());
    }
    if (A2 > p.a2_cap) {
        std::ostringstream os;
        os << "phi_eta: measured constant A2=" << A2 << " exceeds cap " << p.a2_cap;
        throw std::runtime_error(os.str());
    }

    RadiusField f;
    PhiEtaCore cc = core;
    f.value = [cc](const Vec& x, double t) { return cc.eval(x, t).phi; };
    f.grad = [cc](const Vec& x, double t) { return cc.eval(x, t).grad; };
    f.lap = [cc](const Vec& x, double t) { return cc.eval(x, t).lap; };
    f.dt = [cc](const Vec& x, double t) { return cc.eval(x, t).dt; };
    f.grad_bound = max_grad;
    f.dt_min = dt_lo;
    f.dt_max = dt_hi;

    DiagnosticsReport& rep = f.verification;
    rep.name = "phi_eta_admissible";
    rep.pass = true;
    rep.measured["A2"] = A2;
    rep.measured["A2_plateau"] = a2_four;
    rep.measured["A2_caps"] = a2_caps;
    rep.measured["min_deep_value"] = deep_seen ? min_deep : std::numeric_limits<double>::quiet_NaN();
    rep.measured["max_grad"] = max_grad;
    rep.measured["dt_min"] = dt_lo;
    rep.measured["dt_max"] = dt_hi;
    rep.measured["worst_differential_margin"] = worst_margin;
    rep.measured["nodes"] = double(n_nodes);
    rep.measured["frac_range"] = frac(viol_range);
    rep.measured["frac_differential"] = frac(viol_diff);
    rep.measured["frac_plateau"] = frac(viol_plateau);
    rep.set_witness(worst_x);
    rep.witness_values["t"] = worst_t;
    rep.witness_values["differential_margin"] = worst_margin;
    rep.config["eps"] = p.eps;
    rep.config["kappa"] = p.kappa;
    rep.config["gamma1"] = p.gamma1;
    rep.config["gamma2"] = p.gamma2;
    rep.config["eta"] = eta;
    rep.config["A1"] = A1;
    rep.config["T"] = T;
    rep.config["shell_a"] = core.a;
    rep.config["carrier_k"] = core.k;
    rep.config["carrier_cq"] = core.cq;
    rep.config["slab_mid"] = core.m;
    rep.config["slab_halfwidth"] = 2.0 * r;
    rep.config["a2_cap"] = p.a2_cap;
    if (!deep_seen)
        rep.note = "no deep plateau nodes inside the slab; lower-bound constant unmeasured";
    return f;
}

// ---- radial admissible profile ---------------------------------------------

double PhiProfile::psi(double rho) const {
    if (d == 2) return coef_a + coef_b * std::log(rho);
    return coef_a + coef_b / rho;
}

double PhiProfile::value(double rho) const {
    if (rho <= r_inner) return A_theta;
    if (rho >= 1.0) return std::pow(psi(1.0), 1.0 / (1.0 - A0_effective));
    return std::pow(psi(rho), 1.0 / (1.0 - A0_effective));
}

double PhiProfile::dvalue(double rho) const {
    if (rho <= r_inner || rho >= 1.0) return 0.0;
    double p = 1.0 / (1.0 - A0_effective);
    double dpsi = d == 2 ? coef_b / rho : -coef_b / (rho * rho);
    return p * std::pow(psi(rho), p - 1.0) * dpsi;
}

PhiProfile solve_phi_profile(double A0, double theta, int d) {
    if (d != 2 && d != 3) throw std::invalid_argument("phi_profile: d must be 2 or 3");
    if (!(theta > 0.0 && theta <= M_PI / 2.0 + 1e-12))
        throw std::invalid_argument("phi_profile: theta must lie in (0, pi/2]");
    if (!(A0 > 1.0)) throw std::invalid_argument("phi_profile: exponent must exceed 1");

    PhiProfile pr;
    pr.d = d;
    pr.theta = theta;
    pr.A0_requested = A0;
    double st = std::sin(theta);
    pr.r_inner = st / 10.0;
    double outer_val = st / 2.0;
    double probe = 0.2;

    // Largest reachable value at the probe as the inner datum grows comes
    // from the harmonic interpolation with zero inner value; it caps the
    // usable exponent (minimum principle for the transformed profile).
    double s_probe = d == 2 ? std::log(probe / pr.r_inner) / std::log(1.0 / pr.r_inner)
                            : (1.0 / probe - 1.0 / pr.r_inner) / (1.0 - 1.0 / pr.r_inner);
    double A_max = 1.0 + std::log(1.0 / s_probe) / std::log(3.0 / outer_val);
    pr.A0_effective = std::min(A0, 1.0 + 0.95 * (A_max - 1.0));
    bool lowered = pr.A0_effective < A0 - 1e-12;

    double p1mA = 1.0 - pr.A0_effective;
    double psi_out = std::pow(outer_val, p1mA);
    pr.A_theta = std::max(8.0, 4.0 / st);
    bool reached = false;
    for (int iter = 0; iter < 200; ++iter) {
        double psi_in = std::pow(pr.A_theta, p1mA);
        if (d == 2) {
            pr.coef_a = psi_out;
            pr.coef_b = (psi_in - psi_out) / std::log(pr.r_inner);
        } else {
            pr.coef_b = (psi_in - psi_out) / (1.0 / pr.r_inner - 1.0);
            pr.coef_a = psi_out - pr.coef_b;
        }
        if (pr.value(probe) >= 3.0) {
            reached = true;
            break;
        }
        pr.A_theta *= 2.0;
    }
    if (!reached) throw std::runtime_error("phi_profile: probe target unreachable");

    DiagnosticsReport& rep = pr.report;
    rep.name = "phi_profile";
    double v_probe = pr.value(probe);
    double bc_in_err = std::abs(pr.value(pr.r_inner * (1.0 + 1e-13)) - pr.A_theta) / pr.A_theta;
    double bc_out_err = std::abs(pr.value(1.0 - 1e-13) - outer_val) / outer_val;
    double mid = 0.5 * (pr.r_inner + 1.0);
    bool monotone = pr.dvalue(mid) < 0.0;
    rep.pass = v_probe >= 3.0 && bc_in_err < 1e-9 && bc_out_err < 1e-9 && monotone;
    rep.measured["probe_value"] = v_probe;
    rep.measured["bc_inner_rel_err"] = bc_in_err;
    rep.measured["bc_outer_rel_err"] = bc_out_err;
    rep.measured["monotone_decreasing"] = monotone ? 1.0 : 0.0;
    rep.measured["A0_effective"] = pr.A0_effective;
    rep.measured["A_theta"] = pr.A_theta;
    rep.config["A0_requested"] = A0;
    rep.config["A0_reachable_max"] = A_max;
    rep.config["theta"] = theta;
    rep.config["dim"] = double(d);
    rep.config["r_inner"] = pr.r_inner;
    rep.config["outer_value"] = outer_val;
    if (lowered)
        rep.note = "requested exponent exceeds the reachable range on this annulus; "
                   "using the largest feasible exponent";
    if (!rep.pass) throw std::runtime_error("phi_profile: construction checks failed");
    return pr;
}

// ---- barrier ----------------------------------------------------------------

BarrierExponents barrier_exponents(double beta, double gamma_bar) {
    if (!(beta > 0.0 && beta < 2.0))
        throw std::invalid_argument("barrier exponents: beta must lie in (0, 2)");
    if (!(gamma_bar > 0.0 && gamma_bar <= 1.0))
        throw std::invalid_argument("barrier exponents: gamma_bar must lie in (0, 1]");
    BarrierExponents e;
    e.kappa = (2.0 - beta) / 8.0;
    e.gamma1 = std::max(0.75 + beta / 8.0, 1.0 - gamma_bar / 2.0);
    e.iota = 5.0 * e.kappa;
    e.gamma2 = e.gamma1 - e.iota;
    if (!(e.gamma2 > 0.0))
        throw std::invalid_argument("barrier exponents: schedule infeasible for this growth rate");
    double lo = 1.0 - e.gamma1, hi = 1.0 - (beta + e.iota) / 2.0;
    if (!(hi > lo))
        throw std::invalid_argument("barrier exponents: empty alpha1 window");
    e.alpha1 = 0.5 * (lo + hi);
    e.alpha2 = std::min(std::min(1.0 - e.iota, gamma_bar), 0.999) - 0.01;
    if (!(e.alpha1 < e.alpha2 && e.alpha2 < 1.0))
        throw std::invalid_argument("barrier exponents: alpha ordering infeasible");
    e.gamma3 = std::min(0.5 * (e.alpha1 + e.gamma1 - 1.0), e.gamma2);
    if (!(e.gamma3 > 0.0))
        throw std::invalid_argument("barrier exponents: gamma3 not positive");
    return e;
}

namespace {

void dilate(const Grid& g, std::vector<std::uint8_t>& mask, int passes) {
    for (int p = 0; p < passes; ++p) {
        std::vector<std::uint8_t> next = mask;
        for (std::size_t idx = 0; idx < g.size(); ++idx) {
            if (!mask[idx]) continue;
            std::array<int, 3> c = g.coords(idx);
            for (int a = 0; a < g.dim; ++a)
                for (int s = -1; s <= 1; s += 2) {
                    std::array<int, 3> n = c;
                    n[a] += s;
                    if (g.in_bounds(n)) next[g.index(n)] = 1;
                }
        }
        mask.swap(next);
    }
}

}  // namespace

BarrierBundle assemble_barrier(const GridField& u, const FrontGraph& front,
                               const BarrierParams& p) {
    u.validate();
    const Grid& g = u.grid;
    if (!g.same_layout(front.grid))
        throw std::invalid_argument("barrier: field and front live on different grids");
    double h = g.h;
    if (p.eps < 4.0 * h - 1e-12)
        throw std::runtime_error("barrier: scale unresolved (eps < 4h); refine the grid");

    BarrierBundle b;
    b.exps = barrier_exponents(p.beta, p.gamma_bar);
    double r = std::pow(p.eps, b.exps.gamma1);
    double sigma = std::clamp(p.sigma_factor, 0.5, 1.0) * p.eps;
    int axis = front.axis;
    int dir = front.dir;

    // Coupling relation for eta at this scale; fall back when infeasible.
    double q106 = std::pow(p.eps, b.exps.gamma3);
    double st = std::sin(p.theta);
    double denom = st - (1.0 - p.j);
    double eta_rel = std::numeric_limits<double>::quiet_NaN();
    if (denom > 1e-9) eta_rel = (p.j * st - q106) / denom - 1.0;
    double eta;
    std::string eta_note;
    if (p.eta > 0.0) {
        eta = p.eta;
        eta_note = "explicit eta";
    } else if (std::isfinite(eta_rel) && eta_rel > 1e-6 && eta_rel <= 1.0) {
        eta = eta_rel;
        eta_note = "eta from the coupling relation";
    } else {
        eta = 0.2;
        eta_note = "coupling relation infeasible at this scale; using default eta";
    }

    double T = std::max(1.0, 2.0 * std::abs(u.time) + 1.0);
    PhiEtaParams pep;
    pep.eps = p.eps;
    pep.kappa = b.exps.kappa;
    pep.gamma1 = b.exps.gamma1;
    pep.gamma2 = b.exps.gamma2;
    pep.A1 = p.A1;
    RadiusField phi = build_radius_phi_eta(eta, pep, front, T);

    // Strip mask around the front graph and its sup-convolution halo.
    std::size_t n = g.size();
    int a0 = -1, a1 = -1;
    for (int a = 0; a < g.dim; ++a)
        if (a != axis) (a0 < 0 ? a0 : a1) = a;
    auto column_of = [&](const std::array<int, 3>& c) -> std::size_t {
        if (g.dim == 2) return std::size_t(c[a0]);
        return std::size_t(c[a0]) + std::size_t(g.extents[a0]) * std::size_t(c[a1]);
    };
    std::vector<std::uint8_t> strip(n, 0);
    std::vector<double> cut(n, 1.0);
    for (std::size_t idx = 0; idx < n; ++idx) {
        std::array<int, 3> c = g.coords(idx);
        std::size_t col = column_of(c);
        if (!front.has(col)) continue;
        double H = front.height[col];
        double xd = g.position(idx)[axis];
        cut[idx] = std::max(H - 2.0 * r - xd, xd - (H + 2.0 * r));
        if (cut[idx] < 0.0) strip[idx] = 1;
    }

    std::vector<std::uint8_t> halo = strip;
    dilate(g, halo, int(std::ceil(sigma * (1.0 + eta) / h)) + 2);
    RadiusField scaled;
    scaled.value = [&phi, sigma](const Vec& x, double t) { return sigma * phi.value(x, t); };
    b.v = sup_convolve_masked(u, scaled, &halo, false);

    double tol_v = 1e-12 * std::max(1.0, b.v.max_abs());
    std::vector<std::uint8_t> unknown(n, 0);
    for (std::size_t idx = 0; idx < n; ++idx) {
        if (!strip[idx] || b.v.values[idx] <= tol_v) continue;
        std::array<int, 3> c = g.coords(idx);
        bool edge = false;
        for (int a = 0; a < g.dim; ++a)
            if (c[a] == 0 || c[a] == g.extents[a] - 1) edge = true;
        if (!edge) unknown[idx] = 1;
    }

    auto height_near = [&](const Vec& x) {
        std::array<int, 3> c{0, 0, 0};
        for (int a = 0; a < g.dim; ++a)
            c[a] = std::clamp(int(std::lround((x[a] - g.origin[a]) / h)), 0, g.extents[a] - 1);
        std::size_t col = column_of(c);
        return front.has(col) ? front.height[col] : std::numeric_limits<double>::quiet_NaN();
    };

    // w1: harmonic, boundary data v on the in-fluid slab face, zero elsewhere.
    PoissonProblem prob;
    prob.grid = &g;
    prob.unknown = unknown;
    prob.f.assign(n, 0.0);
    prob.cut = &cut;
    const GridField& vref = b.v;
    prob.front_value = [&, dir](const Vec& x) {
        double H = height_near(x);
        if (std::isfinite(H) && (x[axis] - H) * double(-dir) > 0.0) return vref.interp(x);
        return 0.0;
    };
    prob.bc = [](const Vec&) { return 0.0; };
    b.w1 = GridField{};
    b.w1.grid = g;
    b.w1.values.assign(n, 0.0);
    b.w1.time = u.time;
    solve_dirichlet(prob, b.w1, p.elliptic);

    PoissonProblem prob2 = prob;
    prob2.f.assign(n, 1.0 + p.f_sup);
    prob2.front_value = [](const Vec&) { return 0.0; };
    b.w2 = GridField{};
    b.w2.grid = g;
    b.w2.values.assign(n, 0.0);
    b.w2.time = u.time;
    solve_dirichlet(prob2, b.w2, p.elliptic);

    double coef_v = p.f_constant ? 1.0 : 1.0 + std::pow(p.eps, p.alpha + 1.0);
    double c_w1 = p.c_star * std::pow(p.eps, b.exps.alpha1);
    double c_w2 = std::pow(p.eps, b.exps.alpha2);
    b.vbar = b.v;
    for (std::size_t idx = 0; idx < n; ++idx)
        b.vbar.values[idx] =
            coef_v * b.v.values[idx] - c_w2 * b.w2.values[idx] + c_w1 * b.w1.values[idx];
    b.vbar.non_negative = false;

    b.params["eps"] = p.eps;
    b.params["sigma"] = sigma;
    b.params["eta"] = eta;
    b.params["eta_relation_value"] = eta_rel;
    b.params["eta_relation_q"] = q106;
    b.params["j"] = p.j;
    b.params["c_star"] = p.c_star;
    b.params["coef_v"] = coef_v;
    b.params["coef_w1"] = c_w1;
    b.params["coef_w2"] = c_w2;
    b.params["slab_halfwidth"] = 2.0 * r;
    b.params["theta"] = p.theta;
    b.params["beta"] = p.beta;
    b.params["gamma_bar"] = p.gamma_bar;
    b.params["A2_measured"] = phi.verification.measured.at("A2");

    // Ordering vbar <= u(. - j eps e_d) over the lateral-interior strip.
    Vec shift{0, 0, 0};
    shift[axis] = p.j * p.eps * double(dir);
    double tol_ord = 1e-10 * std::max(1.0, u.max_abs());
    long checked = 0, viol = 0;
    double worst = -std::numeric_limits<double>::max();
    Vec worst_x{0, 0, 0};
    for (std::size_t idx = 0; idx < n; ++idx) {
        if (!unknown[idx]) continue;
        Vec x = g.position(idx);
        bool interior = true;
        for (int a = 0; a < g.dim; ++a) {
            if (a == axis) continue;
            double lo = g.origin[a], hi = g.origin[a] + h * (g.extents[a] - 1);
            if (x[a] - lo < p.lateral_guard || hi - x[a] < p.lateral_guard) interior = false;
        }
        if (!interior) continue;
        Vec y = x - shift;
        bool inbox = true;
        for (int a = 0; a < g.dim; ++a) {
            double lo = g.origin[a], hi = g.origin[a] + h * (g.extents[a] - 1);
            if (y[a] < lo - 1e-12 || y[a] > hi + 1e-12) inbox = false;
        }
        if (!inbox) continue;
        ++checked;
        double margin = b.vbar.values[idx] - u.interp(y);
        if (margin > worst) {
            worst = margin;
            worst_x = x;
        }
        if (margin > tol_ord) ++viol;
    }
    b.ordering.name = "barrier_ordering";
    b.ordering.pass = checked > 0 && viol == 0;
    b.ordering.measured["worst_margin"] = checked > 0 ? worst : 0.0;
    b.ordering.measured["checked_nodes"] = double(checked);
    b.ordering.measured["violations"] = double(viol);
    b.ordering.set_witness(worst_x);
    b.ordering.witness_values["margin"] = checked > 0 ? worst : 0.0;
    b.ordering.config = b.params;
    b.ordering.note = eta_note;
    if (checked == 0) b.ordering.note += "; empty comparison region";

    // The stored combination must be reproducible bit for bit.
    std::vector<double> redo(n);
    for (std::size_t idx = 0; idx < n; ++idx)
        redo[idx] = coef_v * b.v.values[idx] - c_w2 * b.w2.values[idx] + c_w1 * b.w1.values[idx];
    bool same = std::memcmp(redo.data(), b.vbar.values.data(), n * sizeof(double)) == 0;
    b.identity.name = "barrier_bitwise_identity";
    b.identity.pass = same;
    b.identity.measured["bitwise_equal"] = same ? 1.0 : 0.0;
    b.identity.config["coef_v"] = coef_v;
    b.identity.config["coef_w1"] = c_w1;
    b.identity.config["coef_w2"] = c_w2;
    return b;
}

}  // namespace hs
