#include "hs/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hs/regularity.hpp"

namespace hs {

namespace {

double lerp_table(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    std::size_t hi = std::size_t((x - xs.front()) / (xs[1] - xs[0])) + 1;
    hi = std::min(hi, xs.size() - 1);
    while (xs[hi] < x) ++hi;
    double s = (x - xs[hi - 1]) / (xs[hi] - xs[hi - 1]);
    return ys[hi - 1] * (1.0 - s) + ys[hi] * s;
}

// Angle from the positive x1 axis, in [0, pi].
double axis_angle(const Vec& x) { return std::atan2(std::abs(x[1]), x[0]); }

// Straight-cone profile r^g1 cos(g1 theta), zero outside the half-angle.
double cone_profile(const Vec& x, double gamma1) {
    double th = axis_angle(x);
    if (gamma1 * th >= M_PI / 2.0) return 0.0;
    return std::pow(norm(x), gamma1) * std::cos(gamma1 * th);
}

}  // namespace

double CuspSpec::theta_at(double t) const {
    return (1.0 - t) * M_PI / (2.0 * gamma0) + t * M_PI / (2.0 * gamma1);
}

double CuspSpec::gamma_at(double t) const { return M_PI / (2.0 * theta_at(t)); }

void CuspSpec::validate_phase1() const {
    if (!(gamma0 > 1.0 && gamma0 < 2.0))
        throw std::invalid_argument("cusp spec: gamma0 must lie in (1, 2)");
    if (!(gamma1 > gamma0)) throw std::invalid_argument("cusp spec: gamma1 must exceed gamma0");
}

void CuspSpec::validate_phase2() const {
    validate_phase1();
    if (!(gamma1 > 2.0)) throw std::invalid_argument("cusp spec: phase 2 needs gamma1 > 2");
    double s = sigma();
    if (!(s > gamma0 - 1.0 && s < 1.0))
        throw std::invalid_argument("cusp spec: sigma = 2/gamma1 must lie in (gamma0 - 1, 1)");
}

DiagnosticsReport cusp_phase1_check(const CuspSpec& spec, int samples) {
    spec.validate_phase1();
    if (samples < 4) throw std::invalid_argument("cusp phase 1: need >= 4 samples");
    double A = M_PI / (2.0 * spec.gamma0) - M_PI / (2.0 * spec.gamma1);

    struct Worst {
        double margin = std::numeric_limits<double>::max();
        double r = 0.0, t = 0.0;
    };
    auto scan = [&](double c0) {
        Worst w;
        for (int it = 0; it < samples; ++it) {
            double t = double(it) / (samples - 1);
            double th = spec.theta_at(t), gt = spec.gamma_at(t);
            for (int ir = 0; ir < samples; ++ir) {
                double r = std::pow(1e-4, 1.0 - double(ir) / (samples - 1));
                double e = -A * r - gt * std::pow(r, gt - 1.0) +
                           c0 * std::pow(r * std::cos(th), spec.gamma0 - 1.0) * std::sin(th);
                if (e < w.margin) w = {e, r, t};
            }
        }
        return w;
    };

    double hi = 8.0;
    while (scan(hi).margin < 0.0) {
        hi *= 4.0;
        if (hi > 1e6) throw std::runtime_error("cusp phase 1: no admissible C0 at or below 1e6");
    }
    double lo = 1.0;
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        (scan(mid).margin >= 0.0 ? hi : lo) = mid;
    }
    double c0_min = hi;
    Worst at_spec = scan(spec.C0);

    DiagnosticsReport rep;
    rep.name = "cusp_phase1";
    rep.pass = at_spec.margin >= 0.0;
    rep.measured["worst_margin"] = at_spec.margin;
    rep.measured["C0_min"] = c0_min;
    rep.set_witness(vec2(at_spec.r * std::cos(spec.theta_at(at_spec.t)),
                         at_spec.r * std::sin(spec.theta_at(at_spec.t))));
    rep.witness_values["r"] = at_spec.r;
    rep.witness_values["t"] = at_spec.t;
    rep.config["C0"] = spec.C0;
    rep.config["gamma0"] = spec.gamma0;
    rep.config["gamma1"] = spec.gamma1;
    rep.config["samples"] = double(samples);
    return rep;
}

DiagnosticsReport cusp_phase2_check(const CuspSpec& spec, int samples, int n,
                                    GridField* phi_out) {
    spec.validate_phase2();
    if (samples < 4) throw std::invalid_argument("cusp phase 2: need >= 4 samples");
    double s = spec.sigma(), cot1 = 1.0 / std::tan(spec.theta_at(1.0));
    double hh = 1.0 / double(n);
    Grid g2(2, vec2(-0.2, -2.05), hh,
            {int(std::lround(2.25 * n)) + 1, int(std::lround(4.10 * n)) + 1, 1});

    auto wall = [&](double x2, double t) { return x2 * cot1 + (t - 1.0) * std::pow(x2, s); };
    auto wall_slope = [&](double x2, double t) {
        return cot1 + s * (t - 1.0) * std::pow(x2, s - 1.0);
    };

    double worst = std::numeric_limits<double>::max();
    Vec worst_x{0, 0, 0};
    double worst_t = 0.0, c_grad = 0.0, ratio_b1 = 0.0, ratio_b2 = 0.0;
    long checked = 0, sweeps = 0;
    const double tvals[3] = {1.25, 1.5, 1.75};
    for (double t : tvals) {
        PoissonProblem p;
        p.grid = &g2;
        p.unknown.assign(g2.size(), 0);
        p.f.assign(g2.size(), 0.0);
        std::vector<double> cut(g2.size());
        for (std::size_t idx = 0; idx < g2.size(); ++idx) {
            Vec x = g2.position(idx);
            double c = std::max(wall(std::abs(x[1]), t) - x[0], norm(x) - 2.0);
            cut[idx] = c;
            p.unknown[idx] = c < 0.0 ? 1 : 0;
        }
        p.cut = &cut;
        double g1 = spec.gamma1;
        p.front_value = [g1](const Vec& q) {
            return norm(q) > 1.97 ? cone_profile(q, g1) : 0.0;
        };
        p.bc = [g1](const Vec& q) { return cone_profile(q, g1); };

        GridField u;
        u.grid = g2;
        u.values.assign(g2.size(), 0.0);
        EllipticConfig cfg;
        cfg.tol = 1e-9;
        cfg.max_sweeps = 400000;
        EllipticStats st = solve_dirichlet(p, u, cfg);
        sweeps += st.sweeps;
        double scale = u.interp(vec2(0.5, 0.0));
        if (!(scale > 1e-12))
            throw std::runtime_error("cusp phase 2: normalization point left the domain");
        for (double& v : u.values) v /= scale;
        u.non_negative = true;
        if (phi_out) *phi_out = u;

        // Largest |x2| with the wall still inside the r = 0.8 sample disc.
        double x2_hi = 0.8;
        for (int it = 0; it < 60; ++it) {
            double w = wall(x2_hi, t);
            if (w * w + x2_hi * x2_hi > 0.64) x2_hi *= 0.97;
        }
        double x2_lo = std::max(0.05, 6.0 * hh);
        double d = 3.0 * hh;
        for (int is = 0; is < samples; ++is) {
            double x2 = x2_lo * std::pow(x2_hi / x2_lo, double(is) / (samples - 1));
            double gp = wall_slope(x2, t), root = std::sqrt(1.0 + gp * gp);
            Vec w0 = vec2(wall(x2, t), x2);
            Vec foot = w0 + (d / root) * vec2(1.0, -gp);
            double gradmag = u.interp(foot) / d;
            double lhs = (spec.C0 * std::pow(x2, spec.gamma0 - 1.0) - std::pow(x2, s)) / root;
            double margin = lhs - gradmag;
            ++checked;
            if (margin < worst) {
                worst = margin;
                worst_x = w0;
                worst_t = t;
            }
            c_grad = std::max(c_grad, gradmag * x2 / std::pow(w0[0], spec.gamma1));
            if ((t - 1.0) * std::pow(x2, s - 1.0) >= 1.0)
                ratio_b1 = std::max(ratio_b1, gradmag / x2);
            else
                ratio_b2 = std::max(ratio_b2, gradmag / std::pow(x2, spec.gamma1 - 1.0));
        }
    }

    DiagnosticsReport rep;
    rep.name = "cusp_phase2";
    rep.pass = worst >= 0.0 && checked > 0;
    rep.measured["worst_margin"] = worst;
    rep.measured["c_gradient_bound"] = c_grad;
    rep.measured["steep_branch_ratio"] = ratio_b1;
    rep.measured["tip_branch_ratio"] = ratio_b2;
    rep.measured["samples_checked"] = double(checked);
    rep.measured["solver_sweeps"] = double(sweeps);
    rep.set_witness(worst_x);
    rep.witness_values["t"] = worst_t;
    rep.config["C0"] = spec.C0;
    rep.config["gamma0"] = spec.gamma0;
    rep.config["gamma1"] = spec.gamma1;
    rep.config["sigma"] = s;
    rep.config["n"] = double(n);
    rep.config["foot_step"] = 3.0 * hh;
    return rep;
}

DriftField cusp_drift(const CuspSpec& spec, double h_floor) {
    DriftField d;
    double c0 = spec.C0, g0 = spec.gamma0;
    d.b = [c0, g0](const Vec& x) {
        return vec2(-c0 * std::pow(std::abs(x[1]), g0 - 1.0), 0.0);
    };
    d.sup_b = c0;
    d.lip_b = h_floor > 0.0 ? c0 * (g0 - 1.0) * std::pow(h_floor, g0 - 2.0) : 1e9;
    return d;
}

EvolutionRun cusp_flow_run(const CuspSpec& spec, int n, double t_end, int frames) {
    spec.validate_phase1();
    double theta0 = spec.theta_at(0.0);

    FlowSpec fs;
    double half = 0.88;
    fs.domain = Grid(2, vec2(-half, -half), 2.0 * half / (n - 1), n);
    double h = fs.domain.h;
    fs.drift = cusp_drift(spec, h);
    double seed_r = 0.35, seed_ang = 0.85 * theta0;
    fs.init_phi = [seed_r, seed_ang](const Vec& x) {
        return std::max(norm(x) - seed_r, axis_angle(x) - seed_ang);
    };
    fs.core = [](const Vec& x) { return norm(x - vec2(0.15, 0.0)) <= 0.06; };
    fs.core_value = [](double) { return 0.02; };
    fs.outer_radius = 0.8;
    fs.outer_value = [](const Vec&, double) { return 0.0; };
    fs.t_end = t_end;
    fs.dt = 0.45 * h / (spec.C0 + 1.0);
    long steps = long(std::ceil(t_end / fs.dt));
    fs.dt = t_end / double(steps);

    RunOptions opt;
    opt.frame_stride = std::max(1, int(steps / std::max(1, frames)));
    opt.run_id = "cusp_containment";
    return run_flow(fs, Scheme::LevelSet, opt);
}

DiagnosticsReport cusp_containment_check(const CuspSpec& spec, const EvolutionRun& run) {
    const Grid& dom = run.spec.domain;
    double h = dom.h;
    double worst = 0.0, worst_t = 0.0;
    Vec worst_x{0, 0, 0};
    for (const Frame& fr : run.frames) {
        double th_t = spec.theta_at(fr.t);
        for (std::size_t idx = 0; idx < dom.size(); ++idx) {
            if (!fr.mask.contains(idx)) continue;
            Vec x = dom.position(idx);
            double excess = axis_angle(x) - th_t;
            if (excess <= 0.0) continue;
            double dist = norm(x) * std::sin(std::min(excess, M_PI / 2.0));
            if (dist > worst) {
                worst = dist;
                worst_x = x;
                worst_t = fr.t;
            }
        }
    }

    DiagnosticsReport rep;
    rep.name = "cusp_containment";
    rep.pass = worst <= 2.0 * h;
    rep.measured["worst_excess"] = worst;
    rep.measured["worst_excess_cells"] = worst / h;
    rep.measured["frames"] = double(run.frames.size());
    rep.measured["final_area"] = run.trace.empty() ? 0.0 : run.trace.back().area;
    rep.set_witness(worst_x);
    rep.witness_values["t"] = worst_t;
    rep.run_id = run.run_id;
    rep.config["C0"] = spec.C0;
    rep.config["h"] = h;
    rep.note = "pass = positive set inside the shrinking cone within 2h at every stored frame";
    return rep;
}

DiagnosticsReport cusp_containment_run(const CuspSpec& spec, int n, double t_end, int frames) {
    EvolutionRun run = cusp_flow_run(spec, n, t_end, frames);
    DiagnosticsReport rep = cusp_containment_check(spec, run);
    rep.config["n"] = double(n);
    rep.config["t_end"] = t_end;
    return rep;
}

double bump_profile(double r, double delta, int n) {
    double amp = std::pow(delta, n);
    if (r <= delta) return amp;
    if (r >= 2.0 * delta) return 0.0;
    double s = (r - delta) / delta;
    return amp * (1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s));
}

double RadialPotential::value(double radius) const {
    if (radius >= 2.0 * delta) return m_inf * std::log(1.0 / std::max(radius, 1e-300));
    return lerp_table(r, val, radius);
}

double RadialPotential::slope(double radius) const {
    if (radius <= 0.0) return 0.0;
    if (radius >= 2.0 * delta) return -m_inf / radius;
    return -lerp_table(r, mass, radius) / radius;
}

RadialPotential radial_bump_potential(double delta, int n) {
    if (!(delta > 0.0 && delta < 0.25))
        throw std::invalid_argument("radial potential: delta must lie in (0, 1/4)");

    auto build = [&](std::size_t cells) {
        RadialPotential p;
        p.delta = delta;
        p.n = n;
        std::size_t nn = cells | 1;  // odd node count for Simpson pairs
        double dr = 2.0 * delta / double(nn - 1);
        p.r.resize(nn);
        p.mass.assign(nn, 0.0);
        std::vector<double> sf(nn);
        for (std::size_t i = 0; i < nn; ++i) {
            p.r[i] = dr * double(i);
            sf[i] = p.r[i] * bump_profile(p.r[i], delta, n);
        }
        for (std::size_t i = 2; i < nn; i += 2)
            p.mass[i] = p.mass[i - 2] + dr / 3.0 * (sf[i - 2] + 4.0 * sf[i - 1] + sf[i]);
        for (std::size_t i = 1; i < nn; i += 2)
            p.mass[i] = p.mass[i - 1] + dr / 12.0 * (5.0 * sf[i - 1] + 8.0 * sf[i] -
                                                     (i + 1 < nn ? sf[i + 1] : sf[i]));
        p.m_inf = p.mass[nn - 1];
        // phi1(r) = phi1(2 delta) + int_r^{2 delta} M(rho)/rho d rho, trapezoid
        // on the dense table; the integrand vanishes linearly at 0.
        p.val.assign(nn, 0.0);
        p.val[nn - 1] = p.m_inf * std::log(1.0 / (2.0 * delta));
        for (std::size_t i = nn - 1; i > 0; --i) {
            double a = p.r[i - 1] > 0.0 ? p.mass[i - 1] / p.r[i - 1] : 0.0;
            double b = p.mass[i] / p.r[i];
            p.val[i - 1] = p.val[i] + 0.5 * dr * (a + b);
        }
        return p;
    };

    double cap = 1e-8 * std::pow(delta, n + 2);
    std::size_t cells = 4096;
    for (int attempt = 0; attempt < 4; ++attempt, cells *= 2) {
        RadialPotential coarse = build(cells / 2);
        RadialPotential fine = build(cells);
        fine.err = std::abs(fine.val[0] - coarse.val[0]) / 3.0 +
                   std::abs(fine.m_inf - coarse.m_inf) / 15.0;
        if (fine.err <= cap) return fine;
    }
    throw std::runtime_error("radial potential: quadrature error above 1e-8 delta^{n+2}");
}

double PotentialBumpSpec::resolved_eps() const {
    return eps > 0.0 ? eps : std::sqrt(delta);
}

double PotentialBumpSpec::e2_delta() const {
    if (!(eps > 0.0)) throw std::invalid_argument("bump spec: eps must be set for this variant");
    return std::pow(eps, (alpha + kappa + 1.0) / 2.0);
}

void PotentialBumpSpec::validate_e2() const {
    if (!(alpha > 0.0)) throw std::invalid_argument("bump spec: alpha must be positive");
    if (!(kappa > std::min(0.0, 1.0 - alpha) && kappa < 1.0))
        throw std::invalid_argument("bump spec: kappa must lie in (min{0, 1-alpha}, 1)");
    e2_delta();
}

namespace {

struct PotentialConstants {
    double C1 = 0.0, C2 = 0.0, C = 0.0;
};

PotentialConstants measure_constants(const RadialPotential& p, double delta, int n) {
    PotentialConstants c;
    double max_slope = 0.0;
    for (std::size_t i = 1; i < p.r.size(); ++i)
        max_slope = std::max(max_slope, p.mass[i] / p.r[i]);
    c.C1 = std::pow(delta, n + 1) / max_slope;
    c.C2 = p.val[0] / (std::pow(delta, n + 2) * std::abs(std::log(delta)));
    c.C = std::max(c.C1, c.C2);
    return c;
}

}  // namespace

Grid e3_default_grid(const PotentialBumpSpec& spec) {
    double h = spec.delta / 8.0;
    int nn = int(std::lround(0.2 / h)) + 1;
    return Grid(2, vec2(-0.1, -0.1), h, nn);
}

E3Field make_e3_field(const PotentialBumpSpec& spec, const Grid& grid) {
    if (grid.dim != 2) throw std::invalid_argument("e3 field: two dimensions only");
    if (spec.delta < 8.0 * grid.h - 1e-15)
        throw std::invalid_argument("e3 field: bump unresolved (delta < 8h)");
    RadialPotential p = radial_bump_potential(spec.delta, spec.n);
    PotentialConstants pc = measure_constants(p, spec.delta, spec.n);
    double tilt = std::pow(spec.delta, spec.n + 1) / (2.0 * pc.C);

    E3Field out;
    out.C = pc.C;
    out.C1 = pc.C1;
    out.C2 = pc.C2;
    out.quad_err = p.err;
    out.f.grid = grid;
    out.f.values.resize(grid.size());
    out.f.non_negative = true;
    out.phi.grid = grid;
    out.phi.values.resize(grid.size());
    out.phi.non_negative = true;
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        Vec x = grid.position(idx);
        double r = norm(x);
        out.f.values[idx] = bump_profile(r, spec.delta, spec.n);
        out.phi.values[idx] = p.value(r) + 2.0 + tilt * x[0];
    }

    // Witness of the tilted gradient turning negative inside the bump halo.
    double min_d1 = std::numeric_limits<double>::max();
    Vec min_x{0, 0, 0};
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        Vec x = grid.position(idx);
        double r = norm(x);
        if (r < grid.h || r > 3.0 * spec.delta) continue;
        double d1 = tilt + p.slope(r) * x[0] / r;
        if (d1 < min_d1) {
            min_d1 = d1;
            min_x = x;
        }
    }
    // Five-point residual of -Lap phi = f near the bump.
    double res = 0.0;
    const Grid& g = grid;
    int band = int(6.0 * spec.delta / g.h);
    int c0 = int(std::lround((0.0 - g.origin[0]) / g.h));
    int c1 = int(std::lround((0.0 - g.origin[1]) / g.h));
    for (int j = std::max(1, c1 - band); j <= std::min(g.extents[1] - 2, c1 + band); ++j)
        for (int i = std::max(1, c0 - band); i <= std::min(g.extents[0] - 2, c0 + band); ++i) {
            std::size_t idx = g.index(i, j);
            double lap = (out.phi.values[g.index(i + 1, j)] + out.phi.values[g.index(i - 1, j)] +
                          out.phi.values[g.index(i, j + 1)] + out.phi.values[g.index(i, j - 1)] -
                          4.0 * out.phi.values[idx]) /
                         (g.h * g.h);
            res = std::max(res, std::abs(lap + out.f.values[idx]));
        }

    DiagnosticsReport rep;
    rep.name = "e3_construction";
    double fmax = std::pow(spec.delta, spec.n);
    rep.pass = min_d1 < 0.0 && res <= 0.02 * fmax;
    rep.measured["C"] = pc.C;
    rep.measured["C1"] = pc.C1;
    rep.measured["C2"] = pc.C2;
    rep.measured["quad_err"] = p.err;
    rep.measured["min_dphi_x1"] = min_d1;
    rep.measured["lap_residual_rel"] = res / fmax;
    rep.set_witness(min_x);
    rep.config["delta"] = spec.delta;
    rep.config["n"] = double(spec.n);
    rep.config["eps"] = spec.resolved_eps();
    rep.config["theta"] = spec.theta;
    out.construction = rep;
    return out;
}

Grid e2_default_grid(const PotentialBumpSpec& spec) {
    spec.validate_e2();
    double eps = spec.eps, d2 = spec.e2_delta();
    double h = d2 / 8.0, half = 1.45 * eps;
    int nn = int(std::lround(2.0 * half / h)) + 1;
    return Grid(2, vec2(-half, -half), h, nn);
}

E2Field make_e2_field(const PotentialBumpSpec& spec, const Grid& grid) {
    spec.validate_e2();
    if (grid.dim != 2) throw std::invalid_argument("e2 field: two dimensions only");
    double eps = spec.eps, d2 = spec.e2_delta();
    if (d2 < 8.0 * grid.h - 1e-18)
        throw std::invalid_argument("e2 field: bump unresolved (delta < 8h)");
    RadialPotential p = radial_bump_potential(d2, 0);
    PotentialConstants pc = measure_constants(p, d2, 0);
    double ek = std::pow(eps, spec.kappa);

    E2Field out;
    out.C = pc.C;
    out.delta = d2;
    out.eps = eps;
    out.phi.grid = grid;
    out.phi.values.resize(grid.size());
    out.phi.non_negative = true;
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        Vec x = grid.position(idx);
        out.phi.values[idx] = p.value(norm(x)) + d2 * (x[0] + 1.0) / (2.0 * pc.C) + ek;
    }

    double lo = *std::min_element(out.phi.values.begin(), out.phi.values.end());
    double hi = *std::max_element(out.phi.values.begin(), out.phi.values.end());
    if (!(lo >= ek * (1.0 - 1e-12) && hi <= 2.0 * ek)) {
        std::ostringstream os;
        os << "e2 construction: plateau bounds failed: " << lo << " .. " << hi
           << " vs [" << ek << ", " << 2.0 * ek << "]";
        throw std::runtime_error(os.str());
    }

    MonotoneQuery q;
    q.cone = Cone(vec2(1, 0), spec.theta);
    q.eps = eps;
    q.a = std::pow(eps, spec.alpha);
    q.window = Window::ball_box(vec2(0, 0), 0.1 * eps, 2);
    q.ladder = 1;
    q.tol_rel = 1e-16;
    DiagnosticsReport mono = check_eps_a_monotone(out.phi, q);
    if (!mono.pass) {
        std::ostringstream os;
        os << "e2 construction: cone monotonicity failed (worst slack "
           << mono.measured.at("worst_slack") << ")";
        throw std::runtime_error(os.str());
    }

    double tilt = d2 / (2.0 * pc.C);
    double min_d1 = std::numeric_limits<double>::max(), max_d1 = -min_d1;
    Vec min_x{0, 0, 0};
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        Vec x = grid.position(idx);
        double r = norm(x);
        if (r < grid.h) continue;
        double d1 = tilt + (r <= 3.0 * d2 ? p.slope(r) : -p.m_inf / r) * x[0] / r;
        if (d1 < min_d1) {
            min_d1 = d1;
            min_x = x;
        }
        max_d1 = std::max(max_d1, d1);
    }
    if (!(min_d1 < 0.0 && max_d1 > 0.0))
        throw std::runtime_error("e2 construction: grad_x1 does not change sign");

    DiagnosticsReport rep;
    rep.name = "e2_construction";
    rep.pass = true;
    rep.measured["C"] = pc.C;
    rep.measured["delta"] = d2;
    rep.measured["phi_lo_over_epskappa"] = lo / ek;
    rep.measured["phi_hi_over_epskappa"] = hi / ek;
    rep.measured["mono_worst_slack"] = mono.measured.at("worst_slack");
    rep.measured["mono_checked"] = mono.measured.at("checked");
    rep.measured["min_dphi_x1"] = min_d1;
    rep.set_witness(min_x);
    rep.config["eps"] = eps;
    rep.config["alpha"] = spec.alpha;
    rep.config["kappa"] = spec.kappa;
    rep.config["theta"] = spec.theta;
    out.construction = rep;
    return out;
}

}  // namespace hs
