#include "hs/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "hs/cone_harmonics.hpp"
#include "hs/rng.hpp"

namespace hs {

namespace {

bool in_box(const Grid& g, const Vec& x, double pad = 0.0) {
    for (int a = 0; a < g.dim; ++a) {
        double lo = g.origin[a], hi = g.origin[a] + g.h * (g.extents[a] - 1);
        if (x[a] < lo - pad - 1e-12 || x[a] > hi + pad + 1e-12) return false;
    }
    return true;
}

struct Ols {
    double slope = 0.0, intercept = 0.0, rms = 0.0;
    std::size_t n = 0;
};

Ols fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    Ols f;
    f.n = xs.size();
    if (f.n < 2) return f;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < f.n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double nn = double(f.n);
    double den = nn * sxx - sx * sx;
    if (den == 0) return f;
    f.slope = (nn * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / nn;
    double ss = 0;
    for (std::size_t i = 0; i < f.n; ++i) {
        double e = ys[i] - (f.intercept + f.slope * xs[i]);
        ss += e * e;
    }
    f.rms = std::sqrt(ss / nn);
    return f;
}

// Window-restricted scale estimates: max |w| and a curvature bound for the
// interpolation-error part of the slack tolerance.
void window_scales(const GridField& f, const Window& w, double& max_abs, double& d2_max,
                   long& nodes) {
    const Grid& g = f.grid;
    max_abs = 0.0;
    d2_max = 0.0;
    nodes = 0;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        Vec x = g.position(idx);
        if (!w.contains(x, g.dim)) continue;
        ++nodes;
        max_abs = std::max(max_abs, std::abs(f.values[idx]));
        std::array<int, 3> c = g.coords(idx);
        for (int a = 0; a < g.dim; ++a) {
            if (c[a] <= 0 || c[a] >= g.extents[a] - 1) continue;
            std::array<int, 3> p = c, q = c;
            p[a] -= 1;
            q[a] += 1;
            double d2 =
                std::abs(f.values[g.index(q)] - 2.0 * f.values[idx] + f.values[g.index(p)]);
            d2_max = std::max(d2_max, d2 / (g.h * g.h));
        }
    }
}

// Unit directions inside the cone: axis, edge generators, and deterministic
// interior samples.
std::vector<Vec> cone_directions(const Cone& cone, int dim, int seeded) {
    std::vector<Vec> dirs;
    dirs.push_back(cone.mu);
    if (cone.theta > 1e-12) {
        if (dim == 2) {
            Vec perp{-cone.mu[1], cone.mu[0], 0};
            for (int s = -1; s <= 1; s += 2)
                dirs.push_back(std::cos(cone.theta) * cone.mu +
                               (s * std::sin(cone.theta)) * perp);
            Rng rng(0x636f6e65ULL);
            for (int i = 0; i < seeded; ++i) {
                double ang = rng.next_in(-cone.theta, cone.theta);
                dirs.push_back(std::cos(ang) * cone.mu + std::sin(ang) * perp);
            }
        } else {
            Vec e1 = std::abs(cone.mu[0]) < 0.9 ? Vec{1, 0, 0} : Vec{0, 1, 0};
            Vec u = normalized(e1 - dot(e1, cone.mu) * cone.mu);
            Vec v = cross(cone.mu, u);
            for (int i = 0; i < 8; ++i) {
                double az = 2.0 * M_PI * i / 8.0;
                dirs.push_back(std::cos(cone.theta) * cone.mu +
                               std::sin(cone.theta) * (std::cos(az) * u + std::sin(az) * v));
            }
            Rng rng(0x636f6e65ULL);
            for (int i = 0; i < seeded; ++i) {
                double ang = cone.theta * std::sqrt(rng.next_unit());
                double az = 2.0 * M_PI * rng.next_unit();
                dirs.push_back(std::cos(ang) * cone.mu +
                               std::sin(ang) * (std::cos(az) * u + std::sin(az) * v));
            }
        }
    }
    return dirs;
}

double theta_of_beta(double beta, int d) {
    if (d == 2) return theta_beta_closed_2d(beta).theta_beta;
    double lo = 0.05, hi = M_PI / 2.0;
    // beta_theta decreases in theta; bisect.
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        (beta_theta(mid, d) > beta ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

DiagnosticsReport check_eps_a_monotone(const GridField& field, const MonotoneQuery& q) {
    field.validate();
    const Grid& g = field.grid;
    if (q.eps < 4.0 * g.h - 1e-12)
        throw std::invalid_argument("monotone check: eps below the 4h resolution floor");

    double max_abs = 0, d2_max = 0;
    long win_nodes = 0;
    window_scales(field, q.window, max_abs, d2_max, win_nodes);
    if (win_nodes == 0) throw std::runtime_error("monotone check: window contains no nodes");
    double tol = q.tol_rel * std::max(1.0, max_abs) + 0.25 * d2_max * g.h * g.h;
    double st = std::sin(q.cone.theta);
    double factor = 1.0 + q.a * q.eps;

    long checked = 0, skipped = 0, viol = 0;
    double worst = std::numeric_limits<double>::max();
    Vec worst_x{0, 0, 0};
    double worst_eps = 0, worst_wx = 0, worst_min = 0;
    double diam = 0.0;
    for (int a = 0; a < g.dim; ++a) diam = std::max(diam, g.h * (g.extents[a] - 1));

    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        Vec x = g.position(idx);
        if (!q.window.contains(x, g.dim)) continue;
        double wx = field.values[idx];
        for (int k = 0; k < q.ladder; ++k) {
            double epp = q.eps * double(1 << k);
            if (epp > diam) break;
            Vec yc = x + epp * q.cone.mu;
            double rad = epp * st;
            bool inside = true;
            for (int a = 0; a < g.dim; ++a) {
                double lo = g.origin[a], hi = g.origin[a] + g.h * (g.extents[a] - 1);
                if (yc[a] - rad < lo - 1e-12 || yc[a] + rad > hi + 1e-12) inside = false;
            }
            if (!inside) {
                ++skipped;
                continue;
            }
            double m = ball_min(field, yc, rad);
            double slack = m - factor * wx;
            ++checked;
            if (slack < worst) {
                worst = slack;
                worst_x = x;
                worst_eps = epp;
                worst_wx = wx;
                worst_min = m;
            }
            if (slack < -tol) ++viol;
        }
    }
    if (checked == 0) throw std::runtime_error("monotone check: no probe fits inside the grid");

    DiagnosticsReport rep;
    rep.name = "eps_a_monotone";
    rep.pass = viol == 0;
    rep.measured["checked"] = double(checked);
    rep.measured["skipped"] = double(skipped);
    rep.measured["violations"] = double(viol);
    rep.measured["worst_slack"] = worst;
    rep.measured["tol"] = tol;
    rep.set_witness(worst_x);
    rep.witness_values["eps_prime"] = worst_eps;
    rep.witness_values["w_at_x"] = worst_wx;
    rep.witness_values["ball_min"] = worst_min;
    rep.config["eps"] = q.eps;
    rep.config["a"] = q.a;
    rep.config["theta"] = q.cone.theta;
    rep.config["mu_x"] = q.cone.mu[0];
    rep.config["mu_y"] = q.cone.mu[1];
    rep.config["mu_z"] = q.cone.mu[2];
    rep.config["ladder"] = double(q.ladder);
    rep.config["tol_rel"] = q.tol_rel;
    return rep;
}

DiagnosticsReport check_full_monotone(const GridField& field, const Cone& cone,
                                      const Window& window, double step, double tol_rel) {
    field.validate();
    const Grid& g = field.grid;
    if (step <= 0.0) step = 2.0 * g.h;
    double max_abs = 0, d2_max = 0;
    long win_nodes = 0;
    window_scales(field, window, max_abs, d2_max, win_nodes);
    if (win_nodes == 0) throw std::runtime_error("monotone check: window contains no nodes");
    double tol = tol_rel * std::max(1.0, max_abs) + 0.25 * d2_max * g.h * g.h;

    std::vector<Vec> dirs = cone_directions(cone, g.dim, 8);
    long checked = 0, viol = 0;
    double worst = std::numeric_limits<double>::max();
    Vec worst_x{0, 0, 0}, worst_p{0, 0, 0};
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        Vec x = g.position(idx);
        if (!window.contains(x, g.dim)) continue;
        double wx = field.values[idx];
        for (const Vec& p : dirs) {
            Vec y = x + step * p;
            if (!in_box(g, y)) continue;
            double slack = field.interp(y) - wx;
            ++checked;
            if (slack < worst) {
                worst = slack;
                worst_x = x;
                worst_p = p;
            }
            if (slack < -tol) ++viol;
        }
    }
    if (checked == 0) throw std::runtime_error("monotone check: no probe fits inside the grid");

    DiagnosticsReport rep;
    rep.name = "full_monotone";
    rep.pass = viol == 0;
    rep.measured["checked"] = double(checked);
    rep.measured["violations"] = double(viol);
    rep.measured["worst_slack"] = worst;
    rep.measured["tol"] = tol;
    rep.set_witness(worst_x);
    rep.witness_values["dir_x"] = worst_p[0];
    rep.witness_values["dir_y"] = worst_p[1];
    rep.witness_values["dir_z"] = worst_p[2];
    rep.config["step"] = step;
    rep.config["theta"] = cone.theta;
    rep.note = "pass means non-decreasing along every sampled cone direction at the probe step";
    return rep;
}

std::vector<std::array<double, 2>> growth_curve(const GridField& field, const PositiveSet& pset,
                                                const Vec& mu,
                                                const std::vector<double>& distances) {
    field.validate();
    const Grid& g = field.grid;
    std::vector<Vec> fronts = refined_front_points(field, pset);
    if (fronts.empty()) throw std::runtime_error("growth fit: no front points");
    for (double s : distances)
        if (s < 4.0 * g.h - 1e-12)
            throw std::invalid_argument("growth fit: distance below the 4h floor");

    std::vector<std::array<double, 2>> curve;
    for (double s : distances) {
        double m = std::numeric_limits<double>::max();
        bool any = false;
        for (const Vec& x0 : fronts) {
            Vec y = x0 + s * mu;
            if (!in_box(g, y)) continue;
            m = std::min(m, field.interp(y));
            any = true;
        }
        if (any && m > 0.0) curve.push_back({s, m});
    }
    return curve;
}

DiagnosticsReport fit_growth_exponent(const GridField& field, const PositiveSet& pset,
                                      const Vec& mu, const std::vector<double>& distances) {
    std::vector<std::array<double, 2>> curve = growth_curve(field, pset, mu, distances);
    std::vector<double> ls, lg;
    for (const auto& p : curve) {
        ls.push_back(std::log(p[0]));
        lg.push_back(std::log(p[1]));
    }
    if (ls.size() < 4) throw std::runtime_error("growth fit: fewer than 4 usable distances");
    Ols fit = fit_line(ls, lg);

    DiagnosticsReport rep;
    rep.name = "growth_exponent";
    rep.pass = true;
    rep.measured["beta_hat"] = fit.slope;
    rep.measured["c_hat"] = std::exp(fit.intercept);
    rep.measured["rms"] = fit.rms;
    rep.measured["usable"] = double(ls.size());
    rep.measured["dropped"] = double(distances.size() - ls.size());
    rep.config["mu_x"] = mu[0];
    rep.config["mu_y"] = mu[1];
    rep.config["mu_z"] = mu[2];
    return rep;
}

DiagnosticsReport check_gradient_distance(const GridField& field, const PositiveSet& pset,
                                          double d_lo, double d_hi, double c_cap) {
    field.validate();
    const Grid& g = field.grid;
    double scale = field.max_abs();
    long nodes = 0, zero_grad = 0;
    double c_hat = 0.0;
    Vec worst_x{0, 0, 0};
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        if (!pset.contains(idx)) continue;
        double w = field.values[idx];
        if (w <= pset.tol_pos) continue;
        Vec x = g.position(idx);
        double d = distance_to_front(pset, x);
        if (d < d_lo || d > d_hi) continue;
        std::array<int, 3> c = g.coords(idx);
        Vec grad = field.gradient_at(c[0], c[1], c[2]);
        double gn = norm(grad);
        ++nodes;
        if (gn < 1e-14 * std::max(1.0, scale)) {
            ++zero_grad;
            worst_x = x;
            continue;
        }
        double ratio = w / (gn * d);
        if (ratio > c_hat) {
            c_hat = ratio;
            worst_x = x;
        }
    }
    DiagnosticsReport rep;
    rep.name = "gradient_distance";
    rep.pass = nodes > 0 && zero_grad == 0 && c_hat <= c_cap;
    rep.measured["C_hat"] = c_hat;
    rep.measured["band_nodes"] = double(nodes);
    rep.measured["zero_gradient_violations"] = double(zero_grad);
    rep.set_witness(worst_x);
    rep.config["d_lo"] = d_lo;
    rep.config["d_hi"] = d_hi;
    rep.config["C_cap"] = c_cap;
    return rep;
}

DiagnosticsReport check_interior_monotonicity(const GridField& field, double f_sup,
                                              const Vec& mu, double eps, double alpha,
                                              double kappa1, double gamma_bar, double C,
                                              const Vec& center) {
    field.validate();
    const Grid& g = field.grid;
    double ea = alpha < 0.0 ? 0.0 : std::pow(eps, alpha);

    MonotoneQuery pre;
    pre.cone = Cone(mu, 0.0);
    pre.eps = eps;
    pre.a = ea;
    pre.window = Window::ball_box(center, std::pow(eps, 1.0 - kappa1), g.dim);
    pre.ladder = 2;
    DiagnosticsReport pre_rep = check_eps_a_monotone(field, pre);
    if (!pre_rep.pass)
        throw std::runtime_error(
            "interior monotonicity: precondition (eps, eps^alpha) monotonicity failed");

    double factor = ea * (1.0 - C * std::pow(eps, kappa1));
    double load = C * std::pow(eps, 1.0 + gamma_bar - kappa1) * f_sup;
    double max_abs = 0, d2_max = 0;
    long win_nodes = 0;
    Window win = Window::ball_box(center, eps, g.dim);
    window_scales(field, win, max_abs, d2_max, win_nodes);
    double tol = 1e-8 * std::max(1.0, max_abs) + d2_max * g.h;

    long checked = 0, viol = 0, implied = 0;
    double rhs_min = std::numeric_limits<double>::max();
    double worst = std::numeric_limits<double>::max();
    Vec worst_x{0, 0, 0};
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        Vec x = g.position(idx);
        if (!win.contains(x, g.dim)) continue;
        if (norm(x - center) > eps + 1e-12) continue;
        std::array<int, 3> c = g.coords(idx);
        double dmu = dot(field.gradient_at(c[0], c[1], c[2]), mu);
        double rhs = factor * field.values[idx] - load;
        rhs_min = std::min(rhs_min, rhs);
        double slack = dmu - rhs;
        ++checked;
        if (slack < worst) {
            worst = slack;
            worst_x = x;
        }
        if (slack < -tol) ++viol;
        if (ea * field.values[idx] >= 2.0 * load && dmu >= -tol) ++implied;
    }
    if (checked == 0) throw std::runtime_error("interior monotonicity: empty probe ball");

    DiagnosticsReport rep;
    rep.name = "interior_monotonicity";
    rep.pass = viol == 0;
    rep.measured["checked"] = double(checked);
    rep.measured["violations"] = double(viol);
    rep.measured["pass_rate"] = 1.0 - double(viol) / double(checked);
    rep.measured["rhs_min"] = rhs_min;
    rep.measured["implied_full_fraction"] = double(implied) / double(checked);
    rep.measured["worst_slack"] = worst;
    rep.set_witness(worst_x);
    rep.config["eps"] = eps;
    rep.config["alpha"] = alpha;
    rep.config["kappa1"] = kappa1;
    rep.config["gamma_bar"] = gamma_bar;
    rep.config["C"] = C;
    rep.config["f_sup"] = f_sup;
    return rep;
}

FrontGraph fit_front_lipschitz(const EvolutionRun& run, double r, int axis, int dir,
                               double c_theta) {
    if (run.frames.empty()) throw std::invalid_argument("front hull: run has no frames");
    const Grid& g = run.frames.front().u.grid;
    if (r < 4.0 * g.h) throw std::invalid_argument("front hull: r below the 4h floor");
    double t0 = run.frames.front().t, t_last = run.frames.back().t;
    double dt = c_theta * r * r;
    long K = long(std::floor((t_last - t0) / dt + 1e-9));
    if (K < 1) throw std::invalid_argument("front hull: time window shorter than c_theta r^2");

    std::map<std::size_t, FrontGraph> cache;
    auto graph_of = [&](std::size_t fi) -> const FrontGraph& {
        auto it = cache.find(fi);
        if (it != cache.end()) return it->second;
        FrontGraph fg = extract_front_graph(run.frames[fi].u, axis, dir);
        if (!fg.graph_ok) throw std::runtime_error("front hull: front not a graph");
        return cache.emplace(fi, std::move(fg)).first->second;
    };

    FrontGraph hull = graph_of(0);
    std::vector<double> heights = hull.height;
    for (long k = 1; k <= K; ++k) {
        double tk = t0 + double(k) * dt;
        std::size_t hi = 0;
        while (hi + 1 < run.frames.size() && run.frames[hi].t < tk - 1e-12) ++hi;
        std::size_t lo = hi > 0 ? hi - 1 : 0;
        const FrontGraph& ga = graph_of(lo);
        const FrontGraph& gb = graph_of(hi);
        double ta = run.frames[lo].t, tb = run.frames[hi].t;
        double lam = tb > ta ? std::clamp((tk - ta) / (tb - ta), 0.0, 1.0) : 0.0;
        for (std::size_t col = 0; col < heights.size(); ++col) {
            if (!ga.has(col) || !gb.has(col)) {
                heights[col] = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            double hk = (1.0 - lam) * ga.height[col] + lam * gb.height[col];
            if (std::isfinite(heights[col]))
                heights[col] = dir > 0 ? std::max(heights[col], hk) : std::min(heights[col], hk);
        }
    }
    hull.height = std::move(heights);
    hull.time = t0;
    double lip = 0.0;
    for (std::size_t col = 0; col + 1 < hull.height.size(); ++col)
        if (hull.has(col) && hull.has(col + 1))
            lip = std::max(lip, std::abs(hull.height[col + 1] - hull.height[col]) / g.h);
    hull.lip_space = lip;
    return hull;
}

DiagnosticsReport fit_front_lipschitz_report(const EvolutionRun& run, double r, int axis,
                                             int dir, double theta, double C_time,
                                             double c_theta) {
    FrontGraph hull = fit_front_lipschitz(run, r, axis, dir, c_theta);
    double t0 = run.frames.front().t;
    double dt = c_theta * r * r;
    double lip_time = 0.0;
    FrontGraph prev = extract_front_graph(run.frames.front().u, axis, dir);
    for (std::size_t fi = 1; fi < run.frames.size(); ++fi) {
        if (run.frames[fi].t > t0 + dt * std::floor((run.frames.back().t - t0) / dt) + 1e-12)
            break;
        FrontGraph cur = extract_front_graph(run.frames[fi].u, axis, dir);
        lip_time = std::max(lip_time, front_graph_time_lipschitz(prev, cur));
        prev = std::move(cur);
    }
    DiagnosticsReport rep;
    rep.name = "front_lipschitz";
    double cot_cap = theta > 1e-9 ? 1.0 / std::tan(theta) : std::numeric_limits<double>::max();
    double time_cap = C_time / r;
    rep.pass = hull.lip_space <= cot_cap && lip_time <= time_cap;
    rep.measured["lip_space"] = hull.lip_space;
    rep.measured["lip_time"] = lip_time;
    rep.config["cot_theta_cap"] = cot_cap;
    rep.config["time_cap"] = time_cap;
    rep.config["r"] = r;
    rep.config["c_theta"] = c_theta;
    return rep;
}

DiagnosticsReport measure_cone_improvement(const EvolutionRun& run, double eps0, double j,
                                           const Cone& cone0,
                                           const ConeImprovementConfig& cfg) {
    if (run.frames.empty()) throw std::invalid_argument("cone improvement: run has no frames");
    const Grid& g = run.frames.front().u.grid;
    bool degenerate = !(j > 0.0 && j < 1.0);

    auto rung_pass = [&](double eps_k, double theta_k, double R_k, DiagnosticsReport* out) {
        MonotoneQuery q;
        q.cone = Cone(cone0.mu, theta_k);
        q.eps = eps_k;
        q.a = std::pow(eps_k, cfg.alpha);
        q.window = Window::ball_box(cfg.center, R_k, g.dim);
        q.ladder = cfg.ladder;
        for (const Frame& fr : run.frames) {
            DiagnosticsReport r = check_eps_a_monotone(fr.u, q);
            if (out) *out = r;
            if (!r.pass) return false;
        }
        return true;
    };

    DiagnosticsReport first;
    if (!rung_pass(eps0, cone0.theta, cfg.R0, &first))
        throw std::runtime_error("cone improvement: initial monotonicity check failed");

    long k = 0;
    double theta_k = cone0.theta, R_k = cfg.R0, eps_k = eps0;
    double failure_scale = std::numeric_limits<double>::quiet_NaN();
    std::string stall_note;
    bool stalled = false;
    while (!degenerate) {
        double eps_next = eps_k * j;
        if (eps_next < 4.0 * g.h) break;  // resolution floor
        double theta_next = theta_k - cfg.C * std::pow(eps_k, cfg.gamma3);
        double R_next = R_k * j;
        if (theta_next <= 0.05) {
            stall_note = "half-angle correction exhausted the cone";
            stalled = true;
            break;
        }
        bool ok = false;
        try {
            ok = rung_pass(eps_next, theta_next, R_next, nullptr);
        } catch (const std::exception& e) {
            stall_note = std::string("window unresolvable: ") + e.what();
            stalled = true;
            break;
        }
        if (!ok) {
            failure_scale = eps_next;
            stalled = true;
            stall_note = "monotonicity failed at the recorded scale";
            break;
        }
        eps_k = eps_next;
        theta_k = theta_next;
        R_k = R_next;
        ++k;
    }

    bool full_pass = false;
    try {
        Window win = Window::ball_box(cfg.center, R_k, g.dim);
        DiagnosticsReport fr =
            check_full_monotone(run.frames.front().u, Cone(cone0.mu, theta_k), win);
        full_pass = fr.pass;
    } catch (const std::exception&) {
        full_pass = false;
    }

    DiagnosticsReport rep;
    rep.name = "cone_improvement";
    rep.pass = !std::isfinite(failure_scale) && full_pass;
    rep.measured["rungs_passed"] = double(k);
    rep.measured["eps_final"] = eps_k;
    rep.measured["theta_final"] = theta_k;
    rep.measured["window_final"] = R_k;
    rep.measured["failure_scale"] = failure_scale;
    rep.measured["full_monotone_final"] = full_pass ? 1.0 : 0.0;
    rep.config["eps0"] = eps0;
    rep.config["j"] = j;
    rep.config["theta0"] = cone0.theta;
    rep.config["alpha"] = cfg.alpha;
    rep.config["C"] = cfg.C;
    rep.config["gamma3"] = cfg.gamma3;
    rep.config["R0"] = cfg.R0;
    if (degenerate) rep.note = "degenerate ladder (j outside (0,1)): single rung";
    else if (stalled) rep.note = stall_note;
    return rep;
}

DiagnosticsReport check_lipschitz_implies_cone(const GridField& field, const FrontGraph& front,
                                               double beta, double c_floor, double r_max) {
    field.validate();
    const Grid& g = field.grid;
    double cap;
    std::string cap_note;
    if (g.dim == 2) {
        ThetaPair tp = theta_beta_closed_2d(beta);
        double c1 = 1.0 / std::tan(tp.theta_beta);
        double c2 = tp.theta_beta_prime > 1e-9 ? 1.0 / std::tan(tp.theta_beta_prime)
                                               : std::numeric_limits<double>::max();
        cap = std::min(c1, c2);
    } else {
        cap = 1.0 / std::tan(theta_of_beta(beta, g.dim));
        cap_note = "d=3 cap uses the primal cone angle only";
    }
    if (front.lip_space > cap + 1e-12)
        throw std::invalid_argument(
            "lipschitz-cone: front Lipschitz constant exceeds the cone bound");

    int axis = front.axis, dir = front.dir;
    double tolw = 1e-10 * std::max(1.0, field.max_abs());
    double r_hat = 0.0, c_hat = 0.0;
    Vec worst_x{0, 0, 0};
    int a0 = -1, a1 = -1;
    for (int a = 0; a < g.dim; ++a)
        if (a != axis) (a0 < 0 ? a0 : a1) = a;
    for (double r = r_max; r >= 4.0 * g.h - 1e-12; r *= 0.5) {
        double c_min = std::numeric_limits<double>::max();
        Vec arg{0, 0, 0};
        long nodes = 0;
        for (std::size_t idx = 0; idx < g.size(); ++idx) {
            double w = field.values[idx];
            if (w <= tolw) continue;
            std::array<int, 3> c = g.coords(idx);
            std::size_t col = g.dim == 2 ? std::size_t(c[a0])
                                        : std::size_t(c[a0]) +
                                              std::size_t(g.extents[a0]) * std::size_t(c[a1]);
            if (col >= front.column_count() || !front.has(col)) continue;
            Vec x = g.position(idx);
            bool lateral = std::abs(x[a0] - 0.5 * (g.origin[a0] +
                                                   g.origin[a0] + g.h * (g.extents[a0] - 1))) <= r;
            if (g.dim == 3)
                lateral = lateral &&
                          std::abs(x[a1] - 0.5 * (g.origin[a1] + g.origin[a1] +
                                                  g.h * (g.extents[a1] - 1))) <= r;
            if (!lateral) continue;
            double depth = (front.height[col] - x[axis]) * double(dir);
            if (depth <= 0.0 || depth > r) continue;
            double dd = -double(dir) * field.gradient_at(c[0], c[1], c[2])[axis];
            ++nodes;
            double ratio = dd / w;
            if (ratio < c_min) {
                c_min = ratio;
                arg = x;
            }
        }
        if (nodes > 0 && c_min >= c_floor) {
            r_hat = r;
            c_hat = c_min;
            worst_x = arg;
            break;
        }
    }

    DiagnosticsReport rep;
    rep.name = "lipschitz_implies_cone";
    rep.pass = r_hat > 0.0;
    rep.measured["r_hat"] = r_hat;
    rep.measured["c_hat"] = c_hat;
    rep.measured["lip_space"] = front.lip_space;
    rep.set_witness(worst_x);
    rep.config["beta"] = beta;
    rep.config["c_floor"] = c_floor;
    rep.config["lip_cap"] = cap;
    rep.note = cap_note;
    return rep;
}

DiagnosticsReport check_hcondition(const EvolutionRun& run, const DriftField& drift, double C0,
                                   int max_samples, double tol_rel) {
    if (run.frames.size() < 3) throw std::invalid_argument("h-condition: needs >= 3 frames");
    const Frame& f0 = run.frames.front();
    const Grid& g = f0.u.grid;
    double umax = f0.u.max_value();
    double tol = tol_rel * std::max(1.0, umax);

    std::vector<std::size_t> samples;
    for (std::size_t idx = 0; idx < g.size(); ++idx)
        if (f0.u.values[idx] > 0.05 * umax) samples.push_back(idx);
    std::size_t stride = std::max<std::size_t>(1, samples.size() / std::size_t(max_samples));

    long pairs = 0, viol = 0, escaped = 0;
    double worst_drop = 0.0;
    Vec worst_x{0, 0, 0};
    for (std::size_t si = 0; si < samples.size(); si += stride) {
        Vec x0 = g.position(samples[si]);
        double prev = f0.u.values[samples[si]];
        bool ok = true;
        for (std::size_t fi = 1; fi < run.frames.size(); ++fi) {
            const Frame& fr = run.frames[fi];
            double dt = fr.t - f0.t;
            Vec xt = integrate_streamline(drift, x0, dt, std::max(16, int(64 * dt))).endpoint();
            if (!in_box(g, xt)) {
                ++escaped;
                ok = false;
                break;
            }
            double cur = std::exp(C0 * dt) * fr.u.interp(xt);
            ++pairs;
            double drop = prev - cur;
            if (drop > tol) {
                ++viol;
                if (drop > worst_drop) {
                    worst_drop = drop;
                    worst_x = x0;
                }
            }
            prev = cur;
        }
        (void)ok;
    }
    if (pairs == 0) throw std::runtime_error("h-condition: no usable streamline samples");

    DiagnosticsReport rep;
    rep.name = "h_condition";
    rep.pass = viol == 0;
    rep.measured["pairs"] = double(pairs);
    rep.measured["violations"] = double(viol);
    rep.measured["violation_quantile"] = double(viol) / double(pairs);
    rep.measured["worst_drop"] = worst_drop;
    rep.measured["escaped_samples"] = double(escaped);
    rep.set_witness(worst_x);
    rep.config["C0"] = C0;
    rep.config["tol"] = tol;
    return rep;
}

DiagnosticsReport carleson_check(const EvolutionRun& run, double delta, int axis, int dir,
                                 double m_cap, double c_d) {
    if (run.frames.empty()) throw std::invalid_argument("carleson: run has no frames");
    const Frame& f0 = run.frames.front();
    const Grid& g = f0.u.grid;
    if (delta < 4.0 * g.h) throw std::runtime_error("carleson: delta below the 4h resolution");
    FrontGraph fg = extract_front_graph(f0.u, axis, dir);
    if (fg.lip_space > c_d)
        throw std::runtime_error("carleson: front graph steeper than the Lipschitz cap");

    auto nearest = [&](const Vec& x) {
        std::array<int, 3> c{0, 0, 0};
        for (int a = 0; a < g.dim; ++a)
            c[a] = std::clamp(int(std::lround((x[a] - g.origin[a]) / g.h)), 0, g.extents[a] - 1);
        return g.index(c);
    };

    double m_hat = 0.0;
    long probes = 0, skipped = 0;
    Vec worst_x{0, 0, 0};
    double horizon = run.frames.back().t;
    for (std::size_t col = 0; col < fg.column_count(); ++col) {
        if (!fg.has(col)) continue;
        Vec x0 = fg.front_point(col);
        Vec x1 = x0, x2 = x0;
        x1[axis] -= 0.75 * delta * double(dir);
        x2[axis] += 0.75 * delta * double(dir);
        if (!in_box(g, x1) || !in_box(g, x2)) {
            ++skipped;
            continue;
        }
        std::size_t i1 = nearest(x1), i2 = nearest(x2);
        if (!f0.mask.contains(i1) || f0.mask.contains(i2)) {
            ++skipped;
            continue;
        }
        double u1 = f0.u.interp(x1);
        double T2 = run.hit_time.values[i2];
        if (!(u1 > 0.0) || !std::isfinite(T2) || T2 <= f0.t || T2 > horizon) {
            ++skipped;
            continue;
        }
        double m = delta * delta / (u1 * (T2 - f0.t));
        ++probes;
        if (m > m_hat) {
            m_hat = m;
            worst_x = x0;
        }
    }
    if (probes == 0) throw std::runtime_error("carleson: no usable probe pairs");

    DiagnosticsReport rep;
    rep.name = "carleson";
    rep.pass = m_hat <= m_cap;
    rep.measured["M_hat"] = m_hat;
    rep.measured["probes"] = double(probes);
    rep.measured["skipped"] = double(skipped);
    rep.set_witness(worst_x);
    rep.config["delta"] = delta;
    rep.config["M_cap"] = m_cap;
    rep.config["lip_cap"] = c_d;
    return rep;
}

}  // namespace hs
