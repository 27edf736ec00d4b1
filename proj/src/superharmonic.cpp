#include <cmath>
#include <stdexcept>

#include "hs/elliptic.hpp"

namespace hs {

// Value and gradient bounds for supersolutions of -Lap w = f on a ball.
DiagnosticsReport check_superharmonic_bounds(const GridField& w,
                                             const std::function<double(const Vec&)>& f,
                                             const Vec& center, double r,
                                             const SuperharmonicConfig& cfg) {
    const Grid& g = w.grid;
    const double h = g.h;
    DiagnosticsReport rep;
    rep.name = "superharmonic_bounds";
    rep.config["r"] = r;
    rep.config["c_cap"] = cfg.c_cap;
    rep.config["residual_cap"] = cfg.residual_cap;

    double w0 = w.interp(center);
    if (w0 < 0) throw std::invalid_argument("superharmonic_bounds: negative center value");

    double f_sup = 0.0, w_sup = -1e300, grad_sup = 0.0, resid = 0.0, mono_min = 1e300;
    double w_sup_half = -1e300;
    Vec worst{0, 0, 0}, worst_grad{0, 0, 0};
    bool any = false;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        int i, j, k;
        g.coords(idx, i, j, k);
        Vec x = g.position(i, j, k);
        double d = norm(x - center);
        if (d > 2 * r) continue;
        bool interior = i > 0 && i < g.extents[0] - 1 && j > 0 && j < g.extents[1] - 1 &&
                        (g.dim == 2 || (k > 0 && k < g.extents[2] - 1));
        if (!interior) throw std::invalid_argument("superharmonic_bounds: B_2r leaves the grid");
        any = true;
        f_sup = std::max(f_sup, std::abs(f(x)));

        // 5/7-point residual of -Lap w = f.
        double lap = 0.0;
        int c[3] = {i, j, k};
        for (int a = 0; a < g.dim; ++a) {
            int lo[3] = {c[0], c[1], c[2]}, hi[3] = {c[0], c[1], c[2]};
            lo[a] -= 1;
            hi[a] += 1;
            lap += (w.values[g.index(hi[0], hi[1], hi[2])] - 2 * w.values[idx] +
                    w.values[g.index(lo[0], lo[1], lo[2])]) / (h * h);
        }
        resid = std::max(resid, std::abs(lap + f(x)));

        Vec grad = w.gradient_at(i, j, k);
        if (cfg.mu) mono_min = std::min(mono_min, dot(grad, *cfg.mu));
        if (d <= r) {
            if (w.values[idx] > w_sup) { w_sup = w.values[idx]; worst = x; }
            double gn = norm(grad);
            if (gn > grad_sup) { grad_sup = gn; worst_grad = x; }
            if (cfg.mu && dot(x - center, *cfg.mu) <= 1e-12)
                w_sup_half = std::max(w_sup_half, w.values[idx]);
        }
    }
    if (!any) throw std::invalid_argument("superharmonic_bounds: ball contains no nodes");

    double res_scale = std::max(f_sup, w.max_abs() / (r * r));
    rep.measured["fd_residual_rel"] = resid / std::max(res_scale, 1e-300);
    if (rep.measured["fd_residual_rel"] > cfg.residual_cap)
        throw std::runtime_error("superharmonic_bounds: field does not satisfy -Lap w = f on B_2r");

    double denom_v = w0 + r * r * f_sup;
    double denom_g = w0 / r + r * f_sup;
    double c_value = denom_v > 0 ? w_sup / denom_v : 1e300;
    double c_grad = denom_g > 0 ? grad_sup / denom_g : (grad_sup > 0 ? 1e300 : 0.0);
    rep.measured["C_value"] = c_value;
    rep.measured["C_gradient"] = c_grad;
    rep.measured["w_center"] = w0;
    rep.measured["f_sup"] = f_sup;
    if (cfg.mu) {
        rep.measured["mono_min"] = mono_min;
        if (mono_min < -cfg.mono_tol - 1e3 * h * h)
            rep.note = "directional assumption grad_mu w >= 0 fails on B_2r";
        if (w_sup_half > -1e300)
            rep.measured["C_value_halfball"] = denom_v > 0 ? w_sup_half / denom_v : 1e300;
    }
    rep.set_witness(worst);
    rep.witness_values["w_sup"] = w_sup;
    rep.witness_values["grad_sup"] = grad_sup;
    rep.witness_values["grad_at"] = norm(worst_grad - center);
    rep.pass = c_value <= cfg.c_cap && c_grad <= cfg.c_cap && rep.note.empty();
    return rep;
}

}  // namespace hs
