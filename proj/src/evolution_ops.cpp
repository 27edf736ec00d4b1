#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "hs/evolution.hpp"

namespace hs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Chebyshev dilation of a node mask by `cells` layers.
std::vector<std::uint8_t> dilate_mask(const Grid& g, const std::vector<std::uint8_t>& mask,
                                      int cells) {
    std::vector<std::uint8_t> cur = mask;
    std::vector<std::uint8_t> next(mask.size());
    for (int pass = 0; pass < cells; ++pass) {
        next = cur;
        for (std::size_t i = 0; i < cur.size(); ++i) {
            if (cur[i]) continue;
            auto c = g.coords(i);
            bool hit = false;
            int kr = g.dim == 3 ? 1 : 0;
            for (int dk = -kr; dk <= kr && !hit; ++dk)
                for (int dj = -1; dj <= 1 && !hit; ++dj)
                    for (int di = -1; di <= 1 && !hit; ++di) {
                        if (!di && !dj && !dk) continue;
                        int q[3] = {c[0] + di, c[1] + dj, c[2] + dk};
                        if (g.in_bounds(q[0], q[1], q[2]) && cur[g.index(q[0], q[1], q[2])])
                            hit = true;
                    }
            if (hit) next[i] = 1;
        }
        cur.swap(next);
    }
    return cur;
}

struct LineFit {
    double slope = 0.0, intercept = 0.0, rms = 0.0;
    int n = 0;
};

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    LineFit out;
    out.n = int(xs.size());
    if (out.n < 2) return out;
    double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / out.n;
    double my = std::accumulate(ys.begin(), ys.end(), 0.0) / out.n;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < out.n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx <= 0.0) return out;
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    double se = 0.0;
    for (int i = 0; i < out.n; ++i) {
        double e = ys[i] - (out.intercept + out.slope * xs[i]);
        se += e * e;
    }
    out.rms = std::sqrt(se / out.n);
    return out;
}

Vec ray_direction(int k, int n, int dim) {
    if (dim == 2) {
        double a = 2.0 * M_PI * k / n;
        return vec2(std::cos(a), std::sin(a));
    }
    // Fibonacci sphere: evenly spread directions, deterministic.
    double z = 1.0 - 2.0 * (k + 0.5) / n;
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double a = k * 2.399963229728653;  // golden angle
    return vec3(r * std::cos(a), r * std::sin(a), z);
}

}  // namespace

DiagnosticsReport verify_comparison(const EvolutionRun& small, const EvolutionRun& big,
                                    int dilate_cells, double value_tol) {
    if (!small.spec.domain.same_layout(big.spec.domain))
        throw std::invalid_argument("verify_comparison: grid mismatch");
    const Grid& g = small.spec.domain;
    DiagnosticsReport rep;
    rep.name = "comparison";
    rep.run_id = small.run_id + " vs " + big.run_id;
    rep.config["dilate_cells"] = dilate_cells;
    rep.config["value_tol"] = value_tol;

    long worst_cells = 0;
    double worst_gap = 0.0;
    int frames_checked = 0;
    for (const Frame& fs : small.frames) {
        const Frame& fb = big.frame_at(fs.t, 1e-9 + 1e-9 * std::abs(fs.t));
        ++frames_checked;
        std::vector<std::uint8_t> fat = dilate_mask(g, fb.mask.mask, dilate_cells);
        long out_cells = 0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (fs.mask.mask[i] && !fat[i]) {
                ++out_cells;
                rep.set_witness(g.position(i));
            }
            if (fs.mask.mask[i] && fb.mask.mask[i]) {
                double gap = fs.u.values[i] - fb.u.values[i];
                if (gap > worst_gap) {
                    worst_gap = gap;
                    rep.set_witness(g.position(i));
                    rep.witness_values["t"] = fs.t;
                    rep.witness_values["u_small"] = fs.u.values[i];
                    rep.witness_values["u_big"] = fb.u.values[i];
                }
            }
        }
        worst_cells = std::max(worst_cells, out_cells);
    }
    rep.measured["frames_checked"] = frames_checked;
    rep.measured["support_cells_outside"] = double(worst_cells);
    rep.measured["value_gap_max"] = worst_gap;
    rep.pass = worst_cells == 0 && worst_gap <= value_tol;
    return rep;
}

DiagnosticsReport expansion_exponent(const EvolutionRun& run, const Vec& point,
                                     const std::vector<double>& times, double expected_slope,
                                     double slope_tol, double r_floor) {
    const Grid& g = run.spec.domain;
    if (r_floor < 0.0) r_floor = 0.75 * g.h;
    DiagnosticsReport rep;
    rep.name = "expansion_exponent";
    rep.run_id = run.run_id;
    rep.set_witness(point);
    rep.config["expected_slope"] = expected_slope;
    rep.config["slope_tol"] = slope_tol;
    rep.config["r_floor"] = r_floor;

    std::vector<double> lx, ly;
    double r_smallest_used = kInf, r_smallest_seen = kInf;
    for (double t : times) {
        const Frame& fr = run.frame_at(t, -1.0);
        double el = fr.t - run.spec.t0;
        if (el <= 0.0) continue;
        double r = -fr.phi.interp(point);
        if (r <= 0.0) continue;
        r_smallest_seen = std::min(r_smallest_seen, r);
        if (r < r_floor) continue;  // below sub-grid trust radius: report only
        r_smallest_used = std::min(r_smallest_used, r);
        lx.push_back(std::log(el));
        ly.push_back(std::log(r));
    }
    LineFit fit = fit_line(lx, ly);
    rep.measured["slope"] = fit.slope;
    rep.measured["fit_rms"] = fit.rms;
    rep.measured["points_used"] = fit.n;
    rep.measured["r_smallest_used"] = r_smallest_used;
    rep.measured["r_smallest_seen"] = r_smallest_seen;
    rep.pass = fit.n >= 3 && std::abs(fit.slope - expected_slope) <= slope_tol;
    if (fit.n < 3) rep.note = "too few resolvable radii for a fit";
    return rep;
}

DiagnosticsReport nondegeneracy_profile(const Frame& frame, const Vec& front_point,
                                        const Vec& inward, const std::vector<double>& deltas,
                                        double c_floor, double slope_cap) {
    DiagnosticsReport rep;
    rep.name = "nondegeneracy_profile";
    rep.frame = -1;
    rep.set_witness(front_point);
    rep.config["c_floor"] = c_floor;
    rep.config["slope_cap"] = slope_cap;
    rep.config["deltas"] = double(deltas.size());
    Vec dir = normalized(inward);

    double c0 = kInf;
    std::vector<double> lx, ly;
    for (double d : deltas) {
        if (!(d > 0.0)) throw std::invalid_argument("nondegeneracy: deltas must be positive");
        double val = frame.u.interp(front_point + d * dir);
        double ratio = val / d;
        c0 = std::min(c0, ratio);
        if (val > 0.0) {
            lx.push_back(std::log(d));
            ly.push_back(std::log(val));
        }
    }
    LineFit fit = fit_line(lx, ly);
    bool sub_linear = fit.n >= 2 && fit.slope > slope_cap;
    rep.measured["c0"] = c0;
    rep.measured["profile_slope"] = fit.slope;
    rep.measured["sub_linear"] = sub_linear ? 1.0 : 0.0;
    rep.pass = c0 >= c_floor && !sub_linear;
    if (sub_linear) rep.note = "value profile decays faster than linearly toward the front point";
    return rep;
}

EvolutionRun comoving_frame(const EvolutionRun& run, const Vec& anchor, int ode_steps) {
    const Grid& g = run.spec.domain;
    EvolutionRun out;
    out.spec = run.spec;
    out.scheme = run.scheme;
    out.trace = run.trace;
    out.run_id = run.run_id + "-comoving";
    out.hit_time = GridField(g, kInf, run.hit_time.time);
    for (const Frame& fr : run.frames) {
        Vec shift = flow_displacement(run.spec.drift, anchor, fr.t - run.spec.t0, ode_steps);
        Frame nf;
        nf.t = fr.t;
        nf.u = GridField(g, 0.0, fr.t);
        nf.phi = GridField(g, 0.0, fr.t);
        std::vector<std::uint8_t> m(g.size(), 0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            Vec x = g.position(i) + shift;
            nf.u.values[i] = fr.u.interp(x);
            nf.phi.values[i] = fr.phi.interp(x);
            m[i] = nf.phi.values[i] < 0.0 ? 1 : 0;
        }
        nf.mask = positive_set_from_mask(g, std::move(m), 0.0);
        out.frames.push_back(std::move(nf));
    }
    return out;
}

DiagnosticsReport forward_positivity_check(const EvolutionRun& run, double t, double delta_t,
                                           double slack_cells, int max_samples) {
    const Grid& g = run.spec.domain;
    const Frame& f0 = run.frame_at(t, -1.0);
    const Frame& f1 = run.frame_at(t + delta_t, -1.0);
    if (!(f1.t > f0.t)) throw std::invalid_argument("forward positivity: need a later frame");

    DiagnosticsReport rep;
    rep.name = "forward_positivity";
    rep.run_id = run.run_id;
    rep.config["t"] = f0.t;
    rep.config["delta_t"] = f1.t - f0.t;
    rep.config["slack_cells"] = slack_cells;

    std::vector<Vec> pts = refined_front_points(f0.u, f0.mask);
    if (pts.empty()) throw std::runtime_error("forward positivity: empty front");
    std::size_t stride = std::max<std::size_t>(1, pts.size() / std::size_t(max_samples));
    double slack = slack_cells * g.h;
    double worst = -kInf;
    int used = 0;
    for (std::size_t k = 0; k < pts.size(); k += stride) {
        Vec x = pts[k];
        Streamline sl = integrate_streamline(run.spec.drift, x, f1.t - f0.t, 64);
        Vec y = sl.endpoint();
        double margin = f1.phi.interp(y);
        ++used;
        if (margin > worst) {
            worst = margin;
            rep.set_witness(y);
            rep.witness_values["phi_later"] = margin;
            rep.witness_values["x0_0"] = x[0];
            rep.witness_values["x0_1"] = x[1];
        }
    }
    rep.measured["samples"] = used;
    rep.measured["phi_later_max"] = worst;
    rep.measured["allowed"] = slack;
    rep.pass = worst <= slack;
    return rep;
}

std::vector<double> front_radii(const Frame& frame, const Vec& center, int ndirs) {
    const Grid& g = frame.phi.grid;
    if (frame.phi.interp(center) >= 0.0)
        throw std::runtime_error("front_radii: center is not inside the set");
    double box = 0.0;
    for (int a = 0; a < g.dim; ++a) box = std::max(box, g.h * (g.extents[a] - 1));
    std::vector<double> radii;
    radii.reserve(ndirs);
    for (int k = 0; k < ndirs; ++k) {
        Vec dir = ray_direction(k, ndirs, g.dim);
        double lo = 0.0, hi = 0.0;
        bool found = false;
        for (double s = 0.5 * g.h; s <= box; s += 0.5 * g.h) {
            if (frame.phi.interp(center + s * dir) >= 0.0) {
                hi = s;
                lo = s - 0.5 * g.h;
                found = true;
                break;
            }
        }
        if (!found) throw std::runtime_error("front_radii: ray never leaves the set");
        for (int it = 0; it < 48; ++it) {
            double mid = 0.5 * (lo + hi);
            if (frame.phi.interp(center + mid * dir) < 0.0)
                lo = mid;
            else
                hi = mid;
        }
        radii.push_back(0.5 * (lo + hi));
    }
    return radii;
}

double radial_front_radius(const Frame& frame, const Vec& center, int ndirs) {
    std::vector<double> r = front_radii(frame, center, ndirs);
    return std::accumulate(r.begin(), r.end(), 0.0) / double(r.size());
}

void write_run_archive(const EvolutionRun& run, const std::string& dir, bool binary) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(dir) / "frames");

    nlohmann::json man;
    man["schema_version"] = kSchemaVersion;
    man["run_id"] = run.run_id;
    man["scheme"] = run.scheme == Scheme::Obstacle ? "obstacle" : "levelset";
    man["t0"] = run.spec.t0;
    man["t_end"] = run.spec.t_end;
    man["dt"] = run.spec.dt;
    man["grid"] = {{"dim", run.spec.domain.dim},
                   {"h", run.spec.domain.h},
                   {"extents", {run.spec.domain.extents[0], run.spec.domain.extents[1],
                                run.spec.domain.extents[2]}},
                   {"origin", {run.spec.domain.origin[0], run.spec.domain.origin[1],
                               run.spec.domain.origin[2]}}};

    std::ofstream trace(fs::path(dir) / "trace.csv");
    trace << "t,area,umax,front_speed_max,sweeps\n";
    trace.precision(17);
    for (const StepTrace& tr : run.trace)
        trace << tr.t << "," << tr.area << "," << tr.umax << "," << tr.front_speed_max << ","
              << tr.sweeps << "\n";

    std::ofstream fronts(fs::path(dir) / "fronts.csv");
    fronts << "t,x0,x1,x2\n";
    fronts.precision(17);

    nlohmann::json flist = nlohmann::json::array();
    int fi = 0;
    char buf[32];
    for (const Frame& fr : run.frames) {
        std::snprintf(buf, sizeof buf, "%04d", fi);
        std::string tag(buf);
        std::string upath = "frames/u_" + tag + ".field";
        std::string ppath = "frames/phi_" + tag + ".field";
        write_field(fr.u, (fs::path(dir) / upath).string(), binary);
        write_field(fr.phi, (fs::path(dir) / ppath).string(), binary);
        flist.push_back({{"t", fr.t}, {"u", upath}, {"phi", ppath}});
        for (const Vec& p : refined_front_points(fr.u, fr.mask))
            fronts << fr.t << "," << p[0] << "," << p[1] << "," << p[2] << "\n";
        ++fi;
    }
    man["frames"] = flist;
    man["trace"] = "trace.csv";
    man["fronts"] = "fronts.csv";
    write_field(run.hit_time, (fs::path(dir) / "hit_time.field").string(), binary);
    man["hit_time"] = "hit_time.field";
    write_json_file(man, (fs::path(dir) / "manifest.json").string());
}

}  // namespace hs
