#include "hs/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::uint8_t> sample_core(const FlowSpec& spec) {
    const Grid& g = spec.domain;
    std::vector<std::uint8_t> core(g.size(), 0);
    if (!spec.core) return core;
    for (std::size_t i = 0; i < g.size(); ++i) core[i] = spec.core(g.position(i)) ? 1 : 0;
    return core;
}

double core_value_at(const FlowSpec& spec, double t) {
    return spec.core_value ? spec.core_value(t) : 1.0;
}

bool on_box_edge(const Grid& g, std::size_t idx) {
    auto c = g.coords(idx);
    for (int a = 0; a < g.dim; ++a)
        if (c[a] == 0 || c[a] == g.extents[a] - 1) return true;
    return false;
}

double cell_measure(const Grid& g) {
    return g.dim == 2 ? g.h * g.h : g.h * g.h * g.h;
}

// Shared pressure solve: -Lap u = f on `unknown`, u = core value on core
// node closures, front arms from either a cut field or explicit fractions.
EllipticStats solve_pressure(const FlowSpec& spec, double t, const std::vector<std::uint8_t>& unknown,
                             const std::vector<std::uint8_t>& core, const std::vector<double>* cut,
                             const ArmTheta& arm_theta, GridField& u) {
    const Grid& g = spec.domain;
    PoissonProblem p;
    p.grid = &spec.domain;
    p.unknown = unknown;
    p.f.assign(g.size(), 0.0);
    if (spec.f)
        for (std::size_t i = 0; i < g.size(); ++i)
            if (unknown[i]) p.f[i] = spec.f(g.position(i));
    double cv = core_value_at(spec, t);
    p.bc = [&spec, cv](const Vec& x) {
        if (spec.core && spec.core(x)) return cv;
        return 0.0;
    };
    const double shell_pad = 2.0 * g.h;
    p.front_value = [&spec, t, shell_pad](const Vec& x) {
        if (spec.outer_radius > 0.0 && spec.outer_value &&
            norm(x - spec.outer_center) >= spec.outer_radius - shell_pad)
            return spec.outer_value(x, t);
        return 0.0;
    };
    p.cut = cut;
    p.arm_theta = arm_theta;
    EllipticStats st = solve_compiled(compile_system(p, spec.elliptic), u, spec.elliptic);

    // Paint non-unknowns so interpolation near the core and front is usable.
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (unknown[i]) continue;
        u.values[i] = core[i] ? cv : 0.0;
    }
    u.time = t;
    return st;
}

int planned_steps(const FlowSpec& spec) {
    if (!(spec.dt > 0.0)) throw std::invalid_argument("run_flow: dt must be positive");
    if (!(spec.t_end > spec.t0)) throw std::invalid_argument("run_flow: t_end must exceed t0");
    double span = spec.t_end - spec.t0;
    int n = int(std::llround(span / spec.dt));
    if (n < 1 || std::abs(n * spec.dt - span) > 1e-9 * std::max(1.0, span))
        throw std::invalid_argument("run_flow: (t_end - t0) must be an integer multiple of dt");
    return n;
}

// ---- level-set scheme ------------------------------------------------------

struct LevelSetState {
    const FlowSpec* spec = nullptr;
    double t = 0.0;
    GridField phi;   // signed distance, banded between frames
    GridField u;
    std::vector<std::uint8_t> core;
    std::vector<double> shell;  // |x-c| - R when an outer shell is active
    std::vector<double> cut;    // scratch: max(phi, shell)
    std::vector<std::uint8_t> unknown;
    long last_sweeps = 0;
    double last_speed_max = 0.0;
};

void refresh_unknowns(LevelSetState& s) {
    const Grid& g = s.spec->domain;
    if (s.cut.size() != g.size()) s.cut.assign(g.size(), 0.0);
    bool shell = !s.shell.empty();
    std::size_t n_unknown = 0;
    s.unknown.assign(g.size(), 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        s.cut[i] = shell ? std::max(s.phi.values[i], s.shell[i]) : s.phi.values[i];
        if (s.cut[i] < 0.0 && !s.core[i]) {
            s.unknown[i] = 1;
            ++n_unknown;
        }
    }
    if (n_unknown == 0) throw std::runtime_error("level-set run: positive set vanished");
    for (std::size_t i = 0; i < g.size(); ++i)
        if (s.unknown[i] && on_box_edge(g, i))
            throw std::runtime_error("level-set run: positive set reached the domain box");
}

void solve_current(LevelSetState& s) {
    EllipticStats st = solve_pressure(*s.spec, s.t, s.unknown, s.core, &s.cut, nullptr, s.u);
    s.last_sweeps = st.sweeps;
}

LevelSetState init_levelset(const FlowSpec& spec) {
    if (!spec.init_phi) throw std::invalid_argument("level-set run: init_phi is required");
    const Grid& g = spec.domain;
    LevelSetState s;
    s.spec = &spec;
    s.t = spec.t0;
    s.core = sample_core(spec);
    s.phi = GridField(g, 0.0, spec.t0);
    for (std::size_t i = 0; i < g.size(); ++i) s.phi.values[i] = spec.init_phi(g.position(i));
    redistance(s.phi);
    if (spec.outer_radius > 0.0) {
        s.shell.assign(g.size(), 0.0);
        for (std::size_t i = 0; i < g.size(); ++i)
            s.shell[i] = norm(g.position(i) - spec.outer_center) - spec.outer_radius;
    }
    s.u = GridField(g, 0.0, spec.t0);
    refresh_unknowns(s);
    solve_current(s);
    return s;
}

// Front speed V = |grad u| - b.nu on the band |phi| <= band. The gradient is
// taken at the foot point two ways along the inward normal (1.5h and 3h) and
// Richardson-combined; falls back to the one-point slope if that degenerates.
std::vector<double> band_speeds(const LevelSetState& s, double band, double& speed_max,
                                double& grad_max, double& drift_max) {
    const Grid& g = s.spec->domain;
    const double h = g.h;
    std::vector<double> speed(g.size(), 0.0);
    speed_max = grad_max = drift_max = 0.0;
    const double d1 = 1.5 * h, d2 = 3.0 * h;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double ph = s.phi.values[i];
        if (std::abs(ph) > band) continue;
        auto c = g.coords(i);
        Vec gr = s.phi.gradient_at(c[0], c[1], c[2]);
        double gn = norm(gr);
        if (gn < 1e-12) continue;
        Vec nu = gr / gn;
        Vec x = g.position(i);
        Vec foot = x - ph * nu;
        double u1 = s.u.interp(foot - d1 * nu);
        double u2 = s.u.interp(foot - d2 * nu);
        double grad = (u1 * d2 * d2 - u2 * d1 * d1) / (d1 * d2 * (d2 - d1));
        if (!(grad > 0.0)) grad = std::max(u1 / d1, 0.0);
        double vb = dot(s.spec->drift(foot), nu);
        double V = grad - vb;
        speed[i] = V;
        speed_max = std::max(speed_max, std::abs(V));
        grad_max = std::max(grad_max, grad);
        drift_max = std::max(drift_max, std::abs(vb));
    }
    return speed;
}

void step_levelset(LevelSetState& s, double dt, double band) {
    const FlowSpec& spec = *s.spec;
    double speed_max = 0, grad_max = 0, drift_max = 0;
    std::vector<double> speed = band_speeds(s, band, speed_max, grad_max, drift_max);
    double dt_cfl = spec.cfl * spec.domain.h / (grad_max + drift_max + 1e-300);
    if (dt > dt_cfl * (1.0 + 1e-9)) {
        std::ostringstream os;
        os << "level-set run: CFL violated at t=" << s.t << " (dt=" << dt
           << ", front gradient " << grad_max << ", drift " << drift_max
           << "); use dt <= " << dt_cfl;
        throw std::runtime_error(os.str());
    }
    s.last_speed_max = speed_max;
    GridField phi_old = s.phi;
    advect_normal_speed(s.phi, speed, dt);
    redistance(s.phi, band + 3.0 * spec.domain.h);
    s.t += dt;
    s.phi.time = s.t;
    refresh_unknowns(s);
    solve_current(s);
    (void)phi_old;
}

// ---- obstacle scheme -------------------------------------------------------

struct ObstacleState {
    const FlowSpec* spec = nullptr;
    double t = 0.0;
    double core_w = 0.0;  // integral of the core value since t0
    GridField w;          // time integral of u
    GridField u;
    GridField hit;        // first-arrival estimates (inf = dry)
    GridField phi0;       // signed distance of the initial set
    std::vector<std::uint8_t> core, chi0, mask, unknown_w;
    std::vector<double> chi0_frac;  // sub-grid cell occupancy of the initial set
    std::vector<double> rhs;        // last assembled right-hand side chi0 - 1 + F
    long last_sweeps = 0;
};

// Front offset from the integrated transform: near the front w grows like
// (1-F) dist^2 / 2 into the wet side, so dist = sqrt(2 w / (1-F)). Until w
// has accumulated, the initial signed distance anchors the arm instead.
double front_offset_cells(const ObstacleState& s, std::size_t inside_idx,
                          std::size_t outside_idx) {
    double wv = s.w.values[inside_idx];
    if (!(wv > 0.0)) {
        double a = s.phi0.values[inside_idx], b = s.phi0.values[outside_idx];
        if (a < 0.0 && b >= 0.0 && b - a > 1e-300) return -a / (b - a);
        return 0.5;
    }
    double vac = double(s.chi0[inside_idx]) - s.rhs[inside_idx];  // = 1 - F
    if (!(vac > 1e-9)) return 0.5;
    return std::sqrt(2.0 * wv / vac) / s.spec->domain.h;
}

void recover_pressure(ObstacleState& s) {
    const Grid& g = s.spec->domain;
    std::vector<std::uint8_t> unknown(g.size(), 0);
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (s.mask[i] && !s.core[i]) {
            unknown[i] = 1;
            ++cnt;
        }
    if (cnt == 0) {
        double cv = core_value_at(*s.spec, s.t);
        for (std::size_t i = 0; i < g.size(); ++i) s.u.values[i] = s.core[i] ? cv : 0.0;
        s.u.time = s.t;
        return;
    }
    ArmTheta theta = [&s](std::size_t p, int, int, std::size_t q) -> double {
        if (s.core[q]) return std::numeric_limits<double>::quiet_NaN();  // node Dirichlet
        return std::min(1.0, front_offset_cells(s, p, q));
    };
    EllipticStats st = solve_pressure(*s.spec, s.t, unknown, s.core, nullptr, theta, s.u);
    s.last_sweeps += st.sweeps;
}

ObstacleState init_obstacle(const FlowSpec& spec) {
    if (spec.drift.sup_b > 0.0 || spec.drift.b)
        throw std::invalid_argument("obstacle run: drift must be zero");
    if (spec.outer_radius > 0.0)
        throw std::invalid_argument("obstacle run: outer shell not supported");
    if (!spec.init_phi) throw std::invalid_argument("obstacle run: init_phi is required");
    const Grid& g = spec.domain;
    ObstacleState s;
    s.spec = &spec;
    s.t = spec.t0;
    s.core = sample_core(spec);
    s.phi0 = GridField(g, 0.0, spec.t0);
    for (std::size_t i = 0; i < g.size(); ++i) s.phi0.values[i] = spec.init_phi(g.position(i));
    redistance(s.phi0);
    s.chi0.assign(g.size(), 0);
    s.chi0_frac.assign(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        s.chi0[i] = (s.phi0.values[i] < 0.0 || s.core[i]) ? 1 : 0;
        // Cell occupancy from the signed distance; exact for a flat front.
        s.chi0_frac[i] = s.core[i] ? 1.0 : std::clamp(0.5 - s.phi0.values[i] / g.h, 0.0, 1.0);
    }
    s.mask = s.chi0;
    s.w = GridField(g, 0.0, spec.t0);
    s.u = GridField(g, 0.0, spec.t0);
    s.hit = GridField(g, kInf, spec.t0);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (s.chi0[i]) s.hit.values[i] = spec.t0;
    s.rhs.assign(g.size(), 0.0);
    s.unknown_w.assign(g.size(), 0);
    for (std::size_t i = 0; i < g.size(); ++i)
        s.unknown_w[i] = (!s.core[i] && !on_box_edge(g, i)) ? 1 : 0;
    recover_pressure(s);
    return s;
}

void step_obstacle(ObstacleState& s) {
    const FlowSpec& spec = *s.spec;
    const Grid& g = spec.domain;
    double dt = spec.dt;
    double t_new = s.t + dt;
    s.core_w += dt * core_value_at(spec, s.t + 0.5 * dt);
    s.last_sweeps = 0;

    // Growth term F(x) = f(x) (t_new - T(x)), with T lagged one step for
    // nodes expected to wet during this step.
    double f_cap = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double F = 0.0;
        if (spec.f) {
            double f_here = spec.f(g.position(i));
            if (f_here != 0.0) {
                double T = std::isfinite(s.hit.values[i]) ? s.hit.values[i] : s.t;
                F = f_here * (t_new - T);
            }
        }
        s.rhs[i] = s.chi0_frac[i] - 1.0 + F;
        f_cap = std::max(f_cap, F);
    }
    if (f_cap >= 1.0 - 1e-9)
        throw std::runtime_error("obstacle run: growth term exceeds vacuum capacity (F >= 1)");

    PoissonProblem p;
    p.grid = &g;
    p.unknown = s.unknown_w;
    p.f = s.rhs;
    double cw = s.core_w;
    p.bc = [&spec, cw](const Vec& x) {
        if (spec.core && spec.core(x)) return cw;
        return 0.0;
    };
    EllipticSystem sys = compile_system(p, spec.elliptic);
    EllipticStats st = solve_obstacle_lcp(sys, s.w, 0.0, spec.elliptic);
    s.last_sweeps += st.sweeps;
    s.t = t_new;
    s.w.time = t_new;

    double w_tol = 1e-13 * std::max(1.0, s.w.max_abs());
    std::vector<std::uint8_t> mask_new(g.size(), 0);
    for (std::size_t i = 0; i < g.size(); ++i)
        mask_new[i] = (s.core[i] || s.chi0[i] || s.w.values[i] > w_tol) ? 1 : 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (mask_new[i] && !s.mask[i] && !s.unknown_w[i])
            throw std::runtime_error("obstacle run: support reached the domain box");
        if (s.mask[i] && !mask_new[i]) mask_new[i] = 1;  // support never retreats
    }
    s.mask.swap(mask_new);

    recover_pressure(s);

    // First-arrival estimate for freshly wetted nodes: w ~ u (t - T) / 2.
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!s.mask[i] || std::isfinite(s.hit.values[i])) continue;
        double uv = std::max(s.u.values[i], 1e-300);
        double back = std::clamp(2.0 * s.w.values[i] / uv, 0.0, dt);
        s.hit.values[i] = t_new - back;
    }
    s.hit.time = t_new;
}

Frame obstacle_snapshot(const ObstacleState& s) {
    Frame fr;
    fr.t = s.t;
    fr.u = s.u;
    ArmFraction frac = [&s](std::size_t p, int, int, std::size_t q) {
        return std::min(1.0, front_offset_cells(s, p, q));
    };
    fr.phi = redistance_anchored(s.spec->domain, s.mask, frac);
    fr.phi.time = s.t;
    fr.mask = positive_set_from_mask(s.spec->domain, s.mask, 0.0);
    return fr;
}

Frame levelset_snapshot(const LevelSetState& s) {
    Frame fr;
    fr.t = s.t;
    fr.u = s.u;
    fr.phi = s.phi;
    redistance(fr.phi);  // lift the band cap for stored frames
    std::vector<std::uint8_t> m(s.spec->domain.size(), 0);
    for (std::size_t i = 0; i < m.size(); ++i)
        m[i] = (s.cut[i] < 0.0 || s.core[i]) ? 1 : 0;
    fr.mask = positive_set_from_mask(s.spec->domain, std::move(m), 0.0);
    return fr;
}

StepTrace make_trace(double t, const Frame& fr, double speed_max, long sweeps, double hd) {
    StepTrace tr;
    tr.t = t;
    tr.area = double(fr.mask.count()) * hd;
    tr.umax = fr.u.max_value();
    tr.front_speed_max = speed_max;
    tr.sweeps = sweeps;
    return tr;
}

}  // namespace

const Frame& EvolutionRun::frame_at(double t, double tol) const {
    if (frames.empty()) throw std::runtime_error("run has no frames");
    const Frame* best = &frames.front();
    double gap = std::abs(best->t - t);
    for (const Frame& fr : frames) {
        double d = std::abs(fr.t - t);
        if (d < gap) {
            gap = d;
            best = &fr;
        }
    }
    if (tol >= 0.0 && gap > tol)
        throw std::runtime_error("no stored frame near t=" + std::to_string(t));
    return *best;
}

const Frame& EvolutionRun::last() const {
    if (frames.empty()) throw std::runtime_error("run has no frames");
    return frames.back();
}

EvolutionRun run_flow(const FlowSpec& spec, Scheme scheme, const RunOptions& opt) {
    int n_steps = planned_steps(spec);
    int stride = std::max(1, opt.frame_stride);
    EvolutionRun run;
    run.spec = spec;
    run.scheme = scheme;
    run.run_id = opt.run_id;
    double hd = cell_measure(spec.domain);

    if (scheme == Scheme::LevelSet) {
        LevelSetState s = init_levelset(run.spec);
        s.spec = &run.spec;
        double band = opt.band_cells * spec.domain.h;
        run.hit_time = GridField(spec.domain, kInf, spec.t0);
        for (std::size_t i = 0; i < spec.domain.size(); ++i)
            if (s.phi.values[i] < 0.0 || s.core[i]) run.hit_time.values[i] = spec.t0;
        Frame fr = levelset_snapshot(s);
        run.frames.push_back(fr);
        run.trace.push_back(make_trace(s.t, fr, 0.0, s.last_sweeps, hd));
        for (int k = 1; k <= n_steps; ++k) {
            GridField phi_before = s.phi;
            step_levelset(s, spec.dt, band);
            for (std::size_t i = 0; i < spec.domain.size(); ++i) {
                if (std::isfinite(run.hit_time.values[i])) continue;
                double a = phi_before.values[i], b = s.phi.values[i];
                if (b <= 0.0 && a > 0.0)
                    run.hit_time.values[i] = s.t - spec.dt + spec.dt * a / std::max(a - b, 1e-300);
                else if (b <= 0.0)
                    run.hit_time.values[i] = s.t;
            }
            if (k % stride == 0 || k == n_steps) {
                Frame f2 = levelset_snapshot(s);
                run.frames.push_back(f2);
                run.trace.push_back(make_trace(s.t, f2, s.last_speed_max, s.last_sweeps, hd));
            }
        }
        run.hit_time.time = s.t;
    } else {
        ObstacleState s = init_obstacle(run.spec);
        s.spec = &run.spec;
        Frame fr = obstacle_snapshot(s);
        run.frames.push_back(fr);
        run.trace.push_back(make_trace(s.t, fr, 0.0, s.last_sweeps, hd));
        for (int k = 1; k <= n_steps; ++k) {
            step_obstacle(s);
            if (k % stride == 0 || k == n_steps) {
                Frame f2 = obstacle_snapshot(s);
                run.frames.push_back(f2);
                double area_prev = run.trace.back().area;
                double speed = 0.0;
                if (f2.t > run.trace.back().t)
                    speed = std::max(0.0, (double(f2.mask.count()) * hd - area_prev)) /
                            (f2.t - run.trace.back().t);
                run.trace.push_back(make_trace(s.t, f2, speed, s.last_sweeps, hd));
            }
        }
        run.hit_time = s.hit;
    }
    return run;
}

GridField hitting_time(const EvolutionRun& run) { return run.hit_time; }

}  // namespace hs
