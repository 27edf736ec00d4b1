#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hs/elliptic.hpp"
#include "hs/grid.hpp"
#include "hs/levelset.hpp"
#include "hs/positive_set.hpp"
#include "hs/report.hpp"
#include "hs/streamline.hpp"

namespace hs {

// One moving-boundary problem: -Lap u = f on the positive set, u = 0 and
// normal speed |grad u| - b.nu on the front, u = core_value(t) on the fixed
// core (the pressure source). An optional outer shell caps the domain with
// Dirichlet data outer_value(x, t) on |x - outer_center| = outer_radius.
struct FlowSpec {
    Grid domain{2, vec2(0, 0), 1.0 / 64, 64};
    std::function<double(const Vec&)> f;     // volumetric source, default 0
    DriftField drift;                        // advection b, default 0
    std::function<double(const Vec&)> init_phi;  // negative inside Omega_0
    std::function<bool(const Vec&)> core;        // fixed Dirichlet core
    std::function<double(double)> core_value;    // default 1
    double outer_radius = 0.0;
    Vec outer_center{0, 0, 0};
    std::function<double(const Vec&, double)> outer_value;
    double t0 = 0.0;
    double t_end = 0.0;
    double dt = 0.0;
    double cfl = 0.45;
    EllipticConfig elliptic;
};

enum class Scheme { Obstacle, LevelSet };

struct Frame {
    double t = 0.0;
    GridField u;
    GridField phi;  // signed distance to the front, negative inside
    PositiveSet mask;
};

struct StepTrace {
    double t = 0.0;
    double area = 0.0;       // measure of the positive set
    double umax = 0.0;
    double front_speed_max = 0.0;
    long sweeps = 0;
};

struct EvolutionRun {
    FlowSpec spec;
    Scheme scheme = Scheme::LevelSet;
    std::vector<Frame> frames;
    std::vector<StepTrace> trace;
    GridField hit_time;  // first time each node entered the set; inf if never
    std::string run_id;

    const Frame& frame_at(double t, double tol = -1.0) const;
    const Frame& last() const;
};

struct RunOptions {
    int frame_stride = 1;    // keep every k-th step (first and last always)
    int band_cells = 12;     // level-set speed/redistance band half-width
    std::string run_id = "run";
};

// Advances the flow from t0 to t_end with steps of spec.dt.
//   Scheme::LevelSet  front advected with speed |grad u| - b.nu; requires
//                     dt within the CFL bound (throws with a suggestion).
//   Scheme::Obstacle  time-integrated variational form; requires zero drift.
EvolutionRun run_flow(const FlowSpec& spec, Scheme scheme, const RunOptions& opt = {});

// First-arrival time field of the run (copy of the online accumulator).
GridField hitting_time(const EvolutionRun& run);

// Support and value ordering between two runs on the same grid and clock:
// small.mask inside dilate(big.mask, dilate_cells) and u_small <= u_big + tol
// where both are defined, at every stored frame.
DiagnosticsReport verify_comparison(const EvolutionRun& small, const EvolutionRun& big,
                                    int dilate_cells = 1, double value_tol = 1e-6);

// Fits log r(t) ~ log(t - t0) where r(t) is the interpolated front distance
// from `point` (= -phi at the point, sub-grid). Frames nearest each ladder
// time are used; radii below r_floor are reported but left out of the fit.
DiagnosticsReport expansion_exponent(const EvolutionRun& run, const Vec& point,
                                     const std::vector<double>& times, double expected_slope,
                                     double slope_tol, double r_floor = -1.0);

// Ratios u(x0 + delta * inward) / delta for a delta ladder at one front
// point; reports the minimum ratio and whether the profile degrades
// sub-linearly (fitted log-log slope above slope_cap).
DiagnosticsReport nondegeneracy_profile(const Frame& frame, const Vec& front_point,
                                        const Vec& inward, const std::vector<double>& deltas,
                                        double c_floor, double slope_cap = 1.25);

// Resamples every stored frame into coordinates following the drift
// streamline through `anchor`: out(x, t) = in(x + X(t) - anchor, t).
EvolutionRun comoving_frame(const EvolutionRun& run, const Vec& anchor, int ode_steps = 256);

// Transports sampled front points of the frame at t by the drift flow over
// delta_t and checks they stay within slack_cells * h of the later set.
DiagnosticsReport forward_positivity_check(const EvolutionRun& run, double t, double delta_t,
                                           double slack_cells = 2.0, int max_samples = 512);

// Front radius about `center` along a fan of rays, from the interpolated
// zero of the signed distance (bisection; sub-grid). Throws if a ray never
// leaves the set inside the box.
std::vector<double> front_radii(const Frame& frame, const Vec& center, int ndirs = 64);
double radial_front_radius(const Frame& frame, const Vec& center, int ndirs = 64);

// Writes frames (field files), fronts.csv, trace.csv, and manifest.json.
void write_run_archive(const EvolutionRun& run, const std::string& dir, bool binary = false);

}  // namespace hs
