#include "hs/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "hs/cone_harmonics.hpp"
#include "hs/regularity.hpp"

namespace fsys = std::filesystem;

namespace hs {

namespace {

using nlohmann::json;

double get_cap(const CheckRequest& req, const std::string& key, double fallback) {
    auto it = req.caps.find(key);
    return it == req.caps.end() ? fallback : it->second;
}

void write_text(const fsys::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << body;
}

// ---- spec serialization ---------------------------------------------------

const std::vector<std::string> kScenarios = {"radial",  "flatfront",  "cone",      "cusp_e1",
                                             "gallery_e2", "gallery_e3", "custom"};

const std::vector<std::string> kChecks = {
    "radial_oracle",   "scheme_agreement", "forward_positivity", "expansion",
    "nondegeneracy",   "growth",           "eps_a_monotone",     "full_monotone",
    "h_condition",     "carleson",         "front_lipschitz",    "cone_improvement",
    "cusp_phase1",     "cusp_phase2",      "cusp_containment",   "e2_construction",
    "e3_construction", "e3_monotone_pair"};

const std::vector<std::string> kSpecKeys = {
    "schema_version", "name",          "scenario",      "scheme",       "dim",
    "grid_n",         "box_half",      "t_end",         "dt",           "frames",
    "cfl",            "core_radius",   "core_pressure", "core_center",  "init_radius",
    "outer_radius",   "source_const",  "drift_rotation", "drift_const_x", "cone_theta",
    "cone_reach",     "flat_speed",    "flat_front0",   "cusp",         "bump",
    "diagnostics",    "output_dir",    "format",        "seed"};

}  // namespace

json ExperimentSpec::to_json() const {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["name"] = name;
    j["scenario"] = scenario;
    j["scheme"] = scheme;
    j["dim"] = dim;
    j["grid_n"] = grid_n;
    j["box_half"] = box_half;
    j["t_end"] = t_end;
    j["dt"] = dt;
    j["frames"] = frames;
    j["cfl"] = cfl;
    j["core_radius"] = core_radius;
    j["core_pressure"] = core_pressure;
    j["core_center"] = {core_center[0], core_center[1]};
    j["init_radius"] = init_radius;
    j["outer_radius"] = outer_radius;
    j["source_const"] = source_const;
    j["drift_rotation"] = drift_rotation;
    j["drift_const_x"] = drift_const_x;
    j["cone_theta"] = cone_theta;
    j["cone_reach"] = cone_reach;
    j["flat_speed"] = flat_speed;
    j["flat_front0"] = flat_front0;
    j["cusp"] = {{"C0", cusp.C0}, {"gamma0", cusp.gamma0}, {"gamma1", cusp.gamma1}};
    j["bump"] = {{"delta", bump.delta}, {"n", bump.n},         {"theta", bump.theta},
                 {"eps", bump.eps},     {"alpha", bump.alpha}, {"kappa", bump.kappa}};
    j["diagnostics"] = json::array();
    for (const CheckRequest& c : diagnostics)
        j["diagnostics"].push_back(
            {{"name", c.name}, {"severity", c.severity}, {"caps", c.caps}});
    j["output_dir"] = output_dir;
    j["format"] = format;
    j["seed"] = seed;
    return j;
}

ExperimentSpec ExperimentSpec::from_json(const json& j) {
    if (!j.is_object()) throw std::runtime_error("spec: top level must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(kSpecKeys.begin(), kSpecKeys.end(), it.key()) == kSpecKeys.end())
            throw std::runtime_error("spec: unknown key '" + it.key() + "'");

    ExperimentSpec s;
    auto num = [&](const char* k, double& v) {
        if (j.contains(k)) v = j.at(k).get<double>();
    };
    auto str = [&](const char* k, std::string& v) {
        if (j.contains(k)) v = j.at(k).get<std::string>();
    };
    str("name", s.name);
    str("scenario", s.scenario);
    str("scheme", s.scheme);
    str("output_dir", s.output_dir);
    str("format", s.format);
    if (j.contains("dim")) s.dim = j.at("dim").get<int>();
    if (j.contains("grid_n")) s.grid_n = j.at("grid_n").get<int>();
    if (j.contains("frames")) s.frames = j.at("frames").get<int>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    num("box_half", s.box_half);
    num("t_end", s.t_end);
    num("dt", s.dt);
    num("cfl", s.cfl);
    num("core_radius", s.core_radius);
    num("core_pressure", s.core_pressure);
    num("init_radius", s.init_radius);
    num("outer_radius", s.outer_radius);
    num("source_const", s.source_const);
    num("drift_rotation", s.drift_rotation);
    num("drift_const_x", s.drift_const_x);
    num("cone_theta", s.cone_theta);
    num("cone_reach", s.cone_reach);
    num("flat_speed", s.flat_speed);
    num("flat_front0", s.flat_front0);
    if (j.contains("core_center")) {
        auto a = j.at("core_center");
        s.core_center = vec2(a.at(0).get<double>(), a.at(1).get<double>());
    }
    if (j.contains("cusp")) {
        auto c = j.at("cusp");
        if (c.contains("C0")) s.cusp.C0 = c.at("C0").get<double>();
        if (c.contains("gamma0")) s.cusp.gamma0 = c.at("gamma0").get<double>();
        if (c.contains("gamma1")) s.cusp.gamma1 = c.at("gamma1").get<double>();
    }
    if (j.contains("bump")) {
        auto b = j.at("bump");
        if (b.contains("delta")) s.bump.delta = b.at("delta").get<double>();
        if (b.contains("n")) s.bump.n = b.at("n").get<int>();
        if (b.contains("theta")) s.bump.theta = b.at("theta").get<double>();
        if (b.contains("eps")) s.bump.eps = b.at("eps").get<double>();
        if (b.contains("alpha")) s.bump.alpha = b.at("alpha").get<double>();
        if (b.contains("kappa")) s.bump.kappa = b.at("kappa").get<double>();
    }
    if (j.contains("diagnostics")) {
        for (const auto& e : j.at("diagnostics")) {
            CheckRequest c;
            c.name = e.at("name").get<std::string>();
            if (e.contains("severity")) c.severity = e.at("severity").get<std::string>();
            if (e.contains("caps"))
                for (auto it = e.at("caps").begin(); it != e.at("caps").end(); ++it)
                    c.caps[it.key()] = it.value().get<double>();
            s.diagnostics.push_back(std::move(c));
        }
    }
    return s;
}

ExperimentSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("spec: cannot open " + path);
    json j;
    in >> j;
    return ExperimentSpec::from_json(j);
}

const std::vector<std::string>& known_scenarios() { return kScenarios; }
const std::vector<std::string>& known_checks() { return kChecks; }

ExperimentSpec scenario_preset(const std::string& scenario) {
    ExperimentSpec s;
    s.scenario = scenario;
    s.name = scenario;
    if (scenario == "radial") {
        s.grid_n = 256;
        s.t_end = 0.05;
        s.diagnostics = {{"radial_oracle", {{"tol_rel", 0.02}}, "assert"},
                         {"scheme_agreement", {{"tol_rel", 0.03}}, "assert"},
                         {"forward_positivity", {{"slack_cells", 2.0}}, "assert"}};
    } else if (scenario == "flatfront") {
        s.grid_n = 256;
        s.t_end = 0.8;
        s.frames = 16;
        s.diagnostics = {{"nondegeneracy", {{"rel_tol", 0.1}}, "assert"},
                         {"forward_positivity", {{"slack_cells", 2.0}}, "assert"}};
    } else if (scenario == "cone") {
        s.grid_n = 640;
        s.t_end = 0.3;
        s.frames = 48;
        s.core_center = vec2(0.45, 0.0);
        s.core_radius = 0.1;
        s.diagnostics = {
            {"expansion", {{"expected_slope", 2.0}, {"slope_tol", 0.4}, {"points", 5.0}},
             "assert"},
            {"nondegeneracy", {{"expect_sublinear", 1.0}}, "assert"}};
    } else if (scenario == "cusp_e1") {
        s.grid_n = 96;
        s.t_end = 0.5;
        s.cusp.C0 = 16.0;
        s.diagnostics = {{"cusp_phase1", {}, "assert"},
                         {"cusp_phase2", {{"C0", 150.0}}, "assert"},
                         {"cusp_containment", {}, "assert"}};
    } else if (scenario == "gallery_e2") {
        s.bump.eps = 1.0 / 65536;
        s.diagnostics = {{"e2_construction", {}, "assert"}};
    } else if (scenario == "gallery_e3") {
        s.diagnostics = {{"e3_construction", {}, "assert"},
                         {"e3_monotone_pair", {}, "assert"}};
    } else if (scenario == "custom") {
        // caller fills everything
    } else {
        throw std::runtime_error("spec: unknown scenario '" + scenario + "'");
    }
    return s;
}

std::vector<std::string> validate_spec(const ExperimentSpec& spec) {
    std::vector<std::string> errs;
    auto known = [](const std::vector<std::string>& v, const std::string& x) {
        return std::find(v.begin(), v.end(), x) != v.end();
    };
    if (!known(kScenarios, spec.scenario))
        errs.push_back("unknown scenario '" + spec.scenario + "'");
    for (const CheckRequest& c : spec.diagnostics) {
        if (!known(kChecks, c.name)) errs.push_back("unknown check '" + c.name + "'");
        if (c.severity != "assert" && c.severity != "warn")
            errs.push_back("check '" + c.name + "': severity must be assert or warn");
    }
    if (spec.scheme != "levelset" && spec.scheme != "obstacle")
        errs.push_back("scheme must be levelset or obstacle");
    if (spec.format != "ascii" && spec.format != "binary")
        errs.push_back("format must be ascii or binary");
    if (spec.dim != 2) errs.push_back("scenarios are two-dimensional (dim = 2)");
    if (spec.grid_n < 32) errs.push_back("grid_n must be >= 32");
    if (spec.frames < 1) errs.push_back("frames must be >= 1");
    if (!(spec.box_half > 0.0)) errs.push_back("box_half must be positive");

    bool is_run = spec.scenario == "radial" || spec.scenario == "flatfront" ||
                  spec.scenario == "cone" || spec.scenario == "custom" ||
                  spec.scenario == "cusp_e1";
    if (is_run && !(spec.t_end > 0.0)) errs.push_back("t_end must be positive");
    if (spec.scheme == "obstacle" &&
        (spec.drift_rotation != 0.0 || spec.drift_const_x != 0.0 || spec.scenario == "cusp_e1"))
        errs.push_back("obstacle scheme requires zero drift");
    if (spec.scenario == "radial" && !(spec.core_radius < spec.init_radius))
        errs.push_back("radial scenario needs core_radius < init_radius");

    double h = 2.0 * spec.box_half / std::max(1, spec.grid_n - 1);
    if (is_run)
        for (const CheckRequest& c : spec.diagnostics)
            for (const char* key : {"eps", "eps0", "delta"}) {
                auto it = c.caps.find(key);
                if (it != c.caps.end() && it->second < 4.0 * h)
                    errs.push_back("check '" + c.name + "': " + key +
                                   " below the 4h resolution floor");
            }

    if (spec.scenario == "cusp_e1") {
        try {
            spec.cusp.validate_phase1();
        } catch (const std::exception& e) {
            errs.push_back(e.what());
        }
    }
    if (spec.scenario == "gallery_e2") {
        try {
            spec.bump.validate_e2();
        } catch (const std::exception& e) {
            errs.push_back(e.what());
        }
    }
    return errs;
}

std::uint64_t spec_hash(const ExperimentSpec& spec) {
    json j = spec.to_json();
    j.erase("output_dir");
    std::string s = j.dump();
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : s) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

json RunManifest::to_json() const {
    json j;
    j["schema_version"] = schema_version;
    j["name"] = name;
    j["spec_hash"] = spec_hash_hex;
    j["tool_version"] = tool_version;
    j["report_paths"] = report_paths;
    j["complete"] = complete;
    j["wall_seconds"] = wall_seconds;
    return j;
}

RunManifest RunManifest::from_json(const json& j) {
    RunManifest m;
    m.schema_version = j.at("schema_version").get<int>();
    m.name = j.at("name").get<std::string>();
    m.spec_hash_hex = j.at("spec_hash").get<std::string>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.report_paths = j.at("report_paths").get<std::vector<std::string>>();
    m.complete = j.at("complete").get<bool>();
    m.wall_seconds = j.at("wall_seconds").get<double>();
    return m;
}

namespace {

// ---- scenario construction ------------------------------------------------

DriftField scenario_drift(const ExperimentSpec& s) {
    if (s.scenario == "cusp_e1") return cusp_drift(s.cusp, 2.0 * s.box_half / (s.grid_n - 1));
    DriftField d;
    if (s.drift_rotation == 0.0 && s.drift_const_x == 0.0) return d;
    double rot = s.drift_rotation, cx = s.drift_const_x;
    d.b = [rot, cx](const Vec& x) { return vec2(-rot * x[1] + cx, rot * x[0]); };
    d.lip_b = std::abs(rot);
    d.sup_b = std::abs(rot) * 2.0 * s.box_half + std::abs(cx);
    return d;
}

// Conservative front-speed guess used for the automatic time step.
double scenario_speed_guess(const ExperimentSpec& s) {
    double v = 0.0;
    if (s.scenario == "flatfront") {
        v = s.flat_speed;
    } else if (s.scenario == "cone") {
        double gap = std::max(0.1, norm(s.core_center) * std::sin(s.cone_theta) - s.core_radius);
        v = s.core_pressure / gap * 2.0;
    } else {
        double gap = std::max(s.init_radius - s.core_radius, 1e-3);
        double lg = std::max(std::log(s.init_radius / std::max(s.core_radius, 1e-6)), gap);
        v = s.core_pressure / (s.init_radius * lg);
    }
    DriftField d = scenario_drift(s);
    return 1.6 * (v + d.sup_b) + 0.1;
}

FlowSpec scenario_flow(const ExperimentSpec& s) {
    FlowSpec fs;
    double half = s.box_half;
    int n = s.grid_n;
    fs.domain = Grid(2, vec2(-half, -half), 2.0 * half / (n - 1), n);
    fs.drift = scenario_drift(s);
    fs.cfl = s.cfl;
    fs.t_end = s.t_end;
    fs.outer_radius = s.outer_radius;
    if (s.outer_radius > 0.0) fs.outer_value = [](const Vec&, double) { return 0.0; };
    if (s.source_const != 0.0) {
        double f0 = s.source_const;
        fs.f = [f0](const Vec&) { return f0; };
    }
    double p = s.core_pressure;
    if (s.scenario == "flatfront") {
        double c = s.flat_speed, y0 = s.flat_front0, base = -0.75 * s.box_half;
        fs.core = [base](const Vec& x) { return x[1] <= base; };
        fs.core_value = [c, y0, base](double t) { return c * (y0 + c * t - base); };
        fs.init_phi = [y0](const Vec& x) { return x[1] - y0; };
    } else if (s.scenario == "cone") {
        double th = s.cone_theta, reach = s.cone_reach;
        Vec cc = s.core_center;
        double cr = s.core_radius;
        fs.core = [cc, cr](const Vec& x) { return norm(x - cc) <= cr; };
        fs.core_value = [p](double) { return p; };
        fs.init_phi = [th, reach](const Vec& x) {
            double ang = std::atan2(std::abs(x[1]), x[0]);
            return std::max(norm(x) - reach, ang - th);
        };
    } else {  // radial / custom: disc core, disc initial support
        Vec cc = s.core_center;
        double cr = s.core_radius, ir = s.init_radius;
        fs.core = [cc, cr](const Vec& x) { return norm(x - cc) <= cr; };
        fs.core_value = [p](double) { return p; };
        fs.init_phi = [cc, ir](const Vec& x) { return norm(x - cc) - ir; };
    }
    fs.dt = s.dt;
    if (!(fs.dt > 0.0)) {
        if (s.scheme == "obstacle") {
            // Implicit stepping carries no CFL bound, and without a bulk
            // source the integrated unknown depends on elapsed time only; a
            // step per frame suffices. A source needs f dt to stay well
            // below the unit vacuum budget.
            fs.dt = s.t_end / double(std::max(s.frames, 4));
            if (s.source_const > 0.0) fs.dt = std::min(fs.dt, 0.1 / s.source_const);
        } else {
            fs.dt = fs.cfl * fs.domain.h / scenario_speed_guess(s);
        }
    }
    long steps = std::max<long>(1, long(std::ceil(s.t_end / fs.dt)));
    fs.dt = s.t_end / double(steps);
    return fs;
}

EvolutionRun simulate_scenario(const ExperimentSpec& s, FlowSpec* flow_out) {
    if (s.scenario == "cusp_e1") {
        EvolutionRun run = cusp_flow_run(s.cusp, s.grid_n, s.t_end, s.frames);
        if (flow_out) *flow_out = run.spec;
        return run;
    }
    FlowSpec fs = scenario_flow(s);
    if (flow_out) *flow_out = fs;
    long steps = std::max<long>(1, long(std::llround(s.t_end / fs.dt)));
    RunOptions opt;
    opt.frame_stride = std::max(1, int(steps / std::max(1, s.frames)));
    opt.run_id = s.name;
    Scheme sch = s.scheme == "obstacle" ? Scheme::Obstacle : Scheme::LevelSet;
    return run_flow(fs, sch, opt);
}

// ---- check registry --------------------------------------------------------

struct CheckCtx {
    const ExperimentSpec& spec;
    fsys::path dir;
    std::optional<EvolutionRun> run;
    std::optional<FlowSpec> flow;
    std::optional<E3Field> e3;
    std::optional<E2Field> e2;

    EvolutionRun& need_run() {
        if (!run) throw std::runtime_error("check needs a simulated run, scenario '" +
                                           spec.scenario + "' has none");
        return *run;
    }
    E3Field& need_e3() {
        if (!e3) e3.emplace(make_e3_field(spec.bump, e3_default_grid(spec.bump)));
        return *e3;
    }
    E2Field& need_e2() {
        if (!e2) e2.emplace(make_e2_field(spec.bump, e2_default_grid(spec.bump)));
        return *e2;
    }
};

// Radial ODE oracle dR/dt = p / (R log(R / r0)), RK4.
double radial_oracle_radius(double r_init, double r_core, double p, double t_final, int steps) {
    double r = r_init, dt = t_final / steps;
    auto f = [&](double rr) { return p / (rr * std::log(rr / r_core)); };
    for (int k = 0; k < steps; ++k) {
        double k1 = f(r);
        double k2 = f(r + 0.5 * dt * k1);
        double k3 = f(r + 0.5 * dt * k2);
        double k4 = f(r + dt * k3);
        r += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return r;
}

std::vector<DiagnosticsReport> run_check(CheckCtx& ctx, const CheckRequest& req) {
    const ExperimentSpec& s = ctx.spec;
    double h = 2.0 * s.box_half / std::max(1, s.grid_n - 1);

    if (req.name == "radial_oracle") {
        EvolutionRun& run = ctx.need_run();
        const Frame& last = run.last();
        double r_oracle = radial_oracle_radius(s.init_radius, s.core_radius, s.core_pressure,
                                               last.t - run.spec.t0, 4096);
        double r_run = radial_front_radius(last, s.core_center);
        DiagnosticsReport rep;
        rep.name = "radial_oracle";
        rep.run_id = run.run_id;
        rep.measured["r_oracle"] = r_oracle;
        rep.measured["r_run"] = r_run;
        rep.measured["rel_err"] = std::abs(r_run - r_oracle) / r_oracle;
        rep.config["tol_rel"] = get_cap(req, "tol_rel", 0.02);
        rep.pass = rep.measured["rel_err"] <= rep.config["tol_rel"];
        return {rep};
    }
    if (req.name == "scheme_agreement") {
        EvolutionRun& run = ctx.need_run();
        ExperimentSpec alt = s;
        alt.scheme = s.scheme == "obstacle" ? "levelset" : "obstacle";
        alt.name = s.name + "-alt";
        // The alternate scheme picks its own natural step unless pinned.
        alt.dt = get_cap(req, "alt_dt", 0.0);
        FlowSpec alt_flow;
        EvolutionRun other = simulate_scenario(alt, &alt_flow);
        double r_a = radial_front_radius(run.last(), s.core_center);
        double r_b = radial_front_radius(other.last(), s.core_center);
        DiagnosticsReport rep;
        rep.name = "scheme_agreement";
        rep.run_id = run.run_id;
        rep.measured["r_levelset"] = s.scheme == "obstacle" ? r_b : r_a;
        rep.measured["r_obstacle"] = s.scheme == "obstacle" ? r_a : r_b;
        rep.measured["rel_diff"] = std::abs(r_a - r_b) / std::max(r_a, r_b);
        rep.config["tol_rel"] = get_cap(req, "tol_rel", 0.03);
        rep.config["alt_dt"] = alt_flow.dt;
        rep.pass = rep.measured["rel_diff"] <= rep.config["tol_rel"];
        return {rep};
    }
    if (req.name == "forward_positivity") {
        EvolutionRun& run = ctx.need_run();
        double t0 = run.spec.t0, te = run.spec.t_end;
        double t = get_cap(req, "t", t0 + 0.5 * (te - t0));
        double dt = get_cap(req, "delta_t", 0.25 * (te - t0));
        return {forward_positivity_check(run, t, dt, get_cap(req, "slack_cells", 2.0),
                                         int(get_cap(req, "max_samples", 512)))};
    }
    if (req.name == "expansion") {
        EvolutionRun& run = ctx.need_run();
        int pts = int(get_cap(req, "points", 5.0));
        std::vector<double> times;
        for (int k = 0; k < pts; ++k)
            times.push_back(run.spec.t_end * std::pow(2.0, double(k - (pts - 1))));
        Vec point = vec2(get_cap(req, "point_x", 0.0), get_cap(req, "point_y", 0.0));
        return {expansion_exponent(run, point, times, get_cap(req, "expected_slope", 2.0),
                                   get_cap(req, "slope_tol", 0.4),
                                   get_cap(req, "r_floor", 0.9 * h))};
    }
    if (req.name == "nondegeneracy") {
        EvolutionRun& run = ctx.need_run();
        bool cone_mode = get_cap(req, "expect_sublinear", 0.0) != 0.0;
        double t = get_cap(req, "t", run.spec.t0 + 0.5 * (run.spec.t_end - run.spec.t0));
        const Frame& fr = run.frame_at(t, -1.0);
        int axis = int(get_cap(req, "axis", cone_mode ? 0.0 : 1.0));
        int dir = int(get_cap(req, "dir", cone_mode ? -1.0 : 1.0));
        FrontGraph fg = extract_front_graph(fr.u, axis, dir);
        std::size_t col = fg.column_count() / 2;
        if (!fg.has(col)) throw std::runtime_error("nondegeneracy: central column has no front");
        Vec fp = fg.front_point(col);
        Vec inward{0, 0, 0};
        inward[axis] = -dir;
        std::vector<double> deltas;
        for (int k = 0; k < 4; ++k) deltas.push_back(4.0 * h * std::pow(2.0, k));
        double c_exp = get_cap(req, "c_expected", s.flat_speed);
        double rel = get_cap(req, "rel_tol", 0.1);
        DiagnosticsReport rep = nondegeneracy_profile(fr, fp, inward, deltas,
                                                      c_exp * (1.0 - rel),
                                                      get_cap(req, "slope_cap", 1.25));
        rep.run_id = run.run_id;
        rep.frame = -1;
        if (cone_mode) {
            rep.pass = rep.measured.at("sub_linear") == 1.0;
            rep.note = "pass = profile flagged sub-linear at the cone vertex";
        } else {
            rep.measured["c_expected"] = c_exp;
            rep.pass = rep.pass && rep.measured.at("c0") <= c_exp * (1.0 + rel);
        }
        return {rep};
    }
    if (req.name == "growth") {
        EvolutionRun& run = ctx.need_run();
        const Frame& last = run.last();
        Vec mu = normalized(vec2(get_cap(req, "mu_x", 1.0), get_cap(req, "mu_y", 0.0)));
        int rungs = int(get_cap(req, "rungs", 5.0));
        std::vector<double> dist;
        for (int k = 0; k < rungs; ++k) dist.push_back(4.0 * h * std::pow(2.0, k));
        auto curve = growth_curve(last.u, last.mask, mu, dist);
        std::ostringstream csv;
        csv << "distance,value\n";
        for (const auto& p : curve) csv << p[0] << "," << p[1] << "\n";
        write_text(ctx.dir / "reports" / "growth_samples.csv", csv.str());
        DiagnosticsReport rep = fit_growth_exponent(last.u, last.mask, mu, dist);
        rep.run_id = run.run_id;
        if (req.caps.count("beta_expected")) {
            double be = req.caps.at("beta_expected"), bt = get_cap(req, "beta_tol", 0.05);
            rep.config["beta_expected"] = be;
            rep.config["beta_tol"] = bt;
            rep.pass = std::abs(rep.measured.at("beta_hat") - be) <= bt;
        }
        return {rep};
    }
    if (req.name == "eps_a_monotone" || req.name == "full_monotone") {
        EvolutionRun& run = ctx.need_run();
        const Frame& last = run.last();
        Cone cone(normalized(vec2(get_cap(req, "mu_x", 1.0), get_cap(req, "mu_y", 0.0))),
                  get_cap(req, "theta", M_PI / 4.0));
        Vec center = vec2(get_cap(req, "center_x", 0.0), get_cap(req, "center_y", 0.0));
        Window win = Window::ball_box(center, get_cap(req, "window_r", 0.25 * s.box_half), 2);
        if (req.name == "full_monotone") {
            DiagnosticsReport rep = check_full_monotone(last.u, cone, win,
                                                        get_cap(req, "step", -1.0),
                                                        get_cap(req, "tol_rel", 1e-8));
            rep.run_id = run.run_id;
            return {rep};
        }
        MonotoneQuery q;
        q.cone = cone;
        q.eps = get_cap(req, "eps", 8.0 * h);
        q.a = get_cap(req, "a", 0.0);
        q.window = win;
        q.ladder = int(get_cap(req, "ladder", 4.0));
        q.tol_rel = get_cap(req, "tol_rel", 1e-8);
        DiagnosticsReport rep = check_eps_a_monotone(last.u, q);
        rep.run_id = run.run_id;
        return {rep};
    }
    if (req.name == "h_condition") {
        EvolutionRun& run = ctx.need_run();
        return {check_hcondition(run, run.spec.drift, get_cap(req, "C0", 1.0),
                                 int(get_cap(req, "max_samples", 256.0)),
                                 get_cap(req, "tol_rel", 1e-6))};
    }
    if (req.name == "carleson") {
        EvolutionRun& run = ctx.need_run();
        return {carleson_check(run, get_cap(req, "delta", 16.0 * h),
                               int(get_cap(req, "axis", 1.0)), int(get_cap(req, "dir", 1.0)),
                               get_cap(req, "M_cap", 64.0), get_cap(req, "lip_cap", 4.0))};
    }
    if (req.name == "front_lipschitz") {
        EvolutionRun& run = ctx.need_run();
        return {fit_front_lipschitz_report(run, get_cap(req, "r", 0.25),
                                           int(get_cap(req, "axis", 1.0)),
                                           int(get_cap(req, "dir", 1.0)),
                                           get_cap(req, "theta", M_PI / 4.0),
                                           get_cap(req, "C_time", 8.0),
                                           get_cap(req, "c_theta", 1.0))};
    }
    if (req.name == "cone_improvement") {
        EvolutionRun& run = ctx.need_run();
        Cone cone(normalized(vec2(get_cap(req, "mu_x", 1.0), get_cap(req, "mu_y", 0.0))),
                  get_cap(req, "theta0", M_PI / 4.0));
        ConeImprovementConfig cfg;
        cfg.alpha = get_cap(req, "alpha", 1.0);
        cfg.C = get_cap(req, "C", 1.0);
        cfg.gamma3 = get_cap(req, "gamma3", 0.05);
        cfg.R0 = get_cap(req, "R0", 0.5 * s.box_half);
        cfg.center = vec2(get_cap(req, "center_x", 0.0), get_cap(req, "center_y", 0.0));
        cfg.ladder = int(get_cap(req, "ladder", 4.0));
        return {measure_cone_improvement(run, get_cap(req, "eps0", 16.0 * h),
                                         get_cap(req, "j", 0.5), cone, cfg)};
    }
    if (req.name == "cusp_phase1")
        return {cusp_phase1_check(s.cusp, int(get_cap(req, "samples", 64.0)))};
    if (req.name == "cusp_phase2") {
        CuspSpec c2 = s.cusp;
        c2.C0 = get_cap(req, "C0", 150.0);
        GridField phi;
        DiagnosticsReport rep = cusp_phase2_check(c2, int(get_cap(req, "samples", 24.0)),
                                                  int(get_cap(req, "n", 128.0)), &phi);
        write_field(phi, (ctx.dir / "fields" / "cusp_phi2.field").string(),
                    s.format == "binary");
        return {rep};
    }
    if (req.name == "cusp_containment") {
        if (ctx.run) return {cusp_containment_check(s.cusp, *ctx.run)};
        return {cusp_containment_run(s.cusp, s.grid_n, s.t_end, s.frames)};
    }
    if (req.name == "e2_construction") return {ctx.need_e2().construction};
    if (req.name == "e3_construction") {
        E3Field& e3 = ctx.need_e3();
        if (get_cap(req, "dump", 0.0) != 0.0) {
            write_field(e3.f, (ctx.dir / "fields" / "e3_f.field").string(),
                        s.format == "binary");
            write_field(e3.phi, (ctx.dir / "fields" / "e3_phi.field").string(),
                        s.format == "binary");
        }
        return {e3.construction};
    }
    if (req.name == "e3_monotone_pair") {
        E3Field& e3 = ctx.need_e3();
        double eps = s.bump.resolved_eps();
        Cone cone(vec2(1, 0), s.bump.theta);
        Window win = Window::ball_box(vec2(0, 0), get_cap(req, "window_r", 0.01), 2);
        MonotoneQuery q;
        q.cone = cone;
        q.eps = eps;
        q.a = 0.0;
        q.window = win;
        q.ladder = int(get_cap(req, "ladder", 2.0));
        q.tol_rel = get_cap(req, "tol_rel", 1e-9);
        DiagnosticsReport mono = check_eps_a_monotone(e3.phi, q);
        mono.name = "e3_eps_monotone";
        DiagnosticsReport full = check_full_monotone(e3.phi, cone, win,
                                                     get_cap(req, "step", 0.5 * s.bump.delta),
                                                     get_cap(req, "tol_rel", 1e-9));
        full.name = "e3_full_monotone";
        DiagnosticsReport pair;
        pair.name = "e3_monotone_pair";
        pair.pass = mono.pass && !full.pass;
        pair.measured["eps_monotone_pass"] = mono.pass ? 1.0 : 0.0;
        pair.measured["full_monotone_pass"] = full.pass ? 1.0 : 0.0;
        pair.config["eps"] = eps;
        pair.note = "pass = coarse-scale cone monotonicity without pointwise monotonicity";
        return {mono, full, pair};
    }
    throw std::runtime_error("unknown check '" + req.name + "'");
}

}  // namespace

int run_experiment(const ExperimentSpec& spec, RunManifest* manifest_out) {
    auto t_start = std::chrono::steady_clock::now();
    std::vector<std::string> errs = validate_spec(spec);
    if (!errs.empty()) return 2;

    fsys::path dir = fsys::path(spec.output_dir) / spec.name;
    fsys::create_directories(dir / "reports");
    fsys::create_directories(dir / "fields");
    write_text(dir / "spec_dump.json", spec.to_json().dump(2) + "\n");

    std::ostringstream hx;
    hx << std::hex << spec_hash(spec);
    RunManifest man;
    man.name = spec.name;
    man.spec_hash_hex = hx.str();
    man.complete = false;
    write_json_file(man.to_json(), (dir / "manifest.json").string());

    CheckCtx ctx{spec, dir, {}, {}, {}, {}};
    bool is_run = spec.scenario == "radial" || spec.scenario == "flatfront" ||
                  spec.scenario == "cone" || spec.scenario == "custom" ||
                  spec.scenario == "cusp_e1";
    if (is_run) {
        FlowSpec flow;
        ctx.run = simulate_scenario(spec, &flow);
        ctx.flow = flow;
        write_run_archive(*ctx.run, (dir / "archive").string(), spec.format == "binary");
    }

    bool assert_failed = false;
    int idx = 0;
    for (const CheckRequest& req : spec.diagnostics) {
        std::vector<DiagnosticsReport> reports;
        try {
            reports = run_check(ctx, req);
        } catch (const std::exception& e) {
            DiagnosticsReport rep;
            rep.name = req.name;
            rep.pass = false;
            rep.note = std::string("check error: ") + e.what();
            reports = {rep};
        }
        bool all_pass = true;
        for (std::size_t k = 0; k < reports.size(); ++k) {
            std::ostringstream fn;
            fn << "reports/" << (idx < 10 ? "0" : "") << idx << "_" << reports[k].name
               << ".json";
            write_json_file(reports[k].to_json(), (dir / fn.str()).string());
            man.report_paths.push_back(fn.str());
            // multi-report checks gate on their summary (last) entry
            all_pass = reports[k].pass;
        }
        if (req.severity == "assert" && !all_pass) assert_failed = true;
        ++idx;
    }

    man.complete = true;
    man.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    write_json_file(man.to_json(), (dir / "manifest.json").string());
    if (manifest_out) *manifest_out = man;
    return assert_failed ? 1 : 0;
}

void emit_plotdata(const std::string& experiment_dir,
                   const std::vector<std::string>& selector) {
    fsys::path dir(experiment_dir);
    if (selector.empty()) return;
    fsys::create_directories(dir / "plots");

    auto require = [&](const fsys::path& p, const std::string& label) {
        if (!fsys::exists(p))
            throw std::runtime_error("emit-plotdata: missing artifact " + label);
    };

    for (const std::string& what : selector) {
        if (what == "fronts") {
            fsys::path src = dir / "archive" / "fronts.csv";
            require(src, "archive/fronts.csv");
            std::ifstream in(src);
            std::string line;
            std::string cur_t;
            std::ofstream out;
            int part = 0;
            while (std::getline(in, line)) {
                if (line.empty() || line[0] == 't') continue;  // header
                std::string t = line.substr(0, line.find(','));
                if (t != cur_t) {
                    cur_t = t;
                    std::ostringstream fn;
                    fn << "front_" << (part < 100 ? "0" : "") << (part < 10 ? "0" : "") << part
                       << ".csv";
                    ++part;
                    out.close();
                    out.open(dir / "plots" / fn.str(), std::ios::binary);
                    out << "t,x0,x1,x2\n";
                }
                out << line << "\n";
            }
        } else if (what == "growth") {
            fsys::path src = dir / "reports" / "growth_samples.csv";
            require(src, "reports/growth_samples.csv (run a growth check first)");
            std::ifstream in(src);
            std::ostringstream body;
            body << "distance,value,log_distance,log_value\n";
            std::string line;
            std::getline(in, line);  // header
            while (std::getline(in, line)) {
                auto comma = line.find(',');
                double sdist = std::stod(line.substr(0, comma));
                double val = std::stod(line.substr(comma + 1));
                body << sdist << "," << val << "," << std::log(sdist) << "," << std::log(val)
                     << "\n";
            }
            write_text(dir / "plots" / "growth_loglog.csv", body.str());
        } else if (what == "fits") {
            fsys::path rdir = dir / "reports";
            require(rdir, "reports/");
            std::vector<fsys::path> files;
            for (const auto& e : fsys::directory_iterator(rdir))
                if (e.path().extension() == ".json") files.push_back(e.path());
            std::sort(files.begin(), files.end());
            std::ostringstream body;
            body << "report,name,key,value\n";
            const char* keys[] = {"beta_hat", "slope", "profile_slope", "c0", "c_hat"};
            for (const fsys::path& f : files) {
                std::ifstream in(f);
                nlohmann::json j;
                in >> j;
                for (const char* k : keys)
                    if (j.contains("measured") && j["measured"].contains(k))
                        body << f.filename().string() << "," << j["name"].get<std::string>()
                             << "," << k << "," << j["measured"][k].get<double>() << "\n";
            }
            write_text(dir / "plots" / "fits.csv", body.str());
        } else if (what == "ladders") {
            fsys::path rdir = dir / "reports";
            require(rdir, "reports/");
            bool found = false;
            std::ostringstream body;
            body << "report,rung,eps,theta,window,passed\n";
            for (const auto& e : fsys::directory_iterator(rdir)) {
                if (e.path().extension() != ".json") continue;
                std::ifstream in(e.path());
                nlohmann::json j;
                in >> j;
                if (j.value("name", "") != "cone_improvement") continue;
                found = true;
                double eps0 = j["config"]["eps0"].get<double>();
                double jj = j["config"]["j"].get<double>();
                double th = j["config"]["theta0"].get<double>();
                double C = j["config"]["C"].get<double>();
                double g3 = j["config"]["gamma3"].get<double>();
                double R = j["config"]["R0"].get<double>();
                int passed = int(j["measured"]["rungs_passed"].get<double>());
                bool failed_next = std::isfinite(j["measured"]["failure_scale"].get<double>());
                int rows = passed + (failed_next ? 1 : 0);
                double eps = eps0;
                for (int k = 0; k < rows; ++k) {
                    body << e.path().filename().string() << "," << k << "," << eps << "," << th
                         << "," << R << "," << (k < passed ? 1 : 0) << "\n";
                    th -= C * std::pow(eps, g3);
                    eps *= jj;
                    R *= jj;
                }
            }
            if (!found)
                throw std::runtime_error(
                    "emit-plotdata: missing artifact: no cone_improvement report");
            write_text(dir / "plots" / "cone_ladders.csv", body.str());
        } else {
            throw std::runtime_error("emit-plotdata: unknown selector '" + what + "'");
        }
    }
}

}  // namespace hs
