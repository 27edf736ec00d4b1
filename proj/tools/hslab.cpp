#include <cmath>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hs/cone_harmonics.hpp"
#include "hs/elliptic.hpp"
#include "hs/experiment.hpp"

namespace {

int read_thread_env() {
    const char* v = std::getenv("HSLAB_THREADS");
    if (!v) return 1;
    int n = std::atoi(v);
    if (n < 1) {
        std::cerr << "HSLAB_THREADS must be a positive integer; using 1\n";
        return 1;
    }
    return n;
}

hs::ExperimentSpec build_spec(const std::string& config, const std::string& scenario,
                              const std::string& out, int grid, const std::string& format) {
    hs::ExperimentSpec spec =
        config.empty() ? hs::scenario_preset(scenario) : hs::load_spec(config);
    if (!out.empty()) spec.output_dir = out;
    if (grid > 0) spec.grid_n = grid;
    if (!format.empty()) spec.format = format;
    return spec;
}

int execute(const hs::ExperimentSpec& spec) {
    std::vector<std::string> errs = hs::validate_spec(spec);
    if (!errs.empty()) {
        for (const std::string& e : errs) std::cerr << "validation: " << e << "\n";
        return 2;
    }
    hs::RunManifest man;
    int rc = hs::run_experiment(spec, &man);
    for (const std::string& p : man.report_paths) std::cout << "report " << p << "\n";
    std::cout << (rc == 0 ? "ok" : "FAILED") << " (" << spec.output_dir << "/" << spec.name
              << ", spec " << man.spec_hash_hex << ")\n";
    return rc;
}

double sawtooth(double x, double c_g) {
    double p = x - std::floor(x + 0.5);  // in [-1/2, 1/2)
    return c_g * (0.5 - std::abs(p));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hslab: moving-boundary flow laboratory"};
    app.set_version_flag("--version", std::string(hs::kToolVersion));
    int threads = read_thread_env();
    if (threads > 1)
        std::cerr << "note: HSLAB_THREADS=" << threads
                  << " requested; this build computes each experiment serially\n";

    std::string config, out, format, scenario = "radial";
    int grid = 0, dim = 2;
    app.add_option("--config", config, "experiment spec JSON path");
    app.add_option("--out", out, "output directory override");
    app.add_option("--grid", grid, "grid nodes per side override");
    app.add_option("--dim", dim, "dimension (cone-table)")->check(CLI::IsMember({2, 3}));
    app.add_option("--format", format, "field dump format")
        ->check(CLI::IsMember({"ascii", "binary"}));

    auto* sim = app.add_subcommand("simulate", "run the scenario and archive it, no checks");
    sim->add_option("--scenario", scenario, "scenario preset when no --config");

    auto* diag = app.add_subcommand("diagnose", "run scenario and its diagnostics");
    std::string dscenario = "radial";
    diag->add_option("--scenario", dscenario, "scenario preset when no --config");

    auto* verify = app.add_subcommand("verify-example", "run a gallery example end to end");
    std::string example;
    verify->add_option("example", example, "e1|e2|e3")
        ->required()
        ->check(CLI::IsMember({"e1", "e2", "e3"}));

    auto* cone = app.add_subcommand("cone-table", "exponent/eigenvalue table for cap angles");
    std::vector<double> thetas;
    cone->add_option("--theta", thetas, "half-angles (radians)");

    auto* harnack = app.add_subcommand("harnack", "strip comparison ratios over widths");
    double cg = 0.5, fconst = 1.0, depth = 1.0, hstep = 1.0 / 64;
    std::vector<double> widths{2.0, 4.0, 8.0};
    harnack->add_option("--cg", cg, "graph Lipschitz constant");
    harnack->add_option("--f", fconst, "source constant");
    harnack->add_option("--depth", depth, "strip depth");
    harnack->add_option("--spacing", hstep, "grid spacing");
    harnack->add_option("--L", widths, "lateral half-widths");

    auto* val = app.add_subcommand("validate", "validate a spec file");

    auto* plot = app.add_subcommand("emit-plotdata", "CSV extracts from an experiment dir");
    std::string pdir;
    std::vector<std::string> what;
    plot->add_option("--dir", pdir, "experiment directory")->required();
    plot->add_option("--what", what, "fronts growth fits ladders");

    app.require_subcommand(1);
    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();
    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            hs::ExperimentSpec spec = build_spec(config, scenario, out, grid, format);
            spec.diagnostics.clear();
            return execute(spec);
        }
        if (*diag) return execute(build_spec(config, dscenario, out, grid, format));
        if (*verify) {
            std::string scen = example == "e1" ? "cusp_e1"
                               : example == "e2" ? "gallery_e2"
                                                 : "gallery_e3";
            return execute(build_spec(config, scen, out, grid, format));
        }
        if (*cone) {
            if (thetas.empty()) thetas = {M_PI / 6, M_PI / 4, M_PI / 3, M_PI / 2};
            std::cout << "theta,lambda1,beta,theta_inverse_err\n";
            std::cout.precision(12);
            for (const hs::ConeTableRow& r : hs::cone_table(thetas, dim))
                std::cout << r.theta << "," << r.lambda1 << "," << r.beta << ","
                          << r.theta_inverse_err << "\n";
            return 0;
        }
        if (*harnack) {
            std::cout << "L,ratio,pass\n";
            std::cout.precision(12);
            for (double L : widths) {
                hs::StripSpec sp;
                double c = cg;
                sp.g = [c](double x) { return sawtooth(x, c); };
                sp.c_g = cg;
                sp.L = L;
                sp.depth = depth;
                sp.h = hstep;
                hs::StripResult res = hs::strip_comparison(sp, fconst);
                std::cout << L << "," << res.report.measured.at("ratio_sup") << ","
                          << (res.report.pass ? 1 : 0) << "\n";
            }
            return 0;
        }
        if (*val) {
            if (config.empty()) {
                std::cerr << "validate: --config required\n";
                return 2;
            }
            hs::ExperimentSpec spec = hs::load_spec(config);
            std::vector<std::string> errs = hs::validate_spec(spec);
            for (const std::string& e : errs) std::cerr << "validation: " << e << "\n";
            if (errs.empty()) std::cout << "ok\n";
            return errs.empty() ? 0 : 2;
        }
        if (*plot) {
            hs::emit_plotdata(pdir, what);
            std::cout << "ok\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
