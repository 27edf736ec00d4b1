#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hs/elliptic.hpp"

using namespace hs;

namespace {

// -Lap u = 1 on the disc of radius R, zero boundary: u = (R^2 - |x|^2) / 4.
PoissonProblem disc_problem(const Grid& g, std::vector<std::uint8_t>& unknown,
                            std::vector<double>& f, std::vector<double>& cut, double R) {
    unknown.assign(g.size(), 0);
    f.assign(g.size(), 1.0);
    cut.assign(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        cut[i] = norm(g.position(i)) - R;
        unknown[i] = cut[i] < 0.0 ? 1 : 0;
    }
    PoissonProblem p;
    p.grid = &g;
    p.unknown = unknown;
    p.f = f;
    p.cut = &cut;
    return p;
}

}  // namespace

TEST_CASE("disc source problem matches the closed form at the center") {
    Grid g(2, vec2(-0.6, -0.6), 1.2 / 96, 97);
    std::vector<std::uint8_t> unknown;
    std::vector<double> f, cut;
    PoissonProblem p = disc_problem(g, unknown, f, cut, 0.5);
    GridField u(g);
    EllipticStats st = solve_dirichlet(p, u);
    CHECK(st.converged);
    // u(0) = R^2 / 4 = 0.0625; the cut arms keep the error at O(h^2).
    CHECK(u.interp(vec2(0, 0)) == doctest::Approx(0.0625).epsilon(0.002));
    CHECK(u.interp(vec2(0.25, 0)) == doctest::Approx((0.25 - 0.0625) / 4.0).epsilon(0.005));
    // Outside the disc nothing was touched.
    CHECK(u.interp(vec2(0.58, 0.58)) == doctest::Approx(0.0));
}

TEST_CASE("affine boundary data reproduces the affine solution exactly") {
    Grid g(2, vec2(-1, -1), 2.0 / 32, 33);
    PoissonProblem p;
    p.grid = &g;
    p.unknown.assign(g.size(), 0);
    p.f.assign(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto c = g.coords(i);
        bool edge = c[0] == 0 || c[0] == 32 || c[1] == 0 || c[1] == 32;
        p.unknown[i] = edge ? 0 : 1;
    }
    p.bc = [](const Vec& x) { return 1.0 + 0.5 * x[0] - 0.25 * x[1]; };
    GridField u(g);
    EllipticConfig cfg;
    cfg.tol = 1e-12;
    solve_dirichlet(p, u, cfg);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!p.unknown[i]) continue;
        Vec x = g.position(i);
        worst = std::max(worst, std::abs(u.values[i] - (1.0 + 0.5 * x[0] - 0.25 * x[1])));
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("sweep cap is a hard error, not a silent return") {
    Grid g(2, vec2(-0.6, -0.6), 1.2 / 64, 65);
    std::vector<std::uint8_t> unknown;
    std::vector<double> f, cut;
    PoissonProblem p = disc_problem(g, unknown, f, cut, 0.5);
    GridField u(g);
    EllipticConfig cfg;
    cfg.max_sweeps = 3;
    CHECK_THROWS_AS(solve_dirichlet(p, u, cfg), std::runtime_error);
}

TEST_CASE("warm start reuses the previous solution") {
    Grid g(2, vec2(-0.6, -0.6), 1.2 / 64, 65);
    std::vector<std::uint8_t> unknown;
    std::vector<double> f, cut;
    PoissonProblem p = disc_problem(g, unknown, f, cut, 0.5);
    GridField u(g);
    EllipticStats cold = solve_dirichlet(p, u);
    EllipticStats warm = solve_dirichlet(p, u);
    CHECK(warm.sweeps < cold.sweeps);
    CHECK(warm.converged);
}

TEST_CASE("obstacle solve agrees with the plain solve when the constraint is slack") {
    Grid g(2, vec2(-0.6, -0.6), 1.2 / 48, 49);
    std::vector<std::uint8_t> unknown;
    std::vector<double> f, cut;
    PoissonProblem p = disc_problem(g, unknown, f, cut, 0.5);
    EllipticSystem sys = compile_system(p);
    GridField plain(g), capped(g);
    solve_compiled(sys, plain);
    solve_obstacle_lcp(sys, capped, 0.0);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(capped.values[i] == doctest::Approx(plain.values[i]).epsilon(1e-6));
}

TEST_CASE("obstacle solve clamps to the barrier when the load pulls down") {
    Grid g(2, vec2(-0.6, -0.6), 1.2 / 48, 49);
    std::vector<std::uint8_t> unknown;
    std::vector<double> f, cut;
    PoissonProblem p = disc_problem(g, unknown, f, cut, 0.5);
    for (auto& v : p.f) v = -1.0;  // negative load: u = 0 solves the LCP
    EllipticSystem sys = compile_system(p);
    GridField u(g, 0.5);
    solve_obstacle_lcp(sys, u, 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!p.unknown[i]) continue;
        CHECK(u.values[i] >= -1e-14);
        CHECK(u.values[i] <= 1e-8);
    }
}

TEST_CASE("compiled residual honors the reported tolerance") {
    Grid g(2, vec2(-0.6, -0.6), 1.2 / 64, 65);
    std::vector<std::uint8_t> unknown;
    std::vector<double> f, cut;
    PoissonProblem p = disc_problem(g, unknown, f, cut, 0.5);
    EllipticSystem sys = compile_system(p);
    GridField u(g);
    EllipticConfig cfg;
    cfg.tol = 1e-10;
    EllipticStats st = solve_compiled(sys, u, cfg);
    CHECK(compiled_residual(sys, u) <= cfg.tol * st.scale * (1.0 + 1e-12));
}

TEST_CASE("superharmonic bounds hold for the disc solution") {
    Grid g(2, vec2(-0.6, -0.6), 1.2 / 96, 97);
    std::vector<std::uint8_t> unknown;
    std::vector<double> f, cut;
    PoissonProblem p = disc_problem(g, unknown, f, cut, 0.5);
    GridField u(g);
    EllipticConfig cfg;
    cfg.tol = 1e-11;
    solve_dirichlet(p, u, cfg);
    DiagnosticsReport rep =
        check_superharmonic_bounds(u, [](const Vec&) { return 1.0; }, vec2(0, 0), 0.12);
    CHECK(rep.pass);
    CHECK(rep.measured.at("C_value") < 16.0);
    CHECK(rep.measured.at("C_gradient") < 16.0);
}

TEST_CASE("flat strip reproduces the linear profile and a stable ratio") {
    StripSpec spec;
    spec.g = [](double) { return 0.0; };
    spec.c_g = 0.0;
    spec.L = 4.0;
    spec.depth = 1.0;
    spec.h = 1.0 / 48;
    StripResult res = strip_comparison(spec, 1.0);
    CHECK(res.report.pass);
    CHECK(res.report.measured.at("flat_ratio_rel_err") <= 0.05);
    CHECK(res.report.measured.at("ratio_sup") > 0.0);
}

TEST_CASE("sawtooth strip ratio stays within the cap across widths") {
    double prev = -1.0;
    for (double L : {2.0, 4.0}) {
        StripSpec spec;
        spec.g = [](double s) { return 0.5 * (0.5 - std::abs(s - std::floor(s + 0.5))); };
        spec.c_g = 0.5;
        spec.L = L;
        spec.depth = 1.0;
        spec.h = 1.0 / 32;
        StripResult res = strip_comparison(spec, 1.0);
        CHECK(res.report.pass);
        double r = res.report.measured.at("ratio_sup");
        if (prev > 0.0) CHECK(std::abs(r - prev) / prev <= 0.15);
        prev = r;
    }
}
