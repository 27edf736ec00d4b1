#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "hs/grid.hpp"
#include "hs/positive_set.hpp"
#include "hs/rng.hpp"

using namespace hs;

TEST_CASE("grid index and coordinate round trip") {
    Grid g2(2, vec2(-1, -1), 0.25, 9);
    CHECK(g2.size() == 81);
    for (std::size_t idx = 0; idx < g2.size(); ++idx) {
        auto c = g2.coords(idx);
        CHECK(g2.index(c) == idx);
        CHECK(c[2] == 0);
    }
    Grid g3(3, vec3(0, 0, 0), 0.5, 5);
    CHECK(g3.size() == 125);
    CHECK(g3.index(4, 4, 4) == 124);
    auto c = g3.coords(g3.index(1, 2, 3));
    CHECK(c[0] == 1);
    CHECK(c[1] == 2);
    CHECK(c[2] == 3);
}

TEST_CASE("node positions follow origin and spacing") {
    Grid g(2, vec2(-1, -1), 0.25, 9);
    Vec p = g.position(4, 4);
    CHECK(p[0] == doctest::Approx(0.0));
    CHECK(p[1] == doctest::Approx(0.0));
    Vec q = g.position(8, 0);
    CHECK(q[0] == doctest::Approx(1.0));
    CHECK(q[1] == doctest::Approx(-1.0));
}

TEST_CASE("interpolation is exact on affine fields and clamps outside") {
    Grid g(2, vec2(-1, -1), 2.0 / 32, 33);
    GridField f(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        Vec x = g.position(i);
        f.values[i] = 0.3 + 1.7 * x[0] - 0.4 * x[1];
    }
    CHECK(f.interp(vec2(0.123, -0.456)) ==
          doctest::Approx(0.3 + 1.7 * 0.123 - 0.4 * -0.456).epsilon(1e-12));
    // Outside the box the sample clamps to the nearest face point.
    CHECK(f.interp(vec2(5.0, 0.0)) == doctest::Approx(0.3 + 1.7 * 1.0).epsilon(1e-12));
    CHECK(f.interp(vec2(-5.0, -5.0)) == doctest::Approx(0.3 - 1.7 + 0.4).epsilon(1e-12));
}

TEST_CASE("gradient is exact on affine fields including box edges") {
    Grid g(2, vec2(-1, -1), 2.0 / 16, 17);
    GridField f(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        Vec x = g.position(i);
        f.values[i] = -2.0 * x[0] + 0.75 * x[1];
    }
    for (int i : {0, 8, 16})
        for (int j : {0, 8, 16}) {
            Vec gr = f.gradient_at(i, j);
            CHECK(gr[0] == doctest::Approx(-2.0).epsilon(1e-12));
            CHECK(gr[1] == doctest::Approx(0.75).epsilon(1e-12));
        }
}

TEST_CASE("ball extrema include the exact axis tips") {
    Grid g(2, vec2(-1, -1), 2.0 / 64, 65);
    GridField f(g);
    for (std::size_t i = 0; i < g.size(); ++i) f.values[i] = g.position(i)[0];
    double r = 0.25;
    CHECK(ball_max(f, vec2(0, 0), r) == doctest::Approx(r).epsilon(1e-12));
    CHECK(ball_min(f, vec2(0, 0), r) == doctest::Approx(-r).epsilon(1e-12));
    // Radius is quantized down to h/4, never up.
    CHECK(ball_max(f, vec2(0, 0), 0.0) == doctest::Approx(0.0));
}

TEST_CASE("field dump and reload are lossless in both formats") {
    Grid g(2, vec2(-0.5, -0.25), 0.125, 7);
    GridField f(g, 0.0, 0.375);
    Rng rng(7);
    for (auto& v : f.values) v = rng.next_in(-3, 3);
    for (bool binary : {false, true}) {
        std::string path = std::filesystem::temp_directory_path() /
                           (binary ? "hs_roundtrip.bin.field" : "hs_roundtrip.field");
        write_field(f, path, binary);
        GridField back = read_field(path);
        REQUIRE(back.grid.same_layout(g));
        CHECK(back.time == f.time);
        for (std::size_t i = 0; i < g.size(); ++i) CHECK(back.values[i] == f.values[i]);
        std::remove(path.c_str());
    }
}

TEST_CASE("validate rejects negative values on non-negative fields") {
    Grid g(2, vec2(0, 0), 0.5, 5);
    GridField f(g, 1.0);
    f.non_negative = true;
    CHECK_NOTHROW(f.validate());
    f.values[4] = -1e-6;
    CHECK_THROWS_AS(f.validate("pressure"), std::runtime_error);
    f.values[4] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS(f.validate());
}

TEST_CASE("positive set boundary marks nodes with an outside face neighbor") {
    Grid g(2, vec2(-1, -1), 2.0 / 32, 33);
    GridField f(g);
    for (std::size_t i = 0; i < g.size(); ++i)
        f.values[i] = std::max(0.4 - norm(g.position(i)), 0.0);
    PositiveSet ps = extract_positive_set(f);
    CHECK(ps.count() > 0);
    CHECK(!ps.boundary_nodes.empty());
    for (std::size_t b : ps.boundary_nodes) {
        CHECK(ps.contains(b));
        CHECK(norm(g.position(b)) <= 0.4 + 1e-12);
        CHECK(norm(g.position(b)) >= 0.4 - 2.0 * g.h);
    }
    // Refined front points sit near the true circle, sub-grid.
    for (const Vec& p : refined_front_points(f, ps))
        CHECK(std::abs(norm(p) - 0.4) <= 0.5 * g.h);
}

TEST_CASE("front graph of a tilted half-space reports its slope") {
    Grid g(2, vec2(-1, -1), 2.0 / 64, 65);
    GridField f(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        Vec x = g.position(i);
        f.values[i] = std::max(0.1 + 0.5 * x[0] - x[1], 0.0);
    }
    FrontGraph fg = extract_front_graph(f, 1, +1);
    REQUIRE(fg.graph_ok);
    CHECK(fg.axis == 1);
    for (std::size_t col = 0; col < fg.column_count(); ++col) {
        if (!fg.has(col)) continue;
        Vec base = fg.column_base(col);
        CHECK(fg.height[col] == doctest::Approx(0.1 + 0.5 * base[0]).epsilon(0.02));
    }
    CHECK(fg.lip_space == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("generator is splitmix64 bit for bit") {
    Rng r(1);
    CHECK(r.next_u64() == 0x910a2dec89025cc1ULL);
    CHECK(r.next_u64() == 0xbeeb8da1658eec67ULL);
    CHECK(r.next_u64() == 0xf893a2eefb32555eULL);
    Rng r42(42);
    CHECK(r42.next_unit() == doctest::Approx(0.7415648787718233).epsilon(1e-15));
    Rng a(9), b(9);
    for (int k = 0; k < 100; ++k) CHECK(a.next_u64() == b.next_u64());
    Rng d(3);
    for (int k = 0; k < 16; ++k) {
        Vec v = d.next_direction(2);
        CHECK(norm(v) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(v[2] == 0.0);
    }
}
