#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hs/cone_harmonics.hpp"

using namespace hs;

TEST_CASE("plane half-angle closed forms") {
    ThetaPair p = theta_beta_closed_2d(1.5);
    CHECK(p.theta_beta == doctest::Approx(M_PI / 3).epsilon(1e-14));
    CHECK(p.theta_beta_prime == doctest::Approx(0.0));
    p = theta_beta_closed_2d(1.25);
    CHECK(p.theta_beta == doctest::Approx(0.4 * M_PI).epsilon(1e-14));
    CHECK(p.theta_beta_prime == doctest::Approx(M_PI / 3).epsilon(1e-12));
    p = theta_beta_closed_2d(1.0);
    CHECK(p.theta_beta == doctest::Approx(M_PI / 2).epsilon(1e-14));
    CHECK(p.theta_beta_prime == doctest::Approx(M_PI / 2).epsilon(1e-12));
}

TEST_CASE("plane cap eigenvalue matches (pi / 2 theta)^2") {
    for (double theta : {M_PI / 6, M_PI / 4, M_PI / 3, M_PI / 2}) {
        double want = std::pow(M_PI / (2.0 * theta), 2);
        CHECK(cap_eigenvalue(theta, 2) == doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("hemisphere eigenvalue is exactly two") {
    // The linear coordinate is harmonic and vanishes on the equator, so the
    // first eigenvalue of the half-sphere cap is beta (beta + 1) = 2.
    CHECK(cap_eigenvalue(M_PI / 2, 3) == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(beta_theta(M_PI / 2, 3) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("growth exponent and half-angle invert each other in the plane") {
    for (double beta : {1.1, 1.25, 1.5, 1.9}) {
        double theta = theta_beta_closed_2d(beta).theta_beta;
        CHECK(beta_theta(theta, 2) == doctest::Approx(beta).epsilon(1e-9));
    }
    CHECK(beta_theta(M_PI / 2, 2) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("narrower cones force faster growth") {
    double prev = 0.0;
    for (double theta : {M_PI / 2, M_PI / 3, M_PI / 4, M_PI / 6}) {
        double b2 = beta_theta(theta, 2);
        double b3 = beta_theta(theta, 3);
        CHECK(b2 > prev);
        CHECK(b3 > b2 - 1e-12);  // same cap is smaller on the sphere
        prev = b2;
    }
}

TEST_CASE("sampled cone profile grows like r^beta on the axis and dies outside") {
    Grid g(2, vec2(-1, -1), 2.0 / 256, 257);
    double theta = M_PI / 3;
    GridField f = cone_harmonic_field(theta, g, vec2(1, 0));
    double beta = beta_theta(theta, 2);
    for (double r : {0.25, 0.5, 0.75})
        CHECK(f.interp(vec2(r, 0)) == doctest::Approx(std::pow(r, beta)).epsilon(0.01));
    // Homogeneity: doubling the radius scales the axis value by 2^beta.
    double ratio = f.interp(vec2(0.8, 0)) / f.interp(vec2(0.4, 0));
    CHECK(ratio == doctest::Approx(std::pow(2.0, beta)).epsilon(0.01));
    CHECK(f.interp(vec2(-0.5, 0.0)) == doctest::Approx(0.0));
    CHECK(f.interp(vec2(0.1, 0.9)) == doctest::Approx(0.0));
}

TEST_CASE("vertex offset relocates the profile") {
    Grid g(2, vec2(-1, -1), 2.0 / 128, 129);
    GridField f = cone_harmonic_field(M_PI / 4, g, vec2(0, 1), vec2(0.2, -0.3));
    CHECK(f.interp(vec2(0.2, -0.3)) == doctest::Approx(0.0));
    CHECK(f.interp(vec2(0.2, 0.2)) > 0.0);
    CHECK(f.interp(vec2(0.2, -0.5)) == doctest::Approx(0.0));
}

TEST_CASE("cone table rows are self-consistent") {
    auto rows = cone_table({M_PI / 6, M_PI / 4, M_PI / 3, M_PI / 2}, 2);
    REQUIRE(rows.size() == 4);
    double want[4] = {9.0, 4.0, 2.25, 1.0};
    double wantb[4] = {3.0, 2.0, 1.5, 1.0};
    for (int k = 0; k < 4; ++k) {
        CHECK(rows[k].lambda1 == doctest::Approx(want[k]).epsilon(1e-9));
        CHECK(rows[k].beta == doctest::Approx(wantb[k]).epsilon(1e-9));
        CHECK(rows[k].theta_inverse_err <= 1e-8);
    }
    auto rows3 = cone_table({M_PI / 3, M_PI / 2}, 3);
    CHECK(rows3[1].lambda1 == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(rows3[0].lambda1 > rows3[1].lambda1);
}
