#pragma once

#include <cmath>
#include <stdexcept>

#include "hs/vec.hpp"

namespace hs {

// Axis-symmetric direction cone: all p with angle(p, mu) <= theta.
struct Cone {
    Vec mu{0, -1, 0};     // unit axis
    double theta = 0.0;   // half-angle in [0, pi/2]

    Cone() = default;
    Cone(const Vec& axis, double half_angle) : mu(normalized(axis)), theta(half_angle) {
        if (!(half_angle >= 0 && half_angle <= M_PI / 2 + 1e-12))
            throw std::invalid_argument("cone: half-angle outside [0, pi/2]");
        if (norm(axis) == 0) throw std::invalid_argument("cone: zero axis");
    }
};

// Boundary counts as inside; p = 0 is inside by convention.
inline bool cone_contains(const Cone& c, const Vec& p) {
    double np = norm(p);
    if (np == 0) return true;
    double ca = dot(p, c.mu) / np;
    ca = ca > 1 ? 1 : (ca < -1 ? -1 : ca);
    return std::acos(ca) <= c.theta + 1e-14;
}

}  // namespace hs
