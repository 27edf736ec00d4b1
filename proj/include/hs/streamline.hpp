#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "hs/vec.hpp"

namespace hs {

// Drift field together with its declared regularity constants.
struct DriftField {
    std::function<Vec(const Vec&)> b;
    double lip_b = 0.0;
    double sup_b = 0.0;

    Vec operator()(const Vec& x) const { return b ? b(x) : Vec{0, 0, 0}; }
};

// Trajectory of dX/dt = -b(X), X(0) = x0; fixed-step RK4, t may be negative.
struct Streamline {
    std::vector<double> times;
    std::vector<Vec> points;

    const Vec& endpoint() const { return points.back(); }
    // Linear interpolation in time (times are sorted by |t| progression).
    Vec at(double t) const;
};

Streamline integrate_streamline(const DriftField& drift, const Vec& x0, double t_final,
                                int steps);

// Displacement X(t; x) - x of the flow map.
Vec flow_displacement(const DriftField& drift, const Vec& x, double t, int steps);

// CSV rows "t,x1,..,xd".
void write_streamline_csv(std::ostream& os, const Streamline& s, int dim);

}  // namespace hs
