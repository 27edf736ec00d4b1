#include "hs/streamline.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace hs {

Vec Streamline::at(double t) const {
    if (times.size() < 2) return points.front();
    double t0 = times.front(), t1 = times.back();
    bool fwd = t1 >= t0;
    if ((fwd && t <= t0) || (!fwd && t >= t0)) return points.front();
    if ((fwd && t >= t1) || (!fwd && t <= t1)) return points.back();
    std::size_t lo = 0, hi = times.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        bool before = fwd ? times[mid] <= t : times[mid] >= t;
        (before ? lo : hi) = mid;
    }
    double span = times[hi] - times[lo];
    double w = span != 0 ? (t - times[lo]) / span : 0.0;
    return points[lo] + w * (points[hi] - points[lo]);
}

Streamline integrate_streamline(const DriftField& drift, const Vec& x0, double t_final,
                                int steps) {
    if (steps < 1) throw std::invalid_argument("integrate_streamline: steps >= 1");
    Streamline s;
    s.times.reserve(steps + 1);
    s.points.reserve(steps + 1);
    double dt = t_final / steps;
    Vec x = x0;
    double t = 0.0;
    s.times.push_back(t);
    s.points.push_back(x);
    auto rhs = [&](const Vec& p) { return -1.0 * drift(p); };
    for (int i = 0; i < steps; ++i) {
        Vec k1 = rhs(x);
        Vec k2 = rhs(x + 0.5 * dt * k1);
        Vec k3 = rhs(x + 0.5 * dt * k2);
        Vec k4 = rhs(x + dt * k3);
        x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += dt;
        s.times.push_back(t);
        s.points.push_back(x);
    }
    return s;
}

Vec flow_displacement(const DriftField& drift, const Vec& x, double t, int steps) {
    if (t == 0) return {0, 0, 0};
    return integrate_streamline(drift, x, t, steps).endpoint() - x;
}

void write_streamline_csv(std::ostream& os, const Streamline& s, int dim) {
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        os << s.times[i];
        for (int a = 0; a < dim; ++a) os << "," << s.points[i][a];
        os << "\n";
    }
}

}  // namespace hs
