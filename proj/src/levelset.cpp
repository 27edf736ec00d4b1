#include "hs/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace hs {

namespace {

constexpr double kFar = std::numeric_limits<double>::infinity();

struct HeapEntry {
    double dist;
    std::size_t idx;
    bool operator>(const HeapEntry& o) const { return dist > o.dist; }
};

// Solves sum_a max(0, (T - d_a)/h)^2 = 1 for T given the smallest accepted
// neighbor distance per axis (kFar where none), using the standard
// incremental closed forms with the axes sorted ascending.
double eikonal_update(const double* axis_dist, int dim, double h) {
    double d[3];
    int n = 0;
    for (int a = 0; a < dim; ++a)
        if (axis_dist[a] < kFar) d[n++] = axis_dist[a];
    if (n == 0) return kFar;
    std::sort(d, d + n);
    double best = d[0] + h;
    for (int m = 2; m <= n; ++m) {
        if (d[m - 1] >= best) break;
        double s = 0.0, s2 = 0.0;
        for (int i = 0; i < m; ++i) {
            s += d[i];
            s2 += d[i] * d[i];
        }
        double disc = s * s - m * (s2 - h * h);
        if (disc < 0.0) continue;
        double t = (s + std::sqrt(disc)) / m;
        if (t >= d[m - 1]) best = std::min(best, t);
    }
    return best;
}

// One-sided fast march from anchored seed distances over the whole grid.
void fast_march(const Grid& grid, std::vector<double>& dist, std::vector<std::uint8_t>& fixed) {
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<HeapEntry>> heap;
    std::size_t n = grid.size();
    for (std::size_t i = 0; i < n; ++i)
        if (fixed[i]) heap.push({dist[i], i});

    while (!heap.empty()) {
        auto [dv, idx] = heap.top();
        heap.pop();
        if (dv > dist[idx]) continue;  // stale entry
        fixed[idx] = 1;
        auto c = grid.coords(idx);
        for (int axis = 0; axis < grid.dim; ++axis) {
            for (int dir = -1; dir <= 1; dir += 2) {
                auto nb = c;
                nb[axis] += dir;
                if (!grid.in_bounds(nb)) continue;
                std::size_t j = grid.index(nb);
                if (fixed[j]) continue;
                double axis_dist[3] = {kFar, kFar, kFar};
                for (int a = 0; a < grid.dim; ++a) {
                    for (int s = -1; s <= 1; s += 2) {
                        auto m = nb;
                        m[a] += s;
                        if (!grid.in_bounds(m)) continue;
                        std::size_t k = grid.index(m);
                        if (fixed[k]) axis_dist[a] = std::min(axis_dist[a], dist[k]);
                    }
                }
                double t = eikonal_update(axis_dist, grid.dim, grid.h);
                if (t < dist[j]) {
                    dist[j] = t;
                    heap.push({t, j});
                }
            }
        }
    }
}

}  // namespace

GridField redistance_anchored(const Grid& grid, const std::vector<std::uint8_t>& inside,
                              const ArmFraction& fraction, double band) {
    if (inside.size() != grid.size()) throw std::invalid_argument("redistance: mask size mismatch");
    std::size_t n = grid.size();
    double h = grid.h;

    // Combine the per-arm front offsets into an anchor distance per node on
    // both sides of the front: d = 1/sqrt(sum_a 1/d_a^2) over crossed arms.
    std::vector<double> inv2_in(n, 0.0), inv2_out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!inside[i]) continue;
        auto c = grid.coords(i);
        for (int axis = 0; axis < grid.dim; ++axis) {
            for (int dir = -1; dir <= 1; dir += 2) {
                auto nb = c;
                nb[axis] += dir;
                if (!grid.in_bounds(nb)) continue;
                std::size_t j = grid.index(nb);
                if (inside[j]) continue;
                double th = fraction(i, axis, dir, j);
                if (!(th > 0.0)) continue;
                th = std::min(th, 1.0);
                double din = std::max(th * h, 1e-12 * h);
                double dout = std::max((1.0 - th) * h, 1e-12 * h);
                inv2_in[i] += 1.0 / (din * din);
                inv2_out[j] += 1.0 / (dout * dout);
            }
        }
    }

    std::vector<double> dist(n, kFar);
    std::vector<std::uint8_t> fixed(n, 0);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
        double inv2 = inside[i] ? inv2_in[i] : inv2_out[i];
        if (inv2 > 0.0) {
            dist[i] = 1.0 / std::sqrt(inv2);
            fixed[i] = 1;
            any = true;
        }
    }
    if (!any) {
        // No front inside the grid: uniform sign, nominal large magnitude.
        GridField out(grid);
        double mag = band > 0.0 ? band : 1e6 * h;
        for (std::size_t i = 0; i < n; ++i) out.values[i] = inside[i] ? -mag : mag;
        return out;
    }

    fast_march(grid, dist, fixed);

    GridField out(grid);
    double cap = band > 0.0 ? band : kFar;
    double far_value = band > 0.0 ? band : 1e6 * h;
    for (std::size_t i = 0; i < n; ++i) {
        double d = dist[i] < kFar ? std::min(dist[i], cap) : far_value;
        out.values[i] = inside[i] ? -d : d;
    }
    return out;
}

void redistance(GridField& phi, double band) {
    const Grid& grid = phi.grid;
    std::size_t n = grid.size();
    std::vector<std::uint8_t> inside(n, 0);
    for (std::size_t i = 0; i < n; ++i) inside[i] = phi.values[i] < 0.0 ? 1 : 0;
    const std::vector<double>& v = phi.values;
    auto frac = [&](std::size_t i, int, int, std::size_t j) {
        double denom = v[j] - v[i];
        if (denom <= 0.0) return 0.5;  // degenerate data; split the arm
        return -v[i] / denom;
    };
    GridField fresh = redistance_anchored(grid, inside, frac, band);
    fresh.time = phi.time;
    phi = std::move(fresh);
}

void advect_normal_speed(GridField& phi, const std::vector<double>& speed, double dt) {
    const Grid& grid = phi.grid;
    std::size_t n = grid.size();
    if (speed.size() != n) throw std::invalid_argument("advect: speed size mismatch");
    std::vector<double> next(phi.values);
    double h = grid.h;
    const std::vector<double>& v = phi.values;

    for (std::size_t i = 0; i < n; ++i) {
        double V = speed[i];
        if (V == 0.0) continue;
        auto c = grid.coords(i);
        double g2 = 0.0;
        for (int axis = 0; axis < grid.dim; ++axis) {
            auto cm = c, cp = c;
            cm[axis] -= 1;
            cp[axis] += 1;
            double dm = grid.in_bounds(cm) ? (v[i] - v[grid.index(cm)]) / h : 0.0;
            double dp = grid.in_bounds(cp) ? (v[grid.index(cp)] - v[i]) / h : 0.0;
            double a, b;
            if (V > 0.0) {
                a = std::max(dm, 0.0);
                b = std::min(dp, 0.0);
            } else {
                a = std::min(dm, 0.0);
                b = std::max(dp, 0.0);
            }
            g2 += a * a + b * b;
        }
        next[i] = v[i] - dt * V * std::sqrt(g2);
    }
    phi.values.swap(next);
    phi.time += dt;
}

}  // namespace hs
