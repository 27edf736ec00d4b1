#include "hs/positive_set.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace hs {

namespace {

double default_tol(const GridField& f) {
    double m = f.max_value();
    return m > 0 ? 1e-12 * m : 1e-12;
}

std::vector<std::size_t> collect_boundary(const Grid& g, const std::vector<std::uint8_t>& mask) {
    std::vector<std::size_t> bnd;
    for (std::size_t idx = 0; idx < mask.size(); ++idx) {
        if (!mask[idx]) continue;
        int i, j, k;
        g.coords(idx, i, j, k);
        bool edge = false;
        int c[3] = {i, j, k};
        for (int a = 0; a < g.dim && !edge; ++a) {
            for (int s = -1; s <= 1 && !edge; s += 2) {
                int n[3] = {c[0], c[1], c[2]};
                n[a] += s;
                if (!g.in_bounds(n[0], n[1], n[2])) continue;
                if (!mask[g.index(n[0], n[1], n[2])]) edge = true;
            }
        }
        if (edge) bnd.push_back(idx);
    }
    return bnd;
}

// Sub-grid crossing offset (in units of h) past the last positive node,
// combining level interpolation with slope extrapolation so linear profiles
// that stop exactly at zero are still located exactly.
double crossing_fraction(double u_prev, double u_last, double u_next, double tol) {
    double th = 1.0;
    if (u_last > u_next) {
        double ti = (u_last - tol) / (u_last - u_next);
        th = std::clamp(ti, 0.0, 1.0);
    }
    if (std::isfinite(u_prev) && u_prev > u_last) {
        double te = std::clamp(u_last / (u_prev - u_last), 0.0, 1.0);
        th = std::min(th, te);
    }
    return th;
}

}  // namespace

std::size_t PositiveSet::count() const {
    std::size_t n = 0;
    for (auto m : mask) n += m != 0;
    return n;
}

PositiveSet extract_positive_set(const GridField& field, double tol) {
    if (tol < 0) tol = default_tol(field);
    std::vector<std::uint8_t> mask(field.grid.size(), 0);
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = field.values[i] > tol ? 1 : 0;
    return positive_set_from_mask(field.grid, std::move(mask), tol);
}

PositiveSet positive_set_from_mask(const Grid& grid, std::vector<std::uint8_t> mask, double tol) {
    PositiveSet ps;
    ps.grid = grid;
    ps.mask = std::move(mask);
    ps.tol_pos = tol;
    ps.boundary_nodes = collect_boundary(grid, ps.mask);
    return ps;
}

double distance_to_front(const PositiveSet& ps, const Vec& x) {
    if (ps.boundary_nodes.empty()) throw std::runtime_error("distance_to_front: empty front");
    double best = std::numeric_limits<double>::max();
    for (std::size_t idx : ps.boundary_nodes) best = std::min(best, norm(x - ps.grid.position(idx)));
    return best;
}

std::vector<Vec> refined_front_points(const GridField& field, const PositiveSet& ps) {
    std::vector<Vec> pts;
    const Grid& g = field.grid;
    for (std::size_t idx : ps.boundary_nodes) {
        int i, j, k;
        g.coords(idx, i, j, k);
        int c[3] = {i, j, k};
        double u_last = field.values[idx];
        for (int a = 0; a < g.dim; ++a) {
            for (int s = -1; s <= 1; s += 2) {
                int n[3] = {c[0], c[1], c[2]};
                n[a] += s;
                if (!g.in_bounds(n[0], n[1], n[2])) continue;
                std::size_t nidx = g.index(n[0], n[1], n[2]);
                if (ps.mask[nidx]) continue;
                int p[3] = {c[0], c[1], c[2]};
                p[a] -= s;
                double u_prev = g.in_bounds(p[0], p[1], p[2])
                                    ? field.values[g.index(p[0], p[1], p[2])]
                                    : std::numeric_limits<double>::quiet_NaN();
                double th = crossing_fraction(u_prev, u_last, field.values[nidx], ps.tol_pos);
                Vec x = g.position(idx);
                x[a] += s * th * g.h;
                pts.push_back(x);
            }
        }
    }
    return pts;
}

Vec FrontGraph::column_base(std::size_t col) const {
    int a0 = -1, a1 = -1;
    for (int a = 0; a < grid.dim; ++a)
        if (a != axis) (a0 < 0 ? a0 : a1) = a;
    Vec x{0, 0, 0};
    if (grid.dim == 2) {
        x[a0] = grid.origin[a0] + grid.h * double(col);
    } else {
        std::size_t n0 = std::size_t(grid.extents[a0]);
        x[a0] = grid.origin[a0] + grid.h * double(col % n0);
        x[a1] = grid.origin[a1] + grid.h * double(col / n0);
    }
    return x;
}

Vec FrontGraph::front_point(std::size_t col) const {
    Vec x = column_base(col);
    x[axis] = height[col];
    return x;
}

FrontGraph extract_front_graph(const GridField& field, int axis, int dir, double tol) {
    const Grid& g = field.grid;
    if (axis < 0 || axis >= g.dim) throw std::invalid_argument("extract_front_graph: bad axis");
    if (dir != 1 && dir != -1) throw std::invalid_argument("extract_front_graph: dir must be +-1");
    if (tol < 0) tol = default_tol(field);

    int a0 = -1, a1 = -1;
    for (int a = 0; a < g.dim; ++a)
        if (a != axis) (a0 < 0 ? a0 : a1) = a;
    std::size_t cols = std::size_t(g.extents[a0]) * (g.dim == 3 ? g.extents[a1] : 1);
    int n_axis = g.extents[axis];

    FrontGraph fg;
    fg.grid = g;
    fg.axis = axis;
    fg.dir = dir;
    fg.time = field.time;
    fg.height.assign(cols, std::numeric_limits<double>::quiet_NaN());

    std::size_t crossings = 0;
    for (std::size_t col = 0; col < cols; ++col) {
        int c[3] = {0, 0, 0};
        c[a0] = int(g.dim == 2 ? col : col % g.extents[a0]);
        if (g.dim == 3) c[a1] = int(col / g.extents[a0]);

        // Walk the column in +dir order and record positive intervals.
        int intervals = 0;
        int end_node = -1;  // dir-most node of the dir-most interval
        bool inside = false;
        for (int s = 0; s < n_axis; ++s) {
            c[axis] = dir > 0 ? s : n_axis - 1 - s;
            bool pos = field.values[g.index(c[0], c[1], c[2])] > tol;
            if (pos && !inside) { ++intervals; inside = true; }
            if (pos) end_node = c[axis];
            if (!pos) inside = false;
        }
        if (intervals == 0) continue;
        if (intervals > 1) fg.graph_ok = false;

        int next = end_node + dir;
        if (next < 0 || next >= n_axis) continue;  // set meets the box: no in-domain crossing
        c[axis] = end_node;
        double u_last = field.values[g.index(c[0], c[1], c[2])];
        c[axis] = next;
        double u_next = field.values[g.index(c[0], c[1], c[2])];
        c[axis] = end_node - dir;
        double u_prev = (end_node - dir >= 0 && end_node - dir < n_axis)
                            ? field.values[g.index(c[0], c[1], c[2])]
                            : std::numeric_limits<double>::quiet_NaN();
        double th = crossing_fraction(u_prev, u_last, u_next, tol);
        fg.height[col] = g.origin[axis] + g.h * end_node + dir * th * g.h;
        ++crossings;
    }
    if (crossings == 0) throw std::runtime_error("extract_front_graph: front outside domain");

    double lip = 0.0;
    if (g.dim == 2) {
        for (std::size_t col = 0; col + 1 < cols; ++col)
            if (fg.has(col) && fg.has(col + 1))
                lip = std::max(lip, std::abs(fg.height[col + 1] - fg.height[col]) / g.h);
    } else {
        std::size_t n0 = std::size_t(g.extents[a0]), n1 = std::size_t(g.extents[a1]);
        auto idx = [&](std::size_t p, std::size_t q) { return p + n0 * q; };
        for (std::size_t q = 0; q < n1; ++q)
            for (std::size_t p = 0; p < n0; ++p) {
                if (!fg.has(idx(p, q))) continue;
                if (p + 1 < n0 && fg.has(idx(p + 1, q)))
                    lip = std::max(lip, std::abs(fg.height[idx(p + 1, q)] - fg.height[idx(p, q)]) / g.h);
                if (q + 1 < n1 && fg.has(idx(p, q + 1)))
                    lip = std::max(lip, std::abs(fg.height[idx(p, q + 1)] - fg.height[idx(p, q)]) / g.h);
            }
    }
    fg.lip_space = lip;
    return fg;
}

double front_graph_time_lipschitz(const FrontGraph& a, const FrontGraph& b) {
    if (a.height.size() != b.height.size() || a.axis != b.axis)
        throw std::invalid_argument("front_graph_time_lipschitz: layouts differ");
    double dt = std::abs(b.time - a.time);
    if (dt == 0) throw std::invalid_argument("front_graph_time_lipschitz: equal times");
    double m = 0.0;
    for (std::size_t c = 0; c < a.height.size(); ++c)
        if (a.has(c) && b.has(c)) m = std::max(m, std::abs(b.height[c] - a.height[c]) / dt);
    return m;
}

void append_front_csv(std::ostream& os, const FrontGraph& g) {
    for (std::size_t col = 0; col < g.column_count(); ++col) {
        if (!g.has(col)) continue;
        Vec base = g.column_base(col);
        os << g.time << ",";
        int a0 = -1, a1 = -1;
        for (int a = 0; a < g.grid.dim; ++a)
            if (a != g.axis) (a0 < 0 ? a0 : a1) = a;
        os << base[a0];
        if (g.grid.dim == 3) os << "," << base[a1];
        os << "," << g.height[col] << "\n";
    }
}

}  // namespace hs
